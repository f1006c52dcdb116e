#pragma once

#include <tokengraph/ingestion.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace tokengraph
{

enum class ActionKind
{
    deposit_and_mint,
    withdraw_and_burn,
};

// "deposit_and_mint" / "withdraw_and_burn"
std::string_view to_string(ActionKind action);
ActionKind parse_action(std::string_view text);

// One asset leg (the underlying moving into or out of the share contract)
// paired with one share leg (the mint or burn of the share token).
struct TokenisingMetaEvent
{
    Address source_token; // asset
    Address target_token; // share
    ActionKind action{ActionKind::deposit_and_mint};
    Uint256 source_amount;
    Uint256 target_amount;
    Hash32 tx_hash;
    uint64_t block_number{0};
    uint64_t asset_log_index{0};
    uint64_t share_log_index{0};

    bool operator==(TokenisingMetaEvent const &) const = default;
};

enum class PairingMode
{
    // Asset and share legs may belong to different users.
    loose,
    // Depositor receives the mint; burner receives the withdrawal.
    strict,
};

struct PairingPolicy
{
    PairingMode mode = PairingMode::loose;
    bool allow_self_wrap = true;
    std::size_t max_events_per_tx = 512;

    void validate() const;
};

PairingMode parse_pairing_mode(std::string_view text);

// Whether `asset` and `share` (two distinct events of one transaction) form
// a tokenising pair, and which one.
std::optional<ActionKind> pair_action(
    TransferEvent const &asset, TransferEvent const &share,
    PairingPolicy const &policy);

// Maximum single-use pairing of the batch. Share legs are visited in log
// order and take the earliest free compatible asset leg; when none is free
// an augmenting path is searched, so the result is always a maximum
// matching and reduces to plain greedy pairing when there is no contention.
// Output is ordered by the lower log index of each pair.
std::vector<TokenisingMetaEvent>
detect(TxBatch const &batch, PairingPolicy const &policy);

struct DetectionStats
{
    uint64_t batches = 0;
    uint64_t transfers = 0;
    uint64_t deposit_and_mint = 0;
    uint64_t withdraw_and_burn = 0;
    uint64_t skipped_oversized_tx = 0;
    uint64_t self_wrap = 0;

    uint64_t meta_events() const { return deposit_and_mint + withdraw_and_burn; }
    nlohmann::json to_json() const;
    bool operator==(DetectionStats const &) const = default;
};

using MetaEventSink = std::function<void(TokenisingMetaEvent const &)>;

// Streaming detector over ordered batches.
class Detector
{
public:
    explicit Detector(PairingPolicy policy = {});

    void process(TxBatch const &batch, MetaEventSink const &sink);
    DetectionStats const &stats() const { return stats_; }

private:
    PairingPolicy policy_;
    DetectionStats stats_;
};

struct DetectionResult
{
    std::vector<TokenisingMetaEvent> events;
    DetectionStats stats;
};

DetectionResult
detect_all(std::vector<TxBatch> const &batches, PairingPolicy const &policy = {});

// Keeps the events of (source, target) pairs that have both a deposit & mint
// and a withdraw & burn somewhere in the input. Order preserved.
std::vector<TokenisingMetaEvent>
apply_two_way_filter(std::vector<TokenisingMetaEvent> const &events);

// CSV with header
// source_token,target_token,action,source_amount,target_amount,tx_hash,block_number
inline constexpr std::string_view meta_event_csv_header =
    "source_token,target_token,action,source_amount,target_amount,tx_hash,"
    "block_number";

std::string to_csv_row(TokenisingMetaEvent const &event);
void write_meta_events_csv(
    std::ostream &out, std::vector<TokenisingMetaEvent> const &events);
std::string meta_events_csv(std::vector<TokenisingMetaEvent> const &events);

// Log indices are not part of the CSV and come back as zero.
std::vector<TokenisingMetaEvent> read_meta_events_csv(std::istream &in);
std::vector<TokenisingMetaEvent> load_meta_events_csv(std::string const &path);

} // namespace tokengraph
