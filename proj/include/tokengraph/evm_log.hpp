#pragma once

#include <tokengraph/bytes.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tokengraph
{

// keccak256("Transfer(address,address,uint256)")
inline constexpr std::string_view transfer_signature_hex =
    "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef";

Hash32 const &transfer_signature();

struct RawLog
{
    Address emitter;
    std::vector<Hash32> topics;
    std::vector<uint8_t> data;
    uint64_t block_number{0};
    Hash32 tx_hash;
    uint64_t log_index{0};
    uint64_t tx_index{0};

    bool operator==(RawLog const &) const = default;
};

enum class TransferKind
{
    mint,
    burn,
    move,
};

std::string_view to_string(TransferKind kind);

struct TransferEvent
{
    Address token;
    Address from;
    Address to;
    Uint256 amount;
    uint64_t block_number{0};
    Hash32 tx_hash;
    uint64_t log_index{0};

    // Mint wins over burn when both endpoints are the zero address.
    TransferKind kind() const
    {
        if (from.is_zero()) {
            return TransferKind::mint;
        }
        if (to.is_zero()) {
            return TransferKind::burn;
        }
        return TransferKind::move;
    }

    bool operator==(TransferEvent const &) const = default;
};

inline TransferKind classify(TransferEvent const &event)
{
    return event.kind();
}

class MalformedLogError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct DecodeOptions
{
    // Reject topics whose 12 high bytes are not zero instead of truncating.
    bool strict = false;
};

struct DecodeCounters
{
    uint64_t dirty_padding = 0;
};

// Returns nothing for any log that is not an ERC-20 Transfer (wrong topic0,
// ERC-721 four-topic shape, or a data payload other than one word).
std::optional<TransferEvent> decode_transfer(
    RawLog const &log, DecodeOptions const &options = {},
    DecodeCounters *counters = nullptr);

// Inverse of decode_transfer; used by the synthetic generators.
RawLog encode_transfer(TransferEvent const &event, uint64_t tx_index = 0);

// eth_getLogs result object shape.
nlohmann::json to_json(RawLog const &log);
RawLog raw_log_from_json(nlohmann::json const &j);
std::string to_jsonl_line(RawLog const &log);

// Accepts "0x1a" quantity strings or plain JSON integers.
uint64_t parse_quantity(nlohmann::json const &j);
std::string to_quantity(uint64_t v);

} // namespace tokengraph
