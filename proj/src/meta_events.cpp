#include <tokengraph/meta_events.hpp>

#include <tokengraph/csv.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace tokengraph
{

std::string_view to_string(ActionKind action)
{
    return action == ActionKind::deposit_and_mint ? "deposit_and_mint"
                                                  : "withdraw_and_burn";
}

ActionKind parse_action(std::string_view text)
{
    if (text == "deposit_and_mint") {
        return ActionKind::deposit_and_mint;
    }
    if (text == "withdraw_and_burn") {
        return ActionKind::withdraw_and_burn;
    }
    throw ParseError("unknown action '" + std::string(text) + "'");
}

PairingMode parse_pairing_mode(std::string_view text)
{
    if (text == "loose") {
        return PairingMode::loose;
    }
    if (text == "strict") {
        return PairingMode::strict;
    }
    throw std::invalid_argument(
        "policy must be 'strict' or 'loose', got '" + std::string(text) + "'");
}

void PairingPolicy::validate() const
{
    if (max_events_per_tx < 2) {
        throw std::invalid_argument("max_events_per_tx must be at least 2");
    }
}

std::optional<ActionKind> pair_action(
    TransferEvent const &asset, TransferEvent const &share,
    PairingPolicy const &policy)
{
    if (asset.kind() != TransferKind::move) {
        return std::nullopt;
    }
    if (!policy.allow_self_wrap && asset.token == share.token) {
        return std::nullopt;
    }
    bool const strict = policy.mode == PairingMode::strict;
    switch (share.kind()) {
    case TransferKind::mint:
        // A mint to the zero address has no counterpart user.
        if (share.to.is_zero() || asset.to != share.token) {
            return std::nullopt;
        }
        if (strict && share.to != asset.from) {
            return std::nullopt;
        }
        return ActionKind::deposit_and_mint;
    case TransferKind::burn:
        if (asset.from != share.token) {
            return std::nullopt;
        }
        if (strict && asset.to != share.from) {
            return std::nullopt;
        }
        return ActionKind::withdraw_and_burn;
    case TransferKind::move:
        break;
    }
    return std::nullopt;
}

namespace
{
    class BatchMatcher
    {
    public:
        BatchMatcher(TxBatch const &batch, PairingPolicy const &policy)
        {
            auto const &ev = batch.events;
            for (std::size_t i = 0; i < ev.size(); ++i) {
                if (ev[i].kind() != TransferKind::move) {
                    shares_.push_back(i);
                }
            }
            candidates_.resize(shares_.size());
            for (std::size_t s = 0; s < shares_.size(); ++s) {
                for (std::size_t a = 0; a < ev.size(); ++a) {
                    if (a == shares_[s]) {
                        continue;
                    }
                    if (auto action = pair_action(ev[a], ev[shares_[s]], policy)) {
                        candidates_[s].push_back({a, *action});
                    }
                }
            }
            asset_owner_.assign(ev.size(), npos);
        }

        void run()
        {
            for (std::size_t s = 0; s < shares_.size(); ++s) {
                if (candidates_[s].empty()) {
                    continue;
                }
                visited_.assign(asset_owner_.size(), false);
                augment(s);
            }
        }

        // (share event index, asset event index, action) per matched pair.
        std::vector<std::tuple<std::size_t, std::size_t, ActionKind>> pairs() const
        {
            std::vector<std::tuple<std::size_t, std::size_t, ActionKind>> out;
            for (std::size_t a = 0; a < asset_owner_.size(); ++a) {
                if (asset_owner_[a] == npos) {
                    continue;
                }
                auto s = asset_owner_[a];
                for (auto const &c : candidates_[s]) {
                    if (c.asset == a) {
                        out.emplace_back(shares_[s], a, c.action);
                    }
                }
            }
            std::sort(out.begin(), out.end(), [](auto const &x, auto const &y) {
                return std::min(std::get<0>(x), std::get<1>(x)) <
                       std::min(std::get<0>(y), std::get<1>(y));
            });
            return out;
        }

    private:
        static constexpr std::size_t npos = static_cast<std::size_t>(-1);

        struct Candidate
        {
            std::size_t asset;
            ActionKind action;
        };

        bool augment(std::size_t s)
        {
            for (auto const &c : candidates_[s]) {
                if (!visited_[c.asset] && asset_owner_[c.asset] == npos) {
                    visited_[c.asset] = true;
                    asset_owner_[c.asset] = s;
                    return true;
                }
            }
            for (auto const &c : candidates_[s]) {
                if (visited_[c.asset]) {
                    continue;
                }
                visited_[c.asset] = true;
                if (augment(asset_owner_[c.asset])) {
                    asset_owner_[c.asset] = s;
                    return true;
                }
            }
            return false;
        }

        std::vector<std::size_t> shares_;
        std::vector<std::vector<Candidate>> candidates_;
        std::vector<std::size_t> asset_owner_;
        std::vector<bool> visited_;
    };
}

std::vector<TokenisingMetaEvent>
detect(TxBatch const &batch, PairingPolicy const &policy)
{
    std::vector<TokenisingMetaEvent> out;
    if (batch.events.size() < 2 || batch.events.size() > policy.max_events_per_tx) {
        return out;
    }
    BatchMatcher matcher(batch, policy);
    matcher.run();
    for (auto const &[s, a, action] : matcher.pairs()) {
        auto const &share = batch.events[s];
        auto const &asset = batch.events[a];
        TokenisingMetaEvent m;
        m.source_token = asset.token;
        m.target_token = share.token;
        m.action = action;
        m.source_amount = asset.amount;
        m.target_amount = share.amount;
        m.tx_hash = batch.tx_hash;
        m.block_number = batch.block_number;
        m.asset_log_index = asset.log_index;
        m.share_log_index = share.log_index;
        out.push_back(std::move(m));
    }
    return out;
}

nlohmann::json DetectionStats::to_json() const
{
    return {
        {"batches", batches},
        {"transfers", transfers},
        {"meta_events", meta_events()},
        {"deposit_and_mint", deposit_and_mint},
        {"withdraw_and_burn", withdraw_and_burn},
        {"skipped_oversized_tx", skipped_oversized_tx},
        {"self_wrap", self_wrap},
    };
}

Detector::Detector(PairingPolicy policy)
    : policy_(policy)
{
    policy_.validate();
}

void Detector::process(TxBatch const &batch, MetaEventSink const &sink)
{
    ++stats_.batches;
    stats_.transfers += batch.events.size();
    if (batch.events.size() > policy_.max_events_per_tx) {
        ++stats_.skipped_oversized_tx;
        return;
    }
    for (auto const &m : detect(batch, policy_)) {
        if (m.action == ActionKind::deposit_and_mint) {
            ++stats_.deposit_and_mint;
        }
        else {
            ++stats_.withdraw_and_burn;
        }
        if (m.source_token == m.target_token) {
            ++stats_.self_wrap;
        }
        sink(m);
    }
}

DetectionResult
detect_all(std::vector<TxBatch> const &batches, PairingPolicy const &policy)
{
    Detector detector(policy);
    DetectionResult out;
    for (auto const &b : batches) {
        detector.process(b, [&](TokenisingMetaEvent const &m) {
            out.events.push_back(m);
        });
    }
    out.stats = detector.stats();
    return out;
}

namespace
{
    struct PairHash
    {
        std::size_t operator()(std::pair<Address, Address> const &p) const noexcept
        {
            FixedBytesHash h;
            return h(p.first) * 31 + h(p.second);
        }
    };
}

std::vector<TokenisingMetaEvent>
apply_two_way_filter(std::vector<TokenisingMetaEvent> const &events)
{
    // bit 0: has deposit & mint, bit 1: has withdraw & burn
    std::unordered_map<std::pair<Address, Address>, unsigned, PairHash> seen;
    for (auto const &m : events) {
        seen[{m.source_token, m.target_token}] |=
            m.action == ActionKind::deposit_and_mint ? 1u : 2u;
    }
    std::vector<TokenisingMetaEvent> out;
    for (auto const &m : events) {
        if (seen[{m.source_token, m.target_token}] == 3u) {
            out.push_back(m);
        }
    }
    return out;
}

std::string to_csv_row(TokenisingMetaEvent const &m)
{
    std::string row;
    row.reserve(200);
    row += m.source_token.hex();
    row += ',';
    row += m.target_token.hex();
    row += ',';
    row += to_string(m.action);
    row += ',';
    row += to_decimal(m.source_amount);
    row += ',';
    row += to_decimal(m.target_amount);
    row += ',';
    row += m.tx_hash.hex();
    row += ',';
    row += std::to_string(m.block_number);
    return row;
}

void write_meta_events_csv(
    std::ostream &out, std::vector<TokenisingMetaEvent> const &events)
{
    out << meta_event_csv_header << '\n';
    for (auto const &m : events) {
        out << to_csv_row(m) << '\n';
    }
}

std::string meta_events_csv(std::vector<TokenisingMetaEvent> const &events)
{
    std::ostringstream out;
    write_meta_events_csv(out, events);
    return out.str();
}

std::vector<TokenisingMetaEvent> read_meta_events_csv(std::istream &in)
{
    std::vector<TokenisingMetaEvent> out;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != meta_event_csv_header) {
                throw ParseError("line 1: unexpected meta-event CSV header");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 7) {
            throw ParseError(
                "line " + std::to_string(line_no) + ": expected 7 fields, got " +
                std::to_string(fields.size()));
        }
        try {
            TokenisingMetaEvent m;
            m.source_token = Address::parse(fields[0]);
            m.target_token = Address::parse(fields[1]);
            m.action = parse_action(fields[2]);
            m.source_amount = parse_decimal_uint256(fields[3]);
            m.target_amount = parse_decimal_uint256(fields[4]);
            m.tx_hash = Hash32::parse(fields[5]);
            auto const &b = fields[6];
            auto [end, ec] = std::from_chars(b.data(), b.data() + b.size(), m.block_number);
            if (b.empty() || ec != std::errc() || end != b.data() + b.size()) {
                throw ParseError("bad block_number '" + b + "'");
            }
            out.push_back(std::move(m));
        }
        catch (std::exception const &e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TokenisingMetaEvent> load_meta_events_csv(std::string const &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_meta_events_csv(in);
}

} // namespace tokengraph
