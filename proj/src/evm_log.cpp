#include <tokengraph/evm_log.hpp>

#include <algorithm>
#include <charconv>

namespace tokengraph
{

Hash32 const &transfer_signature()
{
    static Hash32 const sig = Hash32::parse(transfer_signature_hex);
    return sig;
}

std::string_view to_string(TransferKind kind)
{
    switch (kind) {
    case TransferKind::mint:
        return "mint";
    case TransferKind::burn:
        return "burn";
    case TransferKind::move:
        return "move";
    }
    return "?";
}

namespace
{
    // Low 20 bytes of a 32-byte topic. Sets `dirty` when the pad is nonzero.
    Address topic_address(Hash32 const &topic, bool &dirty)
    {
        Address a;
        dirty = !std::all_of(
            topic.bytes.begin(), topic.bytes.begin() + 12,
            [](uint8_t b) { return b == 0; });
        std::copy(topic.bytes.begin() + 12, topic.bytes.end(), a.bytes.begin());
        return a;
    }

    Hash32 pad_address(Address const &a)
    {
        Hash32 h;
        std::copy(a.bytes.begin(), a.bytes.end(), h.bytes.begin() + 12);
        return h;
    }
}

std::optional<TransferEvent> decode_transfer(
    RawLog const &log, DecodeOptions const &options, DecodeCounters *counters)
{
    if (log.topics.size() != 3 || log.topics[0] != transfer_signature() ||
        log.data.size() != 32) {
        return std::nullopt;
    }
    bool dirty_from = false;
    bool dirty_to = false;
    TransferEvent ev;
    ev.token = log.emitter;
    ev.from = topic_address(log.topics[1], dirty_from);
    ev.to = topic_address(log.topics[2], dirty_to);
    if (dirty_from || dirty_to) {
        if (options.strict) {
            throw MalformedLogError(
                "transfer topic has nonzero address padding (tx " +
                log.tx_hash.hex() + ", log " + std::to_string(log.log_index) +
                ")");
        }
        if (counters) {
            ++counters->dirty_padding;
        }
    }
    ev.amount = uint256_from_be(log.data);
    ev.block_number = log.block_number;
    ev.tx_hash = log.tx_hash;
    ev.log_index = log.log_index;
    return ev;
}

RawLog encode_transfer(TransferEvent const &event, uint64_t tx_index)
{
    RawLog log;
    log.emitter = event.token;
    log.topics = {transfer_signature(), pad_address(event.from),
                  pad_address(event.to)};
    auto word = uint256_to_be(event.amount);
    log.data.assign(word.begin(), word.end());
    log.block_number = event.block_number;
    log.tx_hash = event.tx_hash;
    log.log_index = event.log_index;
    log.tx_index = tx_index;
    return log;
}

uint64_t parse_quantity(nlohmann::json const &j)
{
    if (j.is_number_unsigned()) {
        return j.get<uint64_t>();
    }
    if (j.is_number_integer()) {
        auto v = j.get<int64_t>();
        if (v < 0) {
            throw ParseError("negative quantity");
        }
        return static_cast<uint64_t>(v);
    }
    if (!j.is_string()) {
        throw ParseError("quantity must be a hex string or integer");
    }
    auto const &s = j.get_ref<std::string const &>();
    std::string_view sv = s;
    int base = 10;
    if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X')) {
        sv.remove_prefix(2);
        base = 16;
    }
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v, base);
    if (ec != std::errc{} || ptr != sv.data() + sv.size() || sv.empty()) {
        throw ParseError("invalid quantity '" + s + "'");
    }
    return v;
}

std::string to_quantity(uint64_t v)
{
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
    return "0x" + std::string(buf, ptr);
}

nlohmann::json to_json(RawLog const &log)
{
    nlohmann::json topics = nlohmann::json::array();
    for (auto const &t : log.topics) {
        topics.push_back(t.hex());
    }
    return {
        {"address", log.emitter.hex()},
        {"topics", std::move(topics)},
        {"data", to_hex(log.data)},
        {"blockNumber", to_quantity(log.block_number)},
        {"transactionHash", log.tx_hash.hex()},
        {"transactionIndex", to_quantity(log.tx_index)},
        {"logIndex", to_quantity(log.log_index)},
    };
}

// Key order follows the usual eth_getLogs result layout.
std::string to_jsonl_line(RawLog const &log)
{
    nlohmann::ordered_json j;
    j["address"] = log.emitter.hex();
    auto &topics = j["topics"] = nlohmann::ordered_json::array();
    for (auto const &t : log.topics) {
        topics.push_back(t.hex());
    }
    j["data"] = to_hex(log.data);
    j["blockNumber"] = to_quantity(log.block_number);
    j["transactionHash"] = log.tx_hash.hex();
    j["transactionIndex"] = to_quantity(log.tx_index);
    j["logIndex"] = to_quantity(log.log_index);
    return j.dump();
}

RawLog raw_log_from_json(nlohmann::json const &j)
{
    if (!j.is_object()) {
        throw ParseError("log entry is not an object");
    }
    auto field = [&](char const *name) -> nlohmann::json const & {
        auto it = j.find(name);
        if (it == j.end()) {
            throw ParseError(std::string("missing field '") + name + "'");
        }
        return *it;
    };
    auto str = [&](char const *name) -> std::string const & {
        auto const &v = field(name);
        if (!v.is_string()) {
            throw ParseError(std::string("field '") + name + "' must be a string");
        }
        return v.get_ref<std::string const &>();
    };

    RawLog log;
    log.emitter = Address::parse(str("address"));
    auto const &topics = field("topics");
    if (!topics.is_array() || topics.size() > 4) {
        throw ParseError("'topics' must be an array of at most 4 entries");
    }
    for (auto const &t : topics) {
        if (!t.is_string()) {
            throw ParseError("topic must be a string");
        }
        log.topics.push_back(Hash32::parse(t.get_ref<std::string const &>()));
    }
    auto data = parse_hex(str("data"));
    if (!data) {
        throw ParseError("'data' is not valid hex");
    }
    log.data = std::move(*data);
    log.block_number = parse_quantity(field("blockNumber"));
    log.tx_hash = Hash32::parse(str("transactionHash"));
    log.log_index = parse_quantity(field("logIndex"));
    auto ti = j.find("transactionIndex");
    log.tx_index = ti == j.end() ? 0 : parse_quantity(*ti);
    return log;
}

} // namespace tokengraph
