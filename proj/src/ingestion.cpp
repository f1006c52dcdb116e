#include <tokengraph/ingestion.hpp>

#include <algorithm>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace tokengraph
{

BlockRange::BlockRange(uint64_t s, uint64_t e)
    : start(s)
    , end(e)
{
    if (s > e) {
        throw std::invalid_argument(
            "block range start " + std::to_string(s) + " > end " +
            std::to_string(e));
    }
}

OversizedBlockError::OversizedBlockError(uint64_t b)
    : std::runtime_error(
          "block " + std::to_string(b) +
          " exceeds the provider response limit on its own")
    , block(b)
{
}

// --- RPC provider -----------------------------------------------------------

RpcLogProvider::RpcLogProvider(std::string url, std::chrono::milliseconds timeout)
    : timeout_(timeout)
{
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("rpc url must include a scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = url;
        path_ = "/";
    }
    else {
        scheme_host_port_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
}

nlohmann::json RpcLogProvider::make_request(
    BlockRange const &range, Hash32 const &topic0, uint64_t id)
{
    return {
        {"jsonrpc", "2.0"},
        {"id", id},
        {"method", "eth_getLogs"},
        {"params",
         nlohmann::json::array(
             {{{"fromBlock", to_quantity(range.start)},
               {"toBlock", to_quantity(range.end)},
               {"topics", nlohmann::json::array({topic0.hex()})}}})},
    };
}

namespace
{
    // Providers word this differently; these cover geth, erigon and the
    // common hosted endpoints.
    bool looks_too_large(int code, std::string const &message)
    {
        if (code == -32005) {
            return true;
        }
        std::string m = message;
        std::transform(m.begin(), m.end(), m.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        for (char const *needle :
             {"too large", "too many", "more than", "limit exceeded",
              "response size", "query returned", "block range"}) {
            if (m.find(needle) != std::string::npos) {
                return true;
            }
        }
        return false;
    }
}

std::vector<RawLog> RpcLogProvider::parse_response(std::string const &body)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    }
    catch (nlohmann::json::exception const &e) {
        throw TransportError(std::string("invalid JSON-RPC response: ") + e.what());
    }
    if (auto err = j.find("error"); err != j.end() && !err->is_null()) {
        int code = err->value("code", 0);
        std::string message = err->value("message", std::string{});
        if (looks_too_large(code, message)) {
            throw ResponseTooLargeError(message);
        }
        throw TransportError(
            "rpc error " + std::to_string(code) + ": " + message);
    }
    auto result = j.find("result");
    if (result == j.end() || !result->is_array()) {
        throw TransportError("JSON-RPC response has no result array");
    }
    std::vector<RawLog> logs;
    logs.reserve(result->size());
    for (auto const &entry : *result) {
        try {
            logs.push_back(raw_log_from_json(entry));
        }
        catch (ParseError const &e) {
            throw TransportError(std::string("bad log in response: ") + e.what());
        }
    }
    return logs;
}

std::vector<RawLog>
RpcLogProvider::get_logs(BlockRange const &range, Hash32 const &topic0)
{
    httplib::Client client(scheme_host_port_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_read_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    client.set_connection_timeout(10, 0);

    auto body = make_request(range, topic0, next_id_++).dump();
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
        throw TransportError(
            "request to " + scheme_host_port_ + " failed: " +
            httplib::to_string(res.error()));
    }
    if (res->status == 413) {
        throw ResponseTooLargeError("HTTP 413");
    }
    if (res->status != 200) {
        // Some providers return the JSON-RPC error with a non-200 status.
        if (!res->body.empty() && res->body.front() == '{') {
            parse_response(res->body);
        }
        throw TransportError("HTTP status " + std::to_string(res->status));
    }
    return parse_response(res->body);
}

// --- stub provider ----------------------------------------------------------

StubLogProvider::StubLogProvider(
    std::vector<RawLog> pool, std::optional<uint64_t> max_window)
    : pool_(std::move(pool))
    , max_window_(max_window)
{
}

StubLogProvider StubLogProvider::from_json(nlohmann::json const &j)
{
    StubLogProvider stub;
    if (auto it = j.find("max_window"); it != j.end() && !it->is_null()) {
        stub.max_window_ = it->get<uint64_t>();
    }
    if (auto it = j.find("logs"); it != j.end()) {
        for (auto const &entry : *it) {
            stub.pool_.push_back(raw_log_from_json(entry));
        }
    }
    if (auto it = j.find("windows"); it != j.end()) {
        for (auto const &w : *it) {
            Window window{
                BlockRange(parse_quantity(w.at("fromBlock")),
                           parse_quantity(w.at("toBlock"))),
                std::nullopt};
            if (auto r = w.find("result"); r != w.end()) {
                std::vector<RawLog> logs;
                for (auto const &entry : *r) {
                    logs.push_back(raw_log_from_json(entry));
                }
                window.result = std::move(logs);
            }
            stub.windows_.push_back(std::move(window));
        }
    }
    return stub;
}

StubLogProvider StubLogProvider::load(std::string const &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open stub file " + path);
    }
    return from_json(nlohmann::json::parse(in));
}

std::vector<RawLog>
StubLogProvider::get_logs(BlockRange const &range, Hash32 const &topic0)
{
    std::lock_guard lock(*mutex_);
    ++calls_;
    if (transient_failures_ > 0) {
        --transient_failures_;
        throw TransportError("stub: injected transport failure");
    }
    for (auto const &w : windows_) {
        if (w.range == range) {
            if (!w.result) {
                throw ResponseTooLargeError("stub: recorded too-large error");
            }
            return *w.result;
        }
    }
    if (max_window_ && range.size() > *max_window_) {
        throw ResponseTooLargeError(
            "stub: query returned more than allowed for window of " +
            std::to_string(range.size()) + " blocks");
    }
    for (auto b : oversized_) {
        if (b >= range.start && b <= range.end) {
            throw ResponseTooLargeError("stub: block too large");
        }
    }
    std::vector<RawLog> out;
    for (auto const &log : pool_) {
        if (log.block_number >= range.start && log.block_number <= range.end &&
            !log.topics.empty() && log.topics[0] == topic0) {
            out.push_back(log);
        }
    }
    return out;
}

// --- chunked fetch ----------------------------------------------------------

namespace
{
    struct ChunkResult
    {
        std::vector<RawLog> logs;
        FetchStats stats;
    };

    std::vector<RawLog> call_with_retry(
        LogProvider &provider, BlockRange const &range, Hash32 const &topic0,
        FetchOptions const &options, FetchStats &stats)
    {
        for (int attempt = 0;; ++attempt) {
            ++stats.requests;
            try {
                return provider.get_logs(range, topic0);
            }
            catch (TransportError const &) {
                if (attempt >= options.max_retries) {
                    throw;
                }
                ++stats.retries;
                std::this_thread::sleep_for(options.backoff_base * (1 << attempt));
            }
        }
    }

    void fetch_window(
        LogProvider &provider, BlockRange const &range, Hash32 const &topic0,
        FetchOptions const &options, ChunkResult &out)
    {
        std::vector<RawLog> logs;
        try {
            logs = call_with_retry(provider, range, topic0, options, out.stats);
        }
        catch (ResponseTooLargeError const &) {
            if (range.size() == 1) {
                if (!options.skip_oversized) {
                    throw OversizedBlockError(range.start);
                }
                out.stats.skipped_blocks.push_back(range.start);
                return;
            }
            ++out.stats.halvings;
            uint64_t mid = range.start + (range.size() / 2) - 1;
            fetch_window(provider, {range.start, mid}, topic0, options, out);
            fetch_window(provider, {mid + 1, range.end}, topic0, options, out);
            return;
        }
        for (auto &log : logs) {
            if (log.block_number < range.start || log.block_number > range.end) {
                throw TransportError(
                    "provider returned block " + std::to_string(log.block_number) +
                    " outside the requested window");
            }
        }
        std::stable_sort(logs.begin(), logs.end(), [](auto const &a, auto const &b) {
            return std::tie(a.block_number, a.log_index) <
                   std::tie(b.block_number, b.log_index);
        });
        out.logs.insert(
            out.logs.end(), std::make_move_iterator(logs.begin()),
            std::make_move_iterator(logs.end()));
    }

    void merge_stats(FetchStats &into, FetchStats const &from)
    {
        into.requests += from.requests;
        into.halvings += from.halvings;
        into.retries += from.retries;
        into.skipped_blocks.insert(
            into.skipped_blocks.end(), from.skipped_blocks.begin(),
            from.skipped_blocks.end());
    }
}

FetchStats fetch_logs(
    LogProvider &provider, BlockRange const &range, RawLogSink const &sink,
    FetchOptions const &options, Hash32 const &topic0)
{
    if (options.chunk_size == 0) {
        throw std::invalid_argument("chunk size must be positive");
    }
    std::vector<BlockRange> chunks;
    for (uint64_t s = range.start;; ) {
        uint64_t e = range.end - s + 1 > options.chunk_size
                         ? s + options.chunk_size - 1
                         : range.end;
        chunks.emplace_back(s, e);
        if (e == range.end) {
            break;
        }
        s = e + 1;
    }

    FetchStats stats;
    unsigned const width = std::max(1u, options.concurrency);
    // Chunks are fetched in waves and drained in order, so the sink sees one
    // globally ordered stream.
    for (std::size_t first = 0; first < chunks.size(); first += width) {
        std::size_t last = std::min(chunks.size(), first + width);
        std::vector<std::future<ChunkResult>> wave;
        for (std::size_t i = first; i < last; ++i) {
            wave.push_back(std::async(
                width == 1 ? std::launch::deferred : std::launch::async,
                [&, chunk = chunks[i]] {
                    ChunkResult r;
                    fetch_window(provider, chunk, topic0, options, r);
                    return r;
                }));
        }
        for (auto &f : wave) {
            auto r = f.get();
            merge_stats(stats, r.stats);
            for (auto const &log : r.logs) {
                sink(log);
            }
        }
    }
    return stats;
}

std::vector<RawLog> fetch_all_logs(
    LogProvider &provider, BlockRange const &range, FetchOptions const &options)
{
    std::vector<RawLog> out;
    fetch_logs(provider, range, [&](RawLog const &log) { out.push_back(log); },
               options);
    return out;
}

// --- JSONL reader -----------------------------------------------------------

LogReader::LogReader(std::string const &path, bool strict)
    : strict_(strict)
{
    auto f = std::make_unique<std::ifstream>(path);
    if (!*f) {
        throw std::runtime_error("cannot open log file " + path);
    }
    in_ = std::move(f);
}

LogReader::LogReader(std::unique_ptr<std::istream> in, bool strict)
    : in_(std::move(in))
    , strict_(strict)
{
}

std::optional<RawLog> LogReader::next()
{
    std::string line;
    while (std::getline(*in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        try {
            return raw_log_from_json(nlohmann::json::parse(line));
        }
        catch (std::exception const &e) {
            if (strict_) {
                throw ParseError(
                    "line " + std::to_string(line_no_) + ": " + e.what());
            }
            ++malformed_;
        }
    }
    return std::nullopt;
}

ReadResult read_logs(std::string const &path, bool strict)
{
    LogReader reader(path, strict);
    ReadResult out;
    while (auto log = reader.next()) {
        out.logs.push_back(std::move(*log));
    }
    out.malformed = reader.malformed();
    return out;
}

// --- grouping ---------------------------------------------------------------

TxGrouper::TxGrouper(DecodeOptions decode)
    : decode_(decode)
{
}

std::optional<TxBatch> TxGrouper::push(RawLog const &log)
{
    std::pair<uint64_t, uint64_t> pos{log.block_number, log.log_index};
    if (last_position_ && pos <= *last_position_) {
        throw OrderingError(
            "log stream regressed to block " + std::to_string(pos.first) +
            " log " + std::to_string(pos.second));
    }
    last_position_ = pos;
    ++stats_.logs;

    std::optional<TxBatch> closed;
    if (current_ && current_->tx_hash != log.tx_hash) {
        closed = finish();
    }
    if (!current_) {
        current_ = TxBatch{log.tx_hash, log.block_number, {}};
    }
    if (auto ev = decode_transfer(log, decode_, &counters_)) {
        ++stats_.transfers;
        current_->events.push_back(*ev);
    }
    stats_.dirty_padding = counters_.dirty_padding;
    return closed;
}

std::optional<TxBatch> TxGrouper::finish()
{
    std::optional<TxBatch> out;
    if (current_ && !current_->events.empty()) {
        out = std::move(current_);
    }
    current_.reset();
    return out;
}

std::vector<TxBatch> group_by_tx(std::vector<RawLog> const &logs, DecodeOptions decode)
{
    TxGrouper grouper(decode);
    std::vector<TxBatch> out;
    for (auto const &log : logs) {
        if (auto b = grouper.push(log)) {
            out.push_back(std::move(*b));
        }
    }
    if (auto b = grouper.finish()) {
        out.push_back(std::move(*b));
    }
    return out;
}

} // namespace tokengraph
