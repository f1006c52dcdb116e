#pragma once

#include <tokengraph/evm_log.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tokengraph
{

struct BlockRange
{
    uint64_t start{0};
    uint64_t end{0}; // inclusive

    BlockRange() = default;
    BlockRange(uint64_t s, uint64_t e);

    uint64_t size() const { return end - start + 1; }
    bool operator==(BlockRange const &) const = default;
};

// The provider refused the window because the result would be too large.
class ResponseTooLargeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A single block still exceeded the provider's response limit.
class OversizedBlockError : public std::runtime_error
{
public:
    explicit OversizedBlockError(uint64_t block);
    uint64_t block;
};

// One eth_getLogs call. Implementations throw ResponseTooLargeError or
// TransportError; anything returned must lie inside `range`.
class LogProvider
{
public:
    virtual ~LogProvider() = default;
    virtual std::vector<RawLog>
    get_logs(BlockRange const &range, Hash32 const &topic0) = 0;
};

// JSON-RPC over HTTP(S) via eth_getLogs.
class RpcLogProvider final : public LogProvider
{
public:
    explicit RpcLogProvider(
        std::string url,
        std::chrono::milliseconds timeout = std::chrono::seconds(60));

    std::vector<RawLog>
    get_logs(BlockRange const &range, Hash32 const &topic0) override;

    static nlohmann::json
    make_request(BlockRange const &range, Hash32 const &topic0, uint64_t id);

    // Maps a JSON-RPC response body to logs or the matching exception.
    static std::vector<RawLog> parse_response(std::string const &body);

private:
    std::string scheme_host_port_;
    std::string path_;
    std::chrono::milliseconds timeout_;
    uint64_t next_id_ = 1;
};

// Serves recorded responses. Stub file layout:
//   {
//     "max_window": 4,                       optional window limit
//     "windows": [{"fromBlock": 0, "toBlock": 9, "result": [...]},
//                 {"fromBlock": 3, "toBlock": 3, "error": "too_large"}],
//     "logs": [...]                          optional pool sliced by range
//   }
// An exact window match wins; otherwise the pool is filtered by range.
class StubLogProvider final : public LogProvider
{
public:
    StubLogProvider() = default;
    explicit StubLogProvider(std::vector<RawLog> pool,
                             std::optional<uint64_t> max_window = std::nullopt);

    static StubLogProvider from_json(nlohmann::json const &j);
    static StubLogProvider load(std::string const &path);

    // Fail the next `n` calls with a TransportError.
    void fail_next(int n) { transient_failures_ = n; }
    // Always report this block as too large, even as a single-block window.
    void mark_oversized(uint64_t block) { oversized_.push_back(block); }

    std::vector<RawLog>
    get_logs(BlockRange const &range, Hash32 const &topic0) override;

    uint64_t calls() const { return calls_; }

private:
    struct Window
    {
        BlockRange range;
        std::optional<std::vector<RawLog>> result;
    };

    std::vector<RawLog> pool_;
    std::vector<Window> windows_;
    std::optional<uint64_t> max_window_;
    std::vector<uint64_t> oversized_;
    int transient_failures_ = 0;
    uint64_t calls_ = 0;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

struct FetchOptions
{
    uint64_t chunk_size = 2000;
    int max_retries = 5;
    std::chrono::milliseconds backoff_base{200};
    unsigned concurrency = 4;
    bool skip_oversized = false;
};

struct FetchStats
{
    uint64_t requests = 0;
    uint64_t halvings = 0;
    uint64_t retries = 0;
    std::vector<uint64_t> skipped_blocks;
};

using RawLogSink = std::function<void(RawLog const &)>;

// Streams every Transfer log in `range` to `sink` in (block, log_index)
// order. Chunks are fetched up to `concurrency` at a time, halved on
// ResponseTooLargeError and retried with exponential backoff on
// TransportError.
FetchStats fetch_logs(
    LogProvider &provider, BlockRange const &range, RawLogSink const &sink,
    FetchOptions const &options = {},
    Hash32 const &topic0 = transfer_signature());

std::vector<RawLog> fetch_all_logs(
    LogProvider &provider, BlockRange const &range,
    FetchOptions const &options = {});

// Line-by-line JSONL reader.
class LogReader
{
public:
    explicit LogReader(std::string const &path, bool strict = false);
    explicit LogReader(std::unique_ptr<std::istream> in, bool strict = false);

    std::optional<RawLog> next();

    uint64_t malformed() const { return malformed_; }
    uint64_t line_number() const { return line_no_; }

private:
    std::unique_ptr<std::istream> in_;
    bool strict_;
    uint64_t malformed_ = 0;
    uint64_t line_no_ = 0;
};

struct ReadResult
{
    std::vector<RawLog> logs;
    uint64_t malformed = 0;
};

ReadResult read_logs(std::string const &path, bool strict = false);

struct TxBatch
{
    Hash32 tx_hash;
    uint64_t block_number{0};
    std::vector<TransferEvent> events;
};

class OrderingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct GroupStats
{
    uint64_t logs = 0;
    uint64_t transfers = 0;
    uint64_t dirty_padding = 0;
};

// Streaming tx grouper. A batch closes when the tx hash changes; input must
// be ordered by (block_number, log_index).
class TxGrouper
{
public:
    explicit TxGrouper(DecodeOptions decode = {});

    // Returns the previous batch when `log` starts a new transaction.
    std::optional<TxBatch> push(RawLog const &log);
    std::optional<TxBatch> finish();

    GroupStats const &stats() const { return stats_; }

private:
    DecodeOptions decode_;
    DecodeCounters counters_;
    GroupStats stats_;
    std::optional<TxBatch> current_;
    std::optional<std::pair<uint64_t, uint64_t>> last_position_;
};

std::vector<TxBatch>
group_by_tx(std::vector<RawLog> const &logs, DecodeOptions decode = {});

} // namespace tokengraph
