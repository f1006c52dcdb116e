#pragma once

#include <tokengraph/analytics.hpp>
#include <tokengraph/graph_io.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace tokengraph
{

// Point-in-time market data for one token. An absent market cap means the
// token was not listed, which is different from a listed cap of zero.
struct TokenMetadata
{
    Address token;
    std::optional<std::string> symbol;
    std::optional<double> market_cap_usd;
    uint64_t pool_count = 0;
    std::string snapshot_date; // YYYY-MM-DD

    bool has_market_cap() const { return market_cap_usd && *market_cap_usd > 0; }
    bool pooled() const { return pool_count > 0; }
};

using MetadataMap = std::map<Address, TokenMetadata>;

struct Snapshot
{
    MetadataMap tokens;
    uint64_t duplicate_rows = 0;
};

inline constexpr std::string_view snapshot_csv_header =
    "token_address,symbol,market_cap_usd,pool_count,snapshot_date";

// Later duplicate rows override earlier ones and bump duplicate_rows.
Snapshot read_snapshot(std::istream &in);
Snapshot load_snapshot(std::string const &path);
std::string snapshot_csv(MetadataMap const &tokens);

LabelMap labels_from(MetadataMap const &metadata);

// {"listed": false} or the full record with "listed": true.
nlohmann::ordered_json metadata_json(TokenMetadata const *m);

// Read-only view joining metadata onto the vertices of a graph.
class AnnotatedGraph
{
public:
    AnnotatedGraph(TokenGraph const &graph, MetadataMap const &metadata);

    TokenGraph const &graph() const { return *graph_; }
    // nullptr for unlisted vertices.
    TokenMetadata const *metadata(Address const &v) const;
    bool listed(Address const &v) const { return metadata(v) != nullptr; }
    std::size_t listed_count() const { return listed_; }
    LabelMap labels() const;

    nlohmann::ordered_json to_json() const;

private:
    TokenGraph const *graph_;
    std::map<Address, TokenMetadata const *> joined_;
    std::size_t listed_ = 0;
};

AnnotatedGraph annotate(TokenGraph const &graph, MetadataMap const &metadata);

struct ComponentPopularity
{
    std::size_t component_id = 0;
    std::size_t size = 0;
    std::size_t listed_count = 0; // market cap > 0
    std::size_t pooled_count = 0; // pool count > 0

    bool operator==(ComponentPopularity const &) const = default;
};

std::vector<ComponentPopularity>
popularity_report(ComponentReport const &components, MetadataMap const &metadata);

std::string popularity_csv(std::vector<ComponentPopularity> const &rows);

} // namespace tokengraph
