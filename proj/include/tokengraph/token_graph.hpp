#pragma once

#include <tokengraph/meta_events.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tokengraph
{

enum class GraphMode
{
    unfiltered,
    filtered,
};

std::string_view to_string(GraphMode mode);
GraphMode parse_graph_mode(std::string_view text);

struct TxRef
{
    uint64_t block_number{0};
    Hash32 tx_hash;

    auto operator<=>(TxRef const &) const = default;
};

struct EdgeEvidence
{
    static constexpr std::size_t default_sample_cap = 16;

    uint64_t deposit_mint_count = 0;
    uint64_t withdraw_burn_count = 0;
    Uint256 total_source_amount;
    Uint256 total_target_amount;
    // Distinct transactions, earliest first, at most default_sample_cap.
    std::vector<TxRef> sample_txs;
    uint64_t first_block = 0;
    uint64_t last_block = 0;

    uint64_t meta_event_count() const
    {
        return deposit_mint_count + withdraw_burn_count;
    }
    bool two_way() const
    {
        return deposit_mint_count > 0 && withdraw_burn_count > 0;
    }

    void add(TokenisingMetaEvent const &event);
    void merge(EdgeEvidence const &other);

    bool operator==(EdgeEvidence const &) const = default;
};

struct EdgeKey
{
    Address source; // asset
    Address target; // share

    auto operator<=>(EdgeKey const &) const = default;
};

class UnknownVertexError : public std::runtime_error
{
public:
    explicit UnknownVertexError(Address const &a);
    Address vertex;
};

// Aggregated directed graph: one edge per (asset, share) pair, loops allowed.
// Every stored vertex is incident to at least one edge.
class TokenGraph
{
public:
    using EdgeMap = std::map<EdgeKey, EdgeEvidence>;

    TokenGraph() = default;
    explicit TokenGraph(GraphMode mode)
        : mode_(mode)
    {
    }

    GraphMode mode() const { return mode_; }
    std::set<Address> const &vertices() const { return vertices_; }
    EdgeMap const &edges() const { return edges_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool contains(Address const &v) const { return vertices_.contains(v); }
    EdgeEvidence const *find_edge(Address const &s, Address const &t) const;

    // Merges into an existing edge. Rejects evidence that would break the
    // filtered-mode invariant.
    void add_edge(Address const &source, Address const &target,
                  EdgeEvidence const &evidence);

    // Convenience for tests and fixtures: one deposit & mint and one
    // withdraw & burn of evidence per edge.
    static TokenGraph from_edge_list(
        std::vector<std::pair<Address, Address>> const &edges,
        GraphMode mode = GraphMode::unfiltered);

    bool operator==(TokenGraph const &) const = default;

private:
    GraphMode mode_ = GraphMode::unfiltered;
    std::set<Address> vertices_;
    EdgeMap edges_;
};

// Single pass over the meta-event stream. The filtered graph keeps exactly
// the edges whose evidence holds both actions, which is the graph obtained by
// building from apply_two_way_filter(events).
class TokenGraphBuilder
{
public:
    void add(TokenisingMetaEvent const &event);
    TokenGraph build(GraphMode mode) const;

    uint64_t events_seen() const { return events_; }

private:
    std::map<EdgeKey, EdgeEvidence> edges_;
    uint64_t events_ = 0;
};

TokenGraph build(std::vector<TokenisingMetaEvent> const &events, GraphMode mode);

// Induced subgraph; every requested vertex must exist. Vertices left without
// any edge inside the subgraph are dropped.
TokenGraph subgraph(TokenGraph const &graph, std::set<Address> const &vertices);

} // namespace tokengraph
