#pragma once

#include <tokengraph/token_graph.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tokengraph
{

struct DegreeRecord
{
    Address token;
    uint64_t in_degree = 0;
    uint64_t out_degree = 0;

    bool operator==(DegreeRecord const &) const = default;
};

enum class DegreeAxis
{
    in,
    out,
};

enum class ComponentKind
{
    weak,
    strong,
};

// Components are sorted by size (largest first), ties by smallest member
// address; members are sorted. `giant` is therefore 0 for non-empty graphs.
struct ComponentReport
{
    ComponentKind kind = ComponentKind::weak;
    std::vector<std::vector<Address>> components;
    std::size_t giant = 0;
    std::map<std::size_t, std::size_t> size_histogram;

    // Component index of every vertex.
    std::map<Address, std::size_t> membership() const;
};

struct StrongComponentReport
{
    ComponentReport report;
    std::vector<std::vector<Address>> nontrivial; // size >= 2
    std::vector<Address> loops;
};

struct PathReport
{
    std::vector<Address> vertices;

    std::size_t length() const { return vertices.size(); }
};

class CyclicGraphError : public std::runtime_error
{
public:
    explicit CyclicGraphError(std::vector<Address> scc);
    // Members of one strongly connected component that is a cycle (a single
    // member means a loop).
    std::vector<Address> scc;
};

// Edges sorted by meta-event count, descending; ties by (source, target).
std::vector<std::pair<EdgeKey, EdgeEvidence>>
top_edges(TokenGraph const &graph, std::size_t k);

// One record per vertex, address order. A loop adds one to both degrees.
std::vector<DegreeRecord> degree_table(TokenGraph const &graph);

struct DegreeHistograms
{
    std::map<uint64_t, uint64_t> in; // degree -> vertex count
    std::map<uint64_t, uint64_t> out;
};

DegreeHistograms degree_histograms(TokenGraph const &graph);

std::vector<DegreeRecord>
top_by_degree(TokenGraph const &graph, DegreeAxis axis, std::size_t k);

ComponentReport weak_components(TokenGraph const &graph);
StrongComponentReport strong_components(TokenGraph const &graph);

struct Condensation
{
    // Acyclic graph over SCC representatives (smallest member address).
    // Representatives left without edges are absent here, as in any
    // TokenGraph, but listed in `representatives`.
    TokenGraph graph;
    std::vector<Address> representatives;
    std::map<Address, std::vector<Address>> members;
};

Condensation condensation(TokenGraph const &graph);

// Longest directed path by vertex count; among equally long paths the
// lexicographically smallest address sequence. Throws CyclicGraphError.
PathReport longest_path(TokenGraph const &graph);

// Same over the condensation, counting each SCC as one vertex (its
// representative) and including edgeless SCCs as paths of length 1.
PathReport longest_path(Condensation const &condensed);

struct ScatterPoint
{
    uint64_t in_degree = 0;
    uint64_t out_degree = 0;
    Address token;
};

std::vector<ScatterPoint> in_out_scatter(TokenGraph const &graph);

// CSV emitters for external plotting.
std::string degree_hist_csv(std::map<uint64_t, uint64_t> const &hist);
std::string scatter_csv(std::vector<ScatterPoint> const &points);
std::string components_csv(ComponentReport const &report);

} // namespace tokengraph
