#include <tokengraph/analytics.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace tokengraph
{

namespace
{
    // Dense index over a TokenGraph; vertex i is the i-th smallest address.
    struct IndexedGraph
    {
        std::vector<Address> vertices;
        std::vector<std::vector<uint32_t>> out;
        std::vector<std::pair<uint32_t, uint32_t>> edges;

        explicit IndexedGraph(TokenGraph const &g)
            : vertices(g.vertices().begin(), g.vertices().end())
            , out(vertices.size())
        {
            edges.reserve(g.edge_count());
            for (auto const &[key, ev] : g.edges()) {
                auto s = index_of(key.source);
                auto t = index_of(key.target);
                out[s].push_back(t);
                edges.emplace_back(s, t);
            }
        }

        uint32_t index_of(Address const &a) const
        {
            auto it = std::lower_bound(vertices.begin(), vertices.end(), a);
            return static_cast<uint32_t>(it - vertices.begin());
        }
    };

    class UnionFind
    {
    public:
        explicit UnionFind(std::size_t n)
            : parent_(n)
            , rank_(n, 0)
        {
            std::iota(parent_.begin(), parent_.end(), 0u);
        }

        uint32_t find(uint32_t x)
        {
            while (parent_[x] != x) {
                parent_[x] = parent_[parent_[x]];
                x = parent_[x];
            }
            return x;
        }

        void unite(uint32_t a, uint32_t b)
        {
            a = find(a);
            b = find(b);
            if (a == b) {
                return;
            }
            if (rank_[a] < rank_[b]) {
                std::swap(a, b);
            }
            parent_[b] = a;
            if (rank_[a] == rank_[b]) {
                ++rank_[a];
            }
        }

    private:
        std::vector<uint32_t> parent_;
        std::vector<uint8_t> rank_;
    };

    ComponentReport make_report(
        ComponentKind kind, std::vector<Address> const &vertices,
        std::vector<uint32_t> const &component_of, std::size_t count)
    {
        ComponentReport r;
        r.kind = kind;
        r.components.resize(count);
        // vertices are sorted, so members come out sorted
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            r.components[component_of[v]].push_back(vertices[v]);
        }
        std::sort(
            r.components.begin(), r.components.end(),
            [](auto const &a, auto const &b) {
                if (a.size() != b.size()) {
                    return a.size() > b.size();
                }
                return a.front() < b.front();
            });
        for (auto const &c : r.components) {
            ++r.size_histogram[c.size()];
        }
        r.giant = 0;
        return r;
    }

    // Iterative Tarjan. Returns the component id of each vertex; ids are in
    // reverse topological order of the condensation.
    std::size_t tarjan(IndexedGraph const &g, std::vector<uint32_t> &component_of)
    {
        constexpr uint32_t unvisited = static_cast<uint32_t>(-1);
        std::size_t const n = g.vertices.size();
        std::vector<uint32_t> index(n, unvisited);
        std::vector<uint32_t> low(n, 0);
        std::vector<bool> on_stack(n, false);
        std::vector<uint32_t> stack;
        component_of.assign(n, unvisited);
        uint32_t next_index = 0;
        std::size_t components = 0;

        struct Frame
        {
            uint32_t v;
            std::size_t edge;
        };
        std::vector<Frame> call;

        for (uint32_t root = 0; root < n; ++root) {
            if (index[root] != unvisited) {
                continue;
            }
            call.push_back({root, 0});
            index[root] = low[root] = next_index++;
            stack.push_back(root);
            on_stack[root] = true;

            while (!call.empty()) {
                auto &frame = call.back();
                uint32_t v = frame.v;
                if (frame.edge < g.out[v].size()) {
                    uint32_t w = g.out[v][frame.edge++];
                    if (index[w] == unvisited) {
                        index[w] = low[w] = next_index++;
                        stack.push_back(w);
                        on_stack[w] = true;
                        call.push_back({w, 0});
                    }
                    else if (on_stack[w]) {
                        low[v] = std::min(low[v], index[w]);
                    }
                    continue;
                }
                if (low[v] == index[v]) {
                    uint32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        component_of[w] = static_cast<uint32_t>(components);
                    } while (w != v);
                    ++components;
                }
                call.pop_back();
                if (!call.empty()) {
                    uint32_t parent = call.back().v;
                    low[parent] = std::min(low[parent], low[v]);
                }
            }
        }
        return components;
    }

    // Longest path DP over a DAG given in dense form. `vertices` sorted.
    PathReport longest_path_dag(
        std::vector<Address> const &vertices,
        std::vector<std::vector<uint32_t>> const &out)
    {
        std::size_t const n = vertices.size();
        // Kahn topological order
        std::vector<uint32_t> indegree(n, 0);
        for (auto const &succ : out) {
            for (auto w : succ) {
                ++indegree[w];
            }
        }
        std::vector<uint32_t> order;
        order.reserve(n);
        for (uint32_t v = 0; v < n; ++v) {
            if (indegree[v] == 0) {
                order.push_back(v);
            }
        }
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (auto w : out[order[i]]) {
                if (--indegree[w] == 0) {
                    order.push_back(w);
                }
            }
        }
        if (order.size() != n) {
            throw std::logic_error("longest_path_dag called on a cyclic graph");
        }

        // best[v]: vertices on the best path starting at v. Successors are
        // compared by (length desc, address asc): two candidate paths of equal
        // length differ in their first vertex, so the smaller successor gives
        // the lexicographically smaller sequence.
        constexpr uint32_t none = static_cast<uint32_t>(-1);
        std::vector<uint32_t> best(n, 1);
        std::vector<uint32_t> next(n, none);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            uint32_t v = *it;
            for (auto w : out[v]) {
                if (best[w] + 1 > best[v] ||
                    (best[w] + 1 == best[v] && next[v] != none && w < next[v])) {
                    best[v] = best[w] + 1;
                    next[v] = w;
                }
            }
        }
        PathReport report;
        if (n == 0) {
            return report;
        }
        uint32_t start = 0;
        for (uint32_t v = 1; v < n; ++v) {
            if (best[v] > best[start]) {
                start = v;
            }
        }
        for (uint32_t v = start; v != none; v = next[v]) {
            report.vertices.push_back(vertices[v]);
        }
        return report;
    }
}

std::map<Address, std::size_t> ComponentReport::membership() const
{
    std::map<Address, std::size_t> out;
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (auto const &v : components[i]) {
            out.emplace(v, i);
        }
    }
    return out;
}

CyclicGraphError::CyclicGraphError(std::vector<Address> members)
    : std::runtime_error(
          members.size() == 1
              ? "graph has a loop at " + members.front().hex()
              : "graph has a directed cycle through " +
                    std::to_string(members.size()) + " vertices including " +
                    members.front().hex())
    , scc(std::move(members))
{
}

std::vector<std::pair<EdgeKey, EdgeEvidence>>
top_edges(TokenGraph const &graph, std::size_t k)
{
    std::vector<std::pair<EdgeKey, EdgeEvidence>> all(
        graph.edges().begin(), graph.edges().end());
    auto cmp = [](auto const &a, auto const &b) {
        auto ca = a.second.meta_event_count();
        auto cb = b.second.meta_event_count();
        if (ca != cb) {
            return ca > cb;
        }
        return a.first < b.first;
    };
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                      all.end(), cmp);
    all.resize(k);
    return all;
}

std::vector<DegreeRecord> degree_table(TokenGraph const &graph)
{
    std::map<Address, DegreeRecord> records;
    for (auto const &v : graph.vertices()) {
        records[v].token = v;
    }
    for (auto const &[key, ev] : graph.edges()) {
        ++records[key.source].out_degree;
        ++records[key.target].in_degree;
    }
    std::vector<DegreeRecord> out;
    out.reserve(records.size());
    for (auto &[a, r] : records) {
        out.push_back(r);
    }
    return out;
}

DegreeHistograms degree_histograms(TokenGraph const &graph)
{
    DegreeHistograms h;
    for (auto const &r : degree_table(graph)) {
        ++h.in[r.in_degree];
        ++h.out[r.out_degree];
    }
    return h;
}

std::vector<DegreeRecord>
top_by_degree(TokenGraph const &graph, DegreeAxis axis, std::size_t k)
{
    auto table = degree_table(graph);
    auto degree = [axis](DegreeRecord const &r) {
        return axis == DegreeAxis::in ? r.in_degree : r.out_degree;
    };
    k = std::min(k, table.size());
    std::partial_sort(
        table.begin(), table.begin() + static_cast<std::ptrdiff_t>(k), table.end(),
        [&](auto const &a, auto const &b) {
            if (degree(a) != degree(b)) {
                return degree(a) > degree(b);
            }
            return a.token < b.token;
        });
    table.resize(k);
    return table;
}

ComponentReport weak_components(TokenGraph const &graph)
{
    IndexedGraph g(graph);
    UnionFind uf(g.vertices.size());
    for (auto const &[s, t] : g.edges) {
        uf.unite(s, t);
    }
    std::vector<uint32_t> root_id(g.vertices.size(), static_cast<uint32_t>(-1));
    std::vector<uint32_t> component_of(g.vertices.size());
    std::size_t count = 0;
    for (uint32_t v = 0; v < g.vertices.size(); ++v) {
        auto r = uf.find(v);
        if (root_id[r] == static_cast<uint32_t>(-1)) {
            root_id[r] = static_cast<uint32_t>(count++);
        }
        component_of[v] = root_id[r];
    }
    return make_report(ComponentKind::weak, g.vertices, component_of, count);
}

StrongComponentReport strong_components(TokenGraph const &graph)
{
    IndexedGraph g(graph);
    std::vector<uint32_t> component_of;
    auto count = tarjan(g, component_of);
    StrongComponentReport out;
    out.report = make_report(ComponentKind::strong, g.vertices, component_of, count);
    for (auto const &c : out.report.components) {
        if (c.size() >= 2) {
            out.nontrivial.push_back(c);
        }
    }
    for (auto const &[s, t] : g.edges) {
        if (s == t) {
            out.loops.push_back(g.vertices[s]);
        }
    }
    return out;
}

Condensation condensation(TokenGraph const &graph)
{
    IndexedGraph g(graph);
    std::vector<uint32_t> component_of;
    auto count = tarjan(g, component_of);

    std::vector<Address> rep(count);
    std::vector<bool> seen(count, false);
    Condensation out;
    // Vertices are visited in address order, so the first member seen is the
    // smallest.
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        auto c = component_of[v];
        if (!seen[c]) {
            seen[c] = true;
            rep[c] = g.vertices[v];
        }
        out.members[rep[c]].push_back(g.vertices[v]);
    }
    out.representatives.assign(rep.begin(), rep.end());
    std::sort(out.representatives.begin(), out.representatives.end());

    out.graph = TokenGraph(graph.mode());
    for (auto const &[key, ev] : graph.edges()) {
        auto cs = component_of[g.index_of(key.source)];
        auto ct = component_of[g.index_of(key.target)];
        if (cs != ct) {
            out.graph.add_edge(rep[cs], rep[ct], ev);
        }
    }
    return out;
}

PathReport longest_path(TokenGraph const &graph)
{
    IndexedGraph g(graph);
    std::vector<uint32_t> component_of;
    auto count = tarjan(g, component_of);
    for (auto const &[s, t] : g.edges) {
        if (s == t) {
            throw CyclicGraphError({g.vertices[s]});
        }
    }
    if (count != g.vertices.size()) {
        std::vector<std::size_t> sizes(count, 0);
        for (auto c : component_of) {
            ++sizes[c];
        }
        std::vector<Address> members;
        for (std::size_t v = 0; v < g.vertices.size(); ++v) {
            if (sizes[component_of[v]] > 1) {
                // first cyclic SCC by smallest member
                auto c = component_of[v];
                for (std::size_t w = v; w < g.vertices.size(); ++w) {
                    if (component_of[w] == c) {
                        members.push_back(g.vertices[w]);
                    }
                }
                break;
            }
        }
        throw CyclicGraphError(std::move(members));
    }
    return longest_path_dag(g.vertices, g.out);
}

PathReport longest_path(Condensation const &condensed)
{
    auto const &verts = condensed.representatives;
    std::vector<std::vector<uint32_t>> out(verts.size());
    auto index_of = [&](Address const &a) {
        return static_cast<uint32_t>(
            std::lower_bound(verts.begin(), verts.end(), a) - verts.begin());
    };
    for (auto const &[key, ev] : condensed.graph.edges()) {
        out[index_of(key.source)].push_back(index_of(key.target));
    }
    return longest_path_dag(verts, out);
}

std::vector<ScatterPoint> in_out_scatter(TokenGraph const &graph)
{
    std::vector<ScatterPoint> out;
    for (auto const &r : degree_table(graph)) {
        out.push_back({r.in_degree, r.out_degree, r.token});
    }
    return out;
}

std::string degree_hist_csv(std::map<uint64_t, uint64_t> const &hist)
{
    std::ostringstream out;
    out << "degree,count\n";
    for (auto const &[d, c] : hist) {
        out << d << ',' << c << '\n';
    }
    return out.str();
}

std::string scatter_csv(std::vector<ScatterPoint> const &points)
{
    std::ostringstream out;
    out << "in,out,token\n";
    for (auto const &p : points) {
        out << p.in_degree << ',' << p.out_degree << ',' << p.token.hex() << '\n';
    }
    return out.str();
}

std::string components_csv(ComponentReport const &report)
{
    std::ostringstream out;
    out << "component_id,size\n";
    for (std::size_t i = 0; i < report.components.size(); ++i) {
        out << i << ',' << report.components[i].size() << '\n';
    }
    return out.str();
}

} // namespace tokengraph
