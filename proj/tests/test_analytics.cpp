#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tokengraph/analytics.hpp>
#include <tokengraph/scenarios.hpp>

#include <algorithm>
#include <functional>
#include <random>

using namespace tokengraph;

namespace
{
    std::vector<Address> make_tokens(std::size_t n)
    {
        std::vector<Address> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(synthetic_address("analytics-test", "v" + std::to_string(i)));
        }
        return out;
    }

    // Random graph over n tokens; `dag` orients every edge from lower to
    // higher position in a random permutation.
    TokenGraph random_graph(std::mt19937_64 &rng, std::size_t n, std::size_t m, bool dag,
                            bool loops = false)
    {
        auto tokens = make_tokens(n);
        std::shuffle(tokens.begin(), tokens.end(), rng);
        std::vector<std::pair<Address, Address>> edges;
        for (std::size_t i = 0; i < m; ++i) {
            auto a = uniform(rng, n), b = uniform(rng, n);
            if (a == b && !loops) {
                continue;
            }
            if (dag && a > b) {
                std::swap(a, b);
            }
            if (dag && a == b) {
                continue;
            }
            edges.push_back({tokens[a], tokens[b]});
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        return TokenGraph::from_edge_list(edges);
    }

    std::vector<Address> verts(TokenGraph const &g)
    {
        return {g.vertices().begin(), g.vertices().end()};
    }

    // Reachability closure by repeated relaxation.
    std::vector<std::vector<bool>> reach(TokenGraph const &g, bool undirected)
    {
        auto v = verts(g);
        auto idx = [&](Address const &a) {
            return std::lower_bound(v.begin(), v.end(), a) - v.begin();
        };
        std::vector<std::vector<bool>> r(v.size(), std::vector<bool>(v.size(), false));
        for (std::size_t i = 0; i < v.size(); ++i) {
            r[i][i] = true;
        }
        for (auto const &[k, e] : g.edges()) {
            r[idx(k.source)][idx(k.target)] = true;
            if (undirected) {
                r[idx(k.target)][idx(k.source)] = true;
            }
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                for (std::size_t j = 0; j < v.size(); ++j) {
                    if (r[i][k] && r[k][j]) {
                        r[i][j] = true;
                    }
                }
            }
        }
        return r;
    }

    std::vector<std::vector<Address>> oracle_components(TokenGraph const &g, bool strong)
    {
        auto v = verts(g);
        auto r = reach(g, !strong);
        std::vector<bool> done(v.size(), false);
        std::vector<std::vector<Address>> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (done[i]) {
                continue;
            }
            std::vector<Address> c;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (r[i][j] && r[j][i]) {
                    c.push_back(v[j]);
                    done[j] = true;
                }
            }
            out.push_back(c);
        }
        std::sort(out.begin(), out.end(), [](auto const &a, auto const &b) {
            if (a.size() != b.size()) {
                return a.size() > b.size();
            }
            return a.front() < b.front();
        });
        return out;
    }

    // Every simple path by DFS; longest, then lexicographically smallest.
    std::vector<Address> oracle_longest_path(TokenGraph const &g)
    {
        std::vector<Address> best;
        std::vector<Address> path;
        std::function<void(Address const &)> dfs = [&](Address const &v) {
            path.push_back(v);
            if (path.size() > best.size() || (path.size() == best.size() && path < best)) {
                best = path;
            }
            for (auto const &[k, e] : g.edges()) {
                if (k.source == v) {
                    dfs(k.target);
                }
            }
            path.pop_back();
        };
        for (auto const &v : g.vertices()) {
            dfs(v);
        }
        return best;
    }

    TokenGraph fig2_graph(Scenario const &s)
    {
        return build(detect_all(s.batches).events, GraphMode::filtered);
    }
}

TEST_CASE("weak and strong components agree with a reachability oracle")
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        auto n = 1 + uniform(rng, 14);
        auto g = random_graph(rng, n, uniform(rng, 3 * n), false, true);
        auto w = weak_components(g);
        CHECK(w.components == oracle_components(g, false));
        auto s = strong_components(g);
        CHECK(s.report.components == oracle_components(g, true));
        std::size_t total = 0;
        for (auto const &[size, count] : w.size_histogram) {
            total += size * count;
        }
        CHECK(total == g.vertex_count());
        for (auto const &c : s.nontrivial) {
            CHECK(c.size() >= 2);
        }
        auto member = w.membership();
        for (auto const &[k, e] : g.edges()) {
            CHECK(member.at(k.source) == member.at(k.target));
        }
    }
}

TEST_CASE("longest path agrees with exhaustive search on DAGs")
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        auto n = 1 + uniform(rng, 12);
        auto g = random_graph(rng, n, uniform(rng, 2 * n + 1), true);
        CHECK(longest_path(g).vertices == oracle_longest_path(g));
        auto path = longest_path(g).vertices;
        for (std::size_t j = 0; j + 1 < path.size(); ++j) {
            CHECK(g.find_edge(path[j], path[j + 1]));
        }
    }
    CHECK(longest_path(TokenGraph{}).length() == 0);
}

TEST_CASE("cycles are reported, not walked")
{
    for (uint64_t k : {1, 2, 3, 5}) {
        auto s = cycle(k);
        auto g = build(detect_all(s.batches).events, GraphMode::filtered);
        REQUIRE(g.vertex_count() == k);
        try {
            longest_path(g);
            FAIL("expected a cycle");
        }
        catch (CyclicGraphError const &e) {
            CHECK(e.scc.size() == k);
        }
        auto c = condensation(g);
        CHECK(c.representatives.size() == 1);
        CHECK(c.graph.edge_count() == 0);
        CHECK(longest_path(c).length() == 1);
        auto scc = strong_components(g);
        if (k == 1) {
            CHECK(scc.loops.size() == 1);
            CHECK(scc.nontrivial.empty());
        }
        else {
            CHECK(scc.nontrivial.size() == 1);
            CHECK(scc.loops.empty());
        }
    }
}

TEST_CASE("the eight-token example")
{
    auto s = fig2();
    auto g = fig2_graph(s);

    auto w = weak_components(g);
    std::vector<std::size_t> sizes;
    for (auto const &c : w.components) {
        sizes.push_back(c.size());
    }
    CHECK(sizes == std::vector<std::size_t>{5, 2, 1});
    CHECK(w.giant == 0);
    CHECK(w.size_histogram == std::map<std::size_t, std::size_t>{{1, 1}, {2, 1}, {5, 1}});

    auto sc = strong_components(g);
    REQUIRE(sc.nontrivial.size() == 1);
    std::vector<Address> pair{s.at("t1"), s.at("t6")};
    std::sort(pair.begin(), pair.end());
    CHECK(sc.nontrivial[0] == pair);
    CHECK(sc.loops == std::vector<Address>{s.at("t7")});
    CHECK(sc.report.components.size() == 7);

    CHECK_THROWS_AS(longest_path(g), CyclicGraphError);
    auto c = condensation(g);
    CHECK(c.representatives.size() == 7);
    CHECK(c.members.at(pair.front()) == pair);
    // t7 keeps its representative even though its loop is gone.
    CHECK(std::find(c.representatives.begin(), c.representatives.end(), s.at("t7")) !=
          c.representatives.end());
    CHECK_FALSE(c.graph.contains(s.at("t7")));
    auto p = longest_path(c).vertices;
    CHECK(p == std::vector<Address>{s.at("t0"), s.at("t5"), pair.front()});

    auto table = degree_table(g);
    auto find = [&](std::string const &label) {
        return *std::find_if(table.begin(), table.end(),
                             [&](auto const &r) { return r.token == s.at(label); });
    };
    CHECK(find("t6").in_degree == 3);
    CHECK(find("t6").out_degree == 1);
    CHECK(find("t1").in_degree == 2);
    CHECK(find("t7").in_degree == 1);
    CHECK(find("t7").out_degree == 1);
    CHECK(find("t0").in_degree == 0);
    CHECK(find("t0").out_degree == 2);
}

TEST_CASE("degree statistics")
{
    std::mt19937_64 rng(3);
    auto g = random_graph(rng, 30, 80, false, true);
    auto table = degree_table(g);
    CHECK(table.size() == g.vertex_count());
    uint64_t in = 0, out = 0;
    for (auto const &r : table) {
        in += r.in_degree;
        out += r.out_degree;
    }
    CHECK(in == g.edge_count());
    CHECK(out == g.edge_count());

    auto h = degree_histograms(g);
    uint64_t counted = 0;
    for (auto const &[d, c] : h.in) {
        counted += c;
    }
    CHECK(counted == g.vertex_count());

    auto top = top_by_degree(g, DegreeAxis::out, 5);
    REQUIRE(top.size() == 5);
    auto sorted = table;
    std::sort(sorted.begin(), sorted.end(), [](auto const &a, auto const &b) {
        return a.out_degree != b.out_degree ? a.out_degree > b.out_degree : a.token < b.token;
    });
    CHECK(std::equal(top.begin(), top.end(), sorted.begin()));
    CHECK(top_by_degree(g, DegreeAxis::in, 1000).size() == g.vertex_count());

    CHECK(in_out_scatter(g).size() == g.vertex_count());
}

TEST_CASE("top edges")
{
    std::mt19937_64 rng(12);
    auto events = random_meta_events(rng, 500, 12);
    auto g = build(events, GraphMode::unfiltered);
    auto top = top_edges(g, 5);
    REQUIRE(top.size() == std::min<std::size_t>(5, g.edge_count()));
    for (std::size_t i = 0; i + 1 < top.size(); ++i) {
        auto a = top[i].second.meta_event_count(), b = top[i + 1].second.meta_event_count();
        CHECK(a >= b);
        if (a == b) {
            CHECK(top[i].first < top[i + 1].first);
        }
    }
    for (auto const &[k, e] : g.edges()) {
        bool listed = std::any_of(top.begin(), top.end(), [&](auto const &t) { return t.first == k; });
        if (!listed && !top.empty()) {
            CHECK(e.meta_event_count() <= top.back().second.meta_event_count());
        }
    }
    CHECK(top_edges(g, 0).empty());
}

TEST_CASE("CSV emitters")
{
    CHECK(degree_hist_csv({{0, 3}, {2, 1}}) == "degree,count\n0,3\n2,1\n");
    auto s = fig2();
    auto g = fig2_graph(s);
    CHECK(components_csv(weak_components(g)) == "component_id,size\n0,5\n1,2\n2,1\n");
    auto scatter = scatter_csv(in_out_scatter(g));
    CHECK(scatter.starts_with("in,out,token\n"));
    CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 9);
}
