// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <tokengraph/cli.hpp>
#include <tokengraph/ingestion.hpp>
#include <tokengraph/keccak.hpp>
#include <tokengraph/scenarios.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace tokengraph;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace
{
    struct Outcome
    {
        bool ok = true;
        std::string detail;

        void require(bool cond, std::string const &what)
        {
            if (!cond && ok) {
                ok = false;
                detail = what;
            }
        }
    };

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    std::string fmt(double v, int prec = 3)
    {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(prec);
        s << v;
        return s.str();
    }

    struct CliResult
    {
        int code;
        std::string out;
        std::string err;
    };

    CliResult cli(std::vector<std::string> const &args, std::string const &input = "")
    {
        std::istringstream in(input);
        std::ostringstream out, err;
        int code = run_cli(args, in, out, err);
        return {code, out.str(), err.str()};
    }

    std::string slurp(fs::path const &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    struct TempDir
    {
        fs::path path;

        TempDir()
        {
            std::random_device rd;
            path = fs::temp_directory_path() / ("tokengraph-acceptance-" + std::to_string(rd()));
            fs::create_directories(path);
        }

        ~TempDir() { fs::remove_all(path); }
    };

    // --- independent oracles ---------------------------------------------

    std::vector<TokenisingMetaEvent> filter_oracle(std::vector<TokenisingMetaEvent> const &in)
    {
        std::vector<TokenisingMetaEvent> out;
        for (auto const &m : in) {
            bool dep = false, wd = false;
            for (auto const &o : in) {
                if (o.source_token == m.source_token && o.target_token == m.target_token) {
                    dep |= o.action == ActionKind::deposit_and_mint;
                    wd |= o.action == ActionKind::withdraw_and_burn;
                }
            }
            if (dep && wd) {
                out.push_back(m);
            }
        }
        return out;
    }

    std::size_t longest_path_oracle(TokenGraph const &g)
    {
        std::size_t best = 0;
        std::function<void(Address const &, std::size_t)> dfs = [&](Address const &v,
                                                                    std::size_t len) {
            best = std::max(best, len);
            for (auto const &[k, e] : g.edges()) {
                if (k.source == v) {
                    dfs(k.target, len + 1);
                }
            }
        };
        for (auto const &v : g.vertices()) {
            dfs(v, 1);
        }
        return best;
    }

    // --- criteria --------------------------------------------------------

    Outcome fig2_end_to_end()
    {
        Outcome o;
        auto t0 = Clock::now();
        auto logs = cli({"scenario", "fig2"});
        auto csv = cli({"detect", "-"}, logs.out);
        auto unf = cli({"graph", "-"}, csv.out);
        auto filt = cli({"graph", "-", "--filtered"}, csv.out);
        auto report_unf = cli({"analyze", "-"}, unf.out);
        auto report = cli({"analyze", "-"}, filt.out);
        double elapsed = seconds_since(t0);
        o.require(logs.code == 0 && csv.code == 0 && unf.code == 0 && filt.code == 0 &&
                      report.code == 0 && report_unf.code == 0,
                  "pipeline failed");
        if (!o.ok) {
            return o;
        }
        auto s = fig2();
        auto j = json::parse(report.out);
        auto ju = json::parse(report_unf.out);
        o.require(ju["vertices"] == 8 && ju["edges"] == 8, "unfiltered size");
        o.require(j["vertices"] == 8 && j["edges"] == 8, "filtered size");
        o.require(j["components"]["sizes"] == json::array({5, 2, 1}), "WCC sizes");
        std::vector<std::string> pair{s.at("t1").hex(), s.at("t6").hex()};
        std::sort(pair.begin(), pair.end());
        o.require(j["scc"]["nontrivial"] == json::array({json(pair)}), "nontrivial SCCs");
        o.require(j["scc"]["loops"] == json::array({s.at("t7").hex()}), "loops");
        o.require(elapsed < 1.0, "took " + fmt(elapsed) + " s");
        if (o.ok) {
            o.detail = fmt(elapsed) + " s";
        }
        return o;
    }

    Outcome detector_oracle()
    {
        Outcome o;
        auto t0 = Clock::now();
        std::mt19937_64 rng(20230101);
        std::size_t violations = 0, unique = 0, nonempty = 0;
        for (int i = 0; i < 1000; ++i) {
            auto batch = random_batch(rng, 8);
            auto got = detect(batch, {});
            auto oracle = brute_force_pairings(batch, {});
            auto mine = to_pairing(got);
            bool contained = std::find(oracle.begin(), oracle.end(), mine) != oracle.end();
            std::size_t best = 0;
            std::size_t at_best = 0;
            for (auto const &p : oracle) {
                if (p.size() > best) {
                    best = p.size();
                    at_best = 0;
                }
                at_best += p.size() == best ? 1 : 0;
            }
            // Stronger than required: the size must match the optimum even
            // when several optimal pairings exist.
            bool ok = contained && mine.size() == best;
            unique += at_best == 1 ? 1 : 0;
            std::set<uint64_t> used;
            for (auto const &p : mine) {
                ok = ok && used.insert(p.asset_log_index).second &&
                     used.insert(p.share_log_index).second;
            }
            violations += ok ? 0 : 1;
            nonempty += got.empty() ? 0 : 1;
        }
        double elapsed = seconds_since(t0);
        o.require(violations == 0, std::to_string(violations) + " violations");
        o.require(elapsed < 30.0, "took " + fmt(elapsed) + " s");
        if (o.ok) {
            o.detail = "0 violations, " + std::to_string(nonempty) + " batches with pairs, " +
                       std::to_string(unique) + " unique optima, " + fmt(elapsed) + " s";
        }
        return o;
    }

    Outcome filter_law()
    {
        Outcome o;
        auto t0 = Clock::now();
        std::mt19937_64 rng(777);
        for (int i = 0; i < 1000 && o.ok; ++i) {
            auto events = random_meta_events(rng, uniform(rng, 80), 1 + uniform(rng, 10));
            auto f = apply_two_way_filter(events);
            o.require(f == filter_oracle(events), "differs from oracle at set " + std::to_string(i));
            o.require(apply_two_way_filter(f) == f, "not idempotent at set " + std::to_string(i));
            std::size_t j = 0;
            for (auto const &m : events) {
                if (j < f.size() && f[j] == m) {
                    ++j;
                }
            }
            o.require(j == f.size(), "filtered events not a subset at set " + std::to_string(i));
            auto unf = build(events, GraphMode::unfiltered);
            auto filt = build(events, GraphMode::filtered);
            o.require(filt == build(f, GraphMode::filtered), "graph mismatch");
            for (auto const &[k, e] : filt.edges()) {
                auto const *u = unf.find_edge(k.source, k.target);
                o.require(u && *u == e, "filtered edge missing from unfiltered graph");
            }
            for (auto const &v : filt.vertices()) {
                o.require(unf.contains(v), "filtered vertex missing from unfiltered graph");
            }
        }
        double elapsed = seconds_since(t0);
        o.require(elapsed < 10.0, "took " + fmt(elapsed) + " s");
        if (o.ok) {
            o.detail = fmt(elapsed) + " s";
        }
        return o;
    }

    Outcome longest_path_exact()
    {
        Outcome o;
        std::mt19937_64 rng(4242);
        std::vector<Address> pool;
        for (int i = 0; i < 12; ++i) {
            pool.push_back(synthetic_address("acceptance", "dag" + std::to_string(i)));
        }
        for (int i = 0; i < 500 && o.ok; ++i) {
            auto n = 1 + uniform(rng, 12);
            auto order = pool;
            std::shuffle(order.begin(), order.end(), rng);
            std::vector<std::pair<Address, Address>> edges;
            auto m = uniform(rng, 3 * n);
            for (uint64_t e = 0; e < m; ++e) {
                auto a = uniform(rng, n), b = uniform(rng, n);
                if (a < b) {
                    edges.emplace_back(order[a], order[b]);
                }
            }
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            auto g = TokenGraph::from_edge_list(edges);
            auto path = longest_path(g);
            o.require(path.length() == longest_path_oracle(g),
                      "length mismatch on DAG " + std::to_string(i));
            for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
                o.require(g.find_edge(path.vertices[k], path.vertices[k + 1]) != nullptr,
                          "path uses a missing edge");
            }
        }

        auto s = nine_chain();
        auto g = build(detect_all(s.batches).events, GraphMode::filtered);
        std::vector<std::string> labels;
        for (auto const &v : longest_path(g).vertices) {
            labels.push_back(s.labels.at(v));
        }
        std::vector<std::string> const expected = {
            "renBTC",        "sBTC",   "crvRenWSBTC",     "tbtc/sbtcCrv",    "btbtc/sbtcCrv",
            "ibBTC",         "wibBTC", "ibbtc/sbtcCRV-f", "bibbtc/sbtcCRV-f"};
        o.require(labels == expected, "nine-token chain differs");
        auto prefixes = std::vector<std::string>{"eb4c27", "fe18be", "075b1b", "64eda5", "b9d076",
                                                 "c4e159", "8751d4", "fbdca6", "ae96ff"};
        for (std::size_t i = 0; i < labels.size() && o.ok; ++i) {
            o.require(s.at(expected[i]).hex().substr(2, 6) == prefixes[i], "address prefix");
        }
        if (o.ok) {
            o.detail = "500 DAGs exact, chain length 9";
        }
        return o;
    }

    Outcome cycle_injection()
    {
        Outcome o;
        for (uint64_t k : {1, 2, 5}) {
            auto s = cycle(k);
            auto g = build(detect_all(s.batches).events, GraphMode::filtered);
            auto scc = strong_components(g);
            auto tag = " (k=" + std::to_string(k) + ")";
            o.require(g.vertex_count() == k && g.edge_count() == k, "graph size" + tag);
            if (k == 1) {
                o.require(scc.loops.size() == 1 && scc.nontrivial.empty(), "loop" + tag);
            }
            else {
                o.require(scc.nontrivial.size() == 1 && scc.nontrivial[0].size() == k &&
                              scc.loops.empty(),
                          "SCC size" + tag);
            }
        }
        if (o.ok) {
            o.detail = "k in {1,2,5}";
        }
        return o;
    }

    Outcome one_way_exclusion()
    {
        Outcome o;
        auto s = one_way_upgrade();
        auto events = detect_all(s.batches).events;
        auto unf = build(events, GraphMode::unfiltered);
        auto filt = build(events, GraphMode::filtered);
        o.require(unf.edge_count() == 1, "unfiltered edges " + std::to_string(unf.edge_count()));
        o.require(filt.edge_count() == 0, "filtered edges " + std::to_string(filt.edge_count()));
        if (o.ok) {
            o.detail = "1 unfiltered edge, 0 filtered";
        }
        return o;
    }

    Outcome table_goldens()
    {
        Outcome o;
        auto s = table1();
        auto events = detect_all(s.batches).events;
        struct Row
        {
            std::string source, target;
            ActionKind action;
            std::string source_amount, target_amount;
        };
        auto const D = ActionKind::deposit_and_mint;
        auto const W = ActionKind::withdraw_and_burn;
        std::vector<Row> const rows = {
            {"ARC", "SWT", D, "1", "1"},
            {"DGZ", "preDGZ", W, "1371000000000000000000", "150000000000000000000"},
            {"BONE", "tBONE", W, "5183000000000000000000", "5160000000000000000000"},
            {"WETH", "aWETH", D, "25000000000000000000", "25000000000000000000"},
        };
        o.require(events.size() == rows.size(), "table1 event count");
        for (std::size_t i = 0; i < rows.size() && o.ok; ++i) {
            auto const &e = events[i];
            o.require(s.labels.at(e.source_token) == rows[i].source &&
                          s.labels.at(e.target_token) == rows[i].target &&
                          e.action == rows[i].action &&
                          to_decimal(e.source_amount) == rows[i].source_amount &&
                          to_decimal(e.target_amount) == rows[i].target_amount,
                      "table1 row " + std::to_string(i));
        }
        // Through the CLI and back through the reader, byte for byte.
        std::string logs;
        for (auto const &l : s.logs()) {
            logs += to_jsonl_line(l) + "\n";
        }
        auto csv = cli({"detect", "-"}, logs).out;
        o.require(csv == meta_events_csv(events), "CLI CSV differs from library");
        std::istringstream in(csv);
        o.require(meta_events_csv(read_meta_events_csv(in)) == csv, "CSV round trip");

        auto f = published_table_fixture();
        TokenGraphBuilder builder;
        f.for_each_meta_event([&](TokenisingMetaEvent const &m) { builder.add(m); });
        auto unf = builder.build(GraphMode::unfiltered);
        auto filt = builder.build(GraphMode::filtered);
        std::vector<std::tuple<std::string, std::string, uint64_t>> const table2 = {
            {"SHIB", "xSHIB", 402186}, {"BONE", "tBONE", 203734}, {"SUSHI", "xSUSHI", 120221},
            {"LEASH", "xLEASH", 75180}, {"USDC", "aUSDC", 69373}};
        for (auto const *g : {&unf, &filt}) {
            auto top = top_edges(*g, 5);
            o.require(top.size() == 5, "table2 size");
            for (std::size_t i = 0; i < top.size() && o.ok; ++i) {
                auto const &[src, dst, n] = table2[i];
                o.require(f.labels.at(top[i].first.source) == src &&
                              f.labels.at(top[i].first.target) == dst &&
                              top[i].second.meta_event_count() == n,
                          "table2 row " + std::to_string(i));
            }
        }
        using Ranking = std::vector<std::pair<std::string, uint64_t>>;
        auto ranking = [&](TokenGraph const &g, DegreeAxis axis) {
            Ranking out;
            for (auto const &r : top_by_degree(g, axis, 5)) {
                out.emplace_back(f.labels.at(r.token),
                                 axis == DegreeAxis::in ? r.in_degree : r.out_degree);
            }
            return out;
        };
        o.require(ranking(unf, DegreeAxis::in) ==
                      Ranking{{"CHI", 471}, {"USDP", 117}, {"aUSDC", 84}, {"aWETH", 63}, {"aDAI", 54}},
                  "table3 unfiltered in");
        o.require(ranking(unf, DegreeAxis::out) == Ranking{{"USDC", 3587}, {"DAI", 1923},
                                                           {"USDT", 1175}, {"WETH", 951},
                                                           {"sUSD", 548}},
                  "table3 unfiltered out");
        o.require(ranking(filt, DegreeAxis::in) ==
                      Ranking{{"XDP2", 16}, {"XDP1", 15}, {"cyUSD", 14}, {"iDOL", 13}, {"agEUR", 8}},
                  "table3 filtered in");
        o.require(ranking(filt, DegreeAxis::out) == Ranking{{"USDC", 1037}, {"DAI", 752},
                                                            {"USDT", 396}, {"WETH", 281},
                                                            {"WBTC", 211}},
                  "table3 filtered out");
        if (o.ok) {
            o.detail = "table1 CSV identical, tables 2 and 3 reproduced";
        }
        return o;
    }

    Outcome scale_performance()
    {
        Outcome o;
        TempDir dir;
        auto s = scale(1, 25000, 25000);
        {
            std::ofstream logs(dir.path / "logs.jsonl", std::ios::binary);
            for (auto const &l : s.logs()) {
                logs << to_jsonl_line(l) << '\n';
            }
        }
        auto transfers = s.transfer_count();

        auto t0 = Clock::now();
        auto d = cli({"detect", (dir.path / "logs.jsonl").string(), "--out", dir.path.string()});
        double detect_s = seconds_since(t0);
        o.require(d.code == 0, "detect failed: " + d.err);
        double rate = transfers / detect_s;

        auto g = cli({"graph", (dir.path / "meta_events.csv").string(), "--out",
                      dir.path.string()});
        o.require(g.code == 0, "graph failed: " + g.err);
        auto report_dir = dir.path / "report";

        auto t1 = Clock::now();
        auto a = cli({"analyze", (dir.path / "graph_unfiltered.json").string(), "--condense",
                      "--out", report_dir.string()});
        double analyze_s = seconds_since(t1);
        o.require(a.code == 0, "analyze failed: " + a.err);
        if (!o.ok) {
            return o;
        }
        auto report = json::parse(slurp(report_dir / "report.json"));
        o.require(report["vertices"] == 25000 && report["edges"] == 25000,
                  "graph is " + report["vertices"].dump() + "/" + report["edges"].dump());
        o.require(analyze_s < 10.0, "analyze took " + fmt(analyze_s) + " s");
        o.require(rate >= 50000.0, "detect " + fmt(rate, 0) + " events/s");
        if (o.ok) {
            o.detail = "analyze " + fmt(analyze_s) + " s; detect " + fmt(rate, 0) +
                       " events/s over " + std::to_string(transfers) + " transfers";
        }
        return o;
    }

    Outcome ingestion_chunking()
    {
        Outcome o;
        std::mt19937_64 rng(99);
        std::vector<RawLog> pool;
        Address other_token = synthetic_address("acceptance", "emitter");
        for (uint64_t block = 0; block < 300; ++block) {
            auto n = uniform(rng, 4);
            for (uint64_t i = 0; i < n; ++i) {
                TransferEvent ev;
                ev.token = synthetic_address("acceptance", "tok" + std::to_string(uniform(rng, 5)));
                ev.from = synthetic_address("acceptance", "u" + std::to_string(uniform(rng, 9)));
                ev.to = synthetic_address("acceptance", "u" + std::to_string(uniform(rng, 9)));
                ev.amount = rng();
                ev.block_number = block;
                ev.log_index = i;
                ev.tx_hash = keccak256("acc" + std::to_string(block) + ":" + std::to_string(i));
                auto log = encode_transfer(ev, i);
                if (uniform(rng, 6) == 0) {
                    log.emitter = other_token;
                    log.topics[0] = keccak256("Approval(address,address,uint256)");
                }
                pool.push_back(log);
            }
        }
        std::shuffle(pool.begin(), pool.end(), rng);

        auto sorted_lines = [](std::vector<RawLog> const &logs) {
            std::vector<std::string> lines;
            for (auto const &l : logs) {
                lines.push_back(to_jsonl_line(l));
            }
            std::sort(lines.begin(), lines.end());
            return lines;
        };

        StubLogProvider unrestricted(pool);
        FetchOptions whole;
        whole.chunk_size = 1000;
        auto reference = fetch_all_logs(unrestricted, {0, 299}, whole);

        for (uint64_t chunk : {5, 16, 37, 300}) {
            StubLogProvider adversarial(pool, 4);
            FetchOptions opts;
            opts.chunk_size = chunk;
            opts.concurrency = 3;
            auto got = fetch_all_logs(adversarial, {0, 299}, opts);
            o.require(sorted_lines(got) == sorted_lines(reference),
                      "multiset differs at chunk size " + std::to_string(chunk));
            o.require(got == reference, "order differs at chunk size " + std::to_string(chunk));
        }
        o.require(!reference.empty(), "empty reference");
        if (o.ok) {
            o.detail = std::to_string(reference.size()) + " logs identical";
        }
        return o;
    }
}

int main()
{
    struct Criterion
    {
        char const *name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria = {
        {"fig2 end-to-end", fig2_end_to_end},
        {"detector-oracle equivalence", detector_oracle},
        {"two-way filter law", filter_law},
        {"longest-path exactness", longest_path_exact},
        {"cycle injection", cycle_injection},
        {"one-way exclusion", one_way_exclusion},
        {"table goldens", table_goldens},
        {"scale and performance", scale_performance},
        {"ingestion chunking", ingestion_chunking},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        }
        catch (std::exception const &e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.ok ? 0 : 1;
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].name
                  << (o.detail.empty() ? "" : ": " + o.detail) << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
