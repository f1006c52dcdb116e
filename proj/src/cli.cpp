#include <tokengraph/cli.hpp>

#include <tokengraph/analytics.hpp>
#include <tokengraph/csv.hpp>
#include <tokengraph/enrichment.hpp>
#include <tokengraph/explorer_service.hpp>
#include <tokengraph/graph_io.hpp>
#include <tokengraph/ingestion.hpp>
#include <tokengraph/meta_events.hpp>
#include <tokengraph/scenarios.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tokengraph
{

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace
{
    class CliError : public std::runtime_error
    {
    public:
        CliError(std::string type, std::string const &message)
            : std::runtime_error(message)
            , type(std::move(type))
        {
        }
        std::string type;
    };

    struct Io
    {
        std::istream &in;
        std::ostream &out;
    };

    std::string with_newline(std::string s)
    {
        if (s.empty() || s.back() != '\n') {
            s += '\n';
        }
        return s;
    }

    std::string read_input(std::string const &path, std::istream &in)
    {
        std::ostringstream buf;
        if (path.empty() || path == "-") {
            buf << in.rdbuf();
            return buf.str();
        }
        std::ifstream f(path, std::ios::binary);
        if (!f) {
            throw CliError("io_error", "cannot open " + path);
        }
        buf << f.rdbuf();
        return buf.str();
    }

    void write_file(fs::path const &path, std::string const &content)
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw CliError("io_error", "cannot write " + path.string());
        }
        f << with_newline(content);
        if (!f) {
            throw CliError("io_error", "failed writing " + path.string());
        }
    }

    fs::path out_dir(std::string const &dir)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw CliError("io_error", "cannot create " + dir + ": " + ec.message());
        }
        return fs::path(dir);
    }

    ojson pretty_labels(LabelMap const &labels)
    {
        ojson j = ojson::object();
        for (auto const &[a, l] : labels) {
            j[a.hex()] = l;
        }
        return j;
    }

    LabelMap labels_from_json(nlohmann::json const &j)
    {
        LabelMap labels;
        if (!j.is_object()) {
            throw CliError("parse_error", "labels must be a JSON object");
        }
        for (auto const &[k, v] : j.items()) {
            labels[Address::parse(k)] = v.get<std::string>();
        }
        return labels;
    }

    LabelMap load_labels(std::string const &path)
    {
        std::ifstream f(path);
        if (!f) {
            throw CliError("io_error", "cannot open " + path);
        }
        return labels_from_json(nlohmann::json::parse(f));
    }

    std::unique_ptr<std::istream> borrow(std::istream &in)
    {
        return std::make_unique<std::istream>(in.rdbuf());
    }

    // --- extract ----------------------------------------------------------

    struct ExtractArgs
    {
        std::string rpc_url;
        std::string stub;
        uint64_t from_block = 0;
        uint64_t to_block = 0;
        uint64_t chunk_size = 2000;
        unsigned concurrency = 4;
        int max_retries = 5;
        bool skip_oversized = false;
        std::string out;
    };

    int run_extract(ExtractArgs const &a, Io io)
    {
        std::unique_ptr<LogProvider> provider;
        if (!a.stub.empty()) {
            provider = std::make_unique<StubLogProvider>(StubLogProvider::load(a.stub));
        }
        else {
            auto url = a.rpc_url;
            if (url.empty()) {
                if (char const *env = std::getenv("TOKENGRAPH_RPC_URL")) {
                    url = env;
                }
            }
            if (url.empty()) {
                throw CliError("usage_error",
                               "no RPC endpoint: pass --rpc-url, set TOKENGRAPH_RPC_URL "
                               "or use --stub");
            }
            provider = std::make_unique<RpcLogProvider>(url);
        }
        FetchOptions opts;
        opts.chunk_size = a.chunk_size;
        opts.concurrency = a.concurrency;
        opts.max_retries = a.max_retries;
        opts.skip_oversized = a.skip_oversized;

        std::ofstream file;
        std::ostream *sink_stream = &io.out;
        if (!a.out.empty()) {
            file.open(out_dir(a.out) / "logs.jsonl", std::ios::binary);
            if (!file) {
                throw CliError("io_error", "cannot write logs.jsonl");
            }
            sink_stream = &file;
        }
        uint64_t count = 0;
        auto stats = fetch_logs(
            *provider, BlockRange(a.from_block, a.to_block),
            [&](RawLog const &log) {
                *sink_stream << to_jsonl_line(log) << '\n';
                ++count;
            },
            opts);
        if (!a.out.empty()) {
            ojson s;
            s["from_block"] = a.from_block;
            s["to_block"] = a.to_block;
            s["logs"] = count;
            s["requests"] = stats.requests;
            s["halvings"] = stats.halvings;
            s["retries"] = stats.retries;
            s["skipped_blocks"] = stats.skipped_blocks;
            write_file(fs::path(a.out) / "extract_stats.json", s.dump(2));
        }
        return 0;
    }

    // --- detect -----------------------------------------------------------

    struct DetectArgs
    {
        std::string input = "-";
        std::string policy = "loose";
        bool no_self_wrap = false;
        std::size_t max_events_per_tx = 512;
        bool strict_decode = false;
        std::string out;
    };

    int run_detect(DetectArgs const &a, Io io)
    {
        PairingPolicy policy;
        policy.mode = parse_pairing_mode(a.policy);
        policy.allow_self_wrap = !a.no_self_wrap;
        policy.max_events_per_tx = a.max_events_per_tx;
        policy.validate();

        std::unique_ptr<LogReader> reader;
        if (a.input.empty() || a.input == "-") {
            reader = std::make_unique<LogReader>(borrow(io.in), a.strict_decode);
        }
        else {
            reader = std::make_unique<LogReader>(a.input, a.strict_decode);
        }

        std::ofstream file;
        std::ostream *csv = &io.out;
        if (!a.out.empty()) {
            file.open(out_dir(a.out) / "meta_events.csv", std::ios::binary);
            if (!file) {
                throw CliError("io_error", "cannot write meta_events.csv");
            }
            csv = &file;
        }
        *csv << meta_event_csv_header << '\n';

        DecodeOptions decode;
        decode.strict = a.strict_decode;
        TxGrouper grouper(decode);
        Detector detector(policy);
        auto sink = [&](TokenisingMetaEvent const &m) { *csv << to_csv_row(m) << '\n'; };
        while (auto log = reader->next()) {
            if (auto batch = grouper.push(*log)) {
                detector.process(*batch, sink);
            }
        }
        if (auto batch = grouper.finish()) {
            detector.process(*batch, sink);
        }
        if (!a.out.empty()) {
            auto s = ojson::parse(detector.stats().to_json().dump());
            s["policy"] = a.policy;
            s["logs"] = grouper.stats().logs;
            s["malformed_lines"] = reader->malformed();
            s["dirty_padding"] = grouper.stats().dirty_padding;
            write_file(fs::path(a.out) / "detect_stats.json", s.dump(2));
        }
        return 0;
    }

    // --- graph ------------------------------------------------------------

    struct GraphArgs
    {
        std::string input = "-";
        bool filtered = false;
        std::string format = "json";
        std::string labels;
        std::string snapshot;
        std::string out;
    };

    std::vector<TokenisingMetaEvent> read_events(std::string const &path, std::istream &in)
    {
        std::istringstream text(read_input(path, in));
        return read_meta_events_csv(text);
    }

    LabelMap gather_labels(std::string const &labels_path, std::string const &snapshot)
    {
        LabelMap labels;
        if (!labels_path.empty()) {
            labels = load_labels(labels_path);
        }
        if (!snapshot.empty()) {
            for (auto const &[a, l] : labels_from(load_snapshot(snapshot).tokens)) {
                labels[a] = l;
            }
        }
        return labels;
    }

    std::string render_graph(TokenGraph const &g, LabelMap const &labels,
                             std::string const &format)
    {
        if (format == "json") {
            return graph_to_json(g, labels).dump(2) + "\n";
        }
        if (format == "dot") {
            return with_newline(graph_to_dot(g, labels));
        }
        if (format == "graphml") {
            return with_newline(graph_to_graphml(g, labels));
        }
        throw CliError("usage_error", "graph format must be json, dot or graphml");
    }

    int run_graph(GraphArgs const &a, Io io)
    {
        auto events = read_events(a.input, io.in);
        auto mode = a.filtered ? GraphMode::filtered : GraphMode::unfiltered;
        auto g = build(events, mode);
        auto text = render_graph(g, gather_labels(a.labels, a.snapshot), a.format);
        if (!a.out.empty()) {
            std::string ext = a.format == "json" ? "json" : a.format;
            write_file(out_dir(a.out) / ("graph_" + std::string(to_string(mode)) + "." + ext),
                       text);
        }
        else {
            io.out << text;
        }
        return 0;
    }

    // --- analyze ----------------------------------------------------------

    struct AnalyzeArgs
    {
        std::string input = "-";
        std::size_t top_k = 5;
        bool condense = false;
        bool longest_path = false;
        bool scc = false;
        bool degrees = false;
        bool components = false;
        bool top_edges = false;
        std::string out;
    };

    ojson vertex_json(Address const &a, LabelMap const &labels)
    {
        return {{"address", a.hex()}, {"label", vertex_label(a, labels)}};
    }

    ojson address_list(std::vector<Address> const &vs)
    {
        auto j = ojson::array();
        for (auto const &v : vs) {
            j.push_back(v.hex());
        }
        return j;
    }

    std::string top_degrees_csv(TokenGraph const &g, LabelMap const &labels, std::size_t k)
    {
        std::ostringstream out;
        out << "axis,rank,token,label,in_degree,out_degree\n";
        for (auto axis : {DegreeAxis::in, DegreeAxis::out}) {
            std::size_t rank = 0;
            for (auto const &r : top_by_degree(g, axis, k)) {
                out << (axis == DegreeAxis::in ? "in" : "out") << ',' << ++rank << ','
                    << r.token.hex() << ',' << csv_escape(vertex_label(r.token, labels))
                    << ',' << r.in_degree << ',' << r.out_degree << '\n';
            }
        }
        return out.str();
    }

    std::string top_edges_csv(TokenGraph const &g, LabelMap const &labels, std::size_t k)
    {
        std::ostringstream out;
        out << "rank,source,target,source_label,target_label,meta_event_count,"
               "deposit_mint_count,withdraw_burn_count\n";
        std::size_t rank = 0;
        for (auto const &[key, ev] : top_edges(g, k)) {
            out << ++rank << ',' << key.source.hex() << ',' << key.target.hex() << ','
                << csv_escape(vertex_label(key.source, labels)) << ','
                << csv_escape(vertex_label(key.target, labels)) << ','
                << ev.meta_event_count() << ',' << ev.deposit_mint_count << ','
                << ev.withdraw_burn_count << '\n';
        }
        return out.str();
    }

    int run_analyze(AnalyzeArgs const &a, Io io)
    {
        auto j = nlohmann::json::parse(read_input(a.input, io.in));
        auto g = graph_from_json(j);
        LabelMap labels;
        if (j.contains("labels")) {
            labels = labels_from_json(j["labels"]);
        }
        bool all = !(a.longest_path || a.scc || a.degrees || a.components || a.top_edges);

        ojson report;
        report["mode"] = to_string(g.mode());
        report["vertices"] = g.vertex_count();
        report["edges"] = g.edge_count();

        std::optional<fs::path> dir;
        if (!a.out.empty()) {
            dir = out_dir(a.out);
        }

        if (all || a.degrees) {
            auto hist = degree_histograms(g);
            ojson d;
            for (auto axis : {DegreeAxis::in, DegreeAxis::out}) {
                auto &list = d[axis == DegreeAxis::in ? "top_in" : "top_out"] = ojson::array();
                for (auto const &r : top_by_degree(g, axis, a.top_k)) {
                    auto v = vertex_json(r.token, labels);
                    v["in_degree"] = r.in_degree;
                    v["out_degree"] = r.out_degree;
                    list.push_back(std::move(v));
                }
            }
            report["degrees"] = d;
            if (dir) {
                write_file(*dir / "degree_hist_in.csv", degree_hist_csv(hist.in));
                write_file(*dir / "degree_hist_out.csv", degree_hist_csv(hist.out));
                write_file(*dir / "scatter.csv", scatter_csv(in_out_scatter(g)));
                write_file(*dir / "top_degrees.csv", top_degrees_csv(g, labels, a.top_k));
            }
        }
        if (all || a.components) {
            auto wcc = weak_components(g);
            ojson c;
            c["count"] = wcc.components.size();
            c["giant_size"] = wcc.components.empty() ? 0 : wcc.components[wcc.giant].size();
            auto &sizes = c["sizes"] = ojson::array();
            for (auto const &comp : wcc.components) {
                sizes.push_back(comp.size());
            }
            auto &hist = c["size_histogram"] = ojson::object();
            for (auto const &[size, count] : wcc.size_histogram) {
                hist[std::to_string(size)] = count;
            }
            report["components"] = c;
            if (dir) {
                write_file(*dir / "components.csv", components_csv(wcc));
            }
        }
        if (all || a.scc) {
            auto scc = strong_components(g);
            ojson s;
            s["count"] = scc.report.components.size();
            auto &nontrivial = s["nontrivial"] = ojson::array();
            for (auto const &comp : scc.nontrivial) {
                nontrivial.push_back(address_list(comp));
            }
            s["loops"] = address_list(scc.loops);
            report["scc"] = s;
            if (dir) {
                write_file(*dir / "scc.json", s.dump(2));
            }
        }
        if (all || a.top_edges) {
            auto &list = report["top_edges"] = ojson::array();
            for (auto const &[key, ev] : top_edges(g, a.top_k)) {
                ojson e;
                e["source"] = vertex_json(key.source, labels);
                e["target"] = vertex_json(key.target, labels);
                e["meta_event_count"] = ev.meta_event_count();
                e["deposit_mint_count"] = ev.deposit_mint_count;
                e["withdraw_burn_count"] = ev.withdraw_burn_count;
                list.push_back(std::move(e));
            }
            if (dir) {
                write_file(*dir / "top_edges.csv", top_edges_csv(g, labels, a.top_k));
            }
        }
        if (all || a.longest_path) {
            ojson p;
            p["condensed"] = a.condense;
            try {
                if (a.condense) {
                    auto c = condensation(g);
                    auto path = longest_path(c);
                    p["length"] = path.length();
                    auto &vs = p["vertices"] = ojson::array();
                    for (auto const &r : path.vertices) {
                        auto v = vertex_json(r, labels);
                        v["members"] = address_list(c.members.at(r));
                        vs.push_back(std::move(v));
                    }
                }
                else {
                    auto path = longest_path(g);
                    p["length"] = path.length();
                    auto &vs = p["vertices"] = ojson::array();
                    for (auto const &v : path.vertices) {
                        vs.push_back(vertex_json(v, labels));
                    }
                }
            }
            catch (CyclicGraphError const &e) {
                if (a.longest_path) {
                    throw CliError("cyclic_graph", std::string(e.what()) +
                                                       "; rerun with --condense");
                }
                p["cyclic"] = true;
                p["scc"] = address_list(e.scc);
            }
            report["longest_path"] = p;
            if (dir) {
                write_file(*dir / "longest_path.json", p.dump(2));
            }
        }
        auto text = report.dump(2) + "\n";
        if (dir) {
            write_file(*dir / "report.json", text);
        }
        else {
            io.out << text;
        }
        return 0;
    }

    // --- enrich -----------------------------------------------------------

    struct EnrichArgs
    {
        std::string input = "-";
        std::string snapshot;
        std::string out;
    };

    int run_enrich(EnrichArgs const &a, Io io)
    {
        auto j = nlohmann::json::parse(read_input(a.input, io.in));
        auto g = graph_from_json(j);
        auto snap = load_snapshot(a.snapshot);
        auto annotated = annotate(g, snap.tokens);
        auto text = annotated.to_json().dump(2) + "\n";
        if (!a.out.empty()) {
            auto dir = out_dir(a.out);
            write_file(dir / "annotated_graph.json", text);
            write_file(dir / "popularity.csv",
                       popularity_csv(popularity_report(weak_components(g), snap.tokens)));
            ojson s;
            s["vertices"] = g.vertex_count();
            s["listed_vertices"] = annotated.listed_count();
            s["snapshot_rows"] = snap.tokens.size();
            s["duplicate_rows"] = snap.duplicate_rows;
            write_file(dir / "enrich_stats.json", s.dump(2));
        }
        else {
            io.out << text;
        }
        return 0;
    }

    // --- scenario ---------------------------------------------------------

    struct ScenarioArgs
    {
        std::string name;
        ScenarioParams params;
        std::string policy = "loose";
        std::string format = "jsonl";
        bool run = false;
        std::string out;
    };

    std::string scenario_jsonl(Scenario const &s)
    {
        std::string text;
        for (auto const &log : s.logs()) {
            text += to_jsonl_line(log);
            text += '\n';
        }
        return text;
    }

    ojson run_scenario_checks(Scenario const &s, PairingPolicy const &policy)
    {
        auto batches = group_by_tx(s.logs());
        auto detected = detect_all(batches, policy);
        auto const &expected = policy.mode == PairingMode::strict &&
                                       s.expected_strict_meta_events
                                   ? *s.expected_strict_meta_events
                                   : s.expected_meta_events;
        std::vector<std::string> failures;
        if (s.planted_pairs.empty()) {
            if (detected.events != expected) {
                failures.push_back("detected meta-events differ from ground truth");
            }
        }
        else {
            for (std::size_t i = 0; i < batches.size() && i < s.planted_pairs.size(); ++i) {
                if (detect(batches[i], policy).size() < s.planted_pairs[i]) {
                    failures.push_back("batch " + std::to_string(i) +
                                       " has fewer pairs than planted");
                }
            }
        }
        TokenGraphBuilder b;
        for (auto const &m : detected.events) {
            b.add(m);
        }
        auto unf = b.build(GraphMode::unfiltered);
        auto filt = b.build(GraphMode::filtered);
        if (policy.mode == PairingMode::loose) {
            for (auto &f : check_expectations(s.expected, unf, filt)) {
                failures.push_back(std::move(f));
            }
        }
        ojson r;
        r["scenario"] = s.name;
        r["policy"] = policy.mode == PairingMode::strict ? "strict" : "loose";
        r["batches"] = batches.size();
        r["transfers"] = s.transfer_count();
        r["meta_events"] = detected.events.size();
        r["unfiltered"] = {{"vertices", unf.vertex_count()}, {"edges", unf.edge_count()}};
        r["filtered"] = {{"vertices", filt.vertex_count()}, {"edges", filt.edge_count()}};
        r["failures"] = failures;
        r["ok"] = failures.empty();
        return r;
    }

    int run_scenario(ScenarioArgs const &a, Io io)
    {
        auto s = generate(a.name, a.params);
        PairingPolicy policy;
        policy.mode = parse_pairing_mode(a.policy);

        if (a.run) {
            auto r = run_scenario_checks(s, policy);
            auto text = r.dump(2) + "\n";
            if (!a.out.empty()) {
                write_file(out_dir(a.out) / "scenario_report.json", text);
            }
            else {
                io.out << text;
            }
            if (!r["ok"].get<bool>()) {
                throw CliError("scenario_failed", "scenario " + s.name + " failed its checks");
            }
            return 0;
        }
        if (!a.out.empty()) {
            auto dir = out_dir(a.out);
            write_file(dir / "logs.jsonl", scenario_jsonl(s));
            write_file(dir / "labels.json", pretty_labels(s.labels).dump(2));
            write_file(dir / "expected_meta_events.csv", meta_events_csv(s.expected_meta_events));
            return 0;
        }
        if (a.format == "jsonl") {
            io.out << scenario_jsonl(s);
        }
        else if (a.format == "csv") {
            io.out << with_newline(meta_events_csv(s.expected_meta_events));
        }
        else if (a.format == "json") {
            io.out << pretty_labels(s.labels).dump(2) << '\n';
        }
        else {
            throw CliError("usage_error", "scenario format must be jsonl, csv or json");
        }
        return 0;
    }

    // --- serve ------------------------------------------------------------

    struct ServeArgs
    {
        std::string input;
        std::string scenario;
        ScenarioParams params;
        std::string labels;
        std::string snapshot;
        std::string bind = "127.0.0.1:8080";
        std::string static_dir;
    };

    int run_serve(ServeArgs const &a, Io io)
    {
        std::vector<TokenisingMetaEvent> events;
        LabelMap labels;
        if (!a.scenario.empty()) {
            auto s = generate(a.scenario, a.params);
            events = detect_all(group_by_tx(s.logs())).events;
            labels = s.labels;
        }
        else {
            events = read_events(a.input, io.in);
        }
        for (auto const &[k, v] : gather_labels(a.labels, "")) {
            labels[k] = v;
        }
        MetadataMap metadata;
        if (!a.snapshot.empty()) {
            metadata = load_snapshot(a.snapshot).tokens;
        }
        auto snap = GraphSnapshot::from_meta_events(events, std::move(metadata),
                                                    std::move(labels));
        std::optional<std::string> static_dir;
        if (!a.static_dir.empty()) {
            static_dir = a.static_dir;
        }
        ExplorerServer server(ExplorerService(snap), static_dir);
        auto [host, port] = parse_bind_address(a.bind);
        int bound = server.bind(host, port);
        ojson ready;
        ready["listening"] = "http://" + host + ":" + std::to_string(bound);
        ready["etag"] = snap->etag();
        io.out << ready.dump() << std::endl;
        server.listen();
        return 0;
    }

    void error_json(std::ostream &err, std::string const &type, std::string const &message)
    {
        ojson j;
        j["error"] = {{"type", type}, {"message", message}};
        err << j.dump() << '\n';
    }

    void add_scenario_params(CLI::App *cmd, ScenarioParams &p)
    {
        cmd->add_option("--k", p.k, "Cycle length")->capture_default_str();
        cmd->add_option("--seed", p.seed, "Random seed")->capture_default_str();
        cmd->add_option("--size", p.size, "Random scenario batch count")->capture_default_str();
        cmd->add_option("--vertices", p.vertices, "Scale scenario vertices")
            ->capture_default_str();
        cmd->add_option("--edges", p.edges, "Scale scenario edges")->capture_default_str();
    }
}

int run_cli(std::vector<std::string> const &args, std::istream &in, std::ostream &out,
            std::ostream &err)
{
    CLI::App app{"Token graph pipeline: extract, detect, graph, analyze, enrich, "
                 "scenario, serve"};
    app.name("tokengraph");
    app.require_subcommand(1);

    ExtractArgs ex;
    auto *extract = app.add_subcommand("extract", "Fetch Transfer logs to JSONL");
    extract->add_option("--rpc-url", ex.rpc_url, "JSON-RPC endpoint (or TOKENGRAPH_RPC_URL)");
    extract->add_option("--stub", ex.stub, "Recorded stub provider file");
    extract->add_option("--from-block", ex.from_block)->required();
    extract->add_option("--to-block", ex.to_block)->required();
    extract->add_option("--chunk-size", ex.chunk_size)->capture_default_str();
    extract->add_option("--concurrency", ex.concurrency)->capture_default_str();
    extract->add_option("--max-retries", ex.max_retries)->capture_default_str();
    extract->add_flag("--skip-oversized", ex.skip_oversized);
    extract->add_option("--out", ex.out, "Output directory (default: stdout)");

    DetectArgs de;
    auto *detect_cmd = app.add_subcommand("detect", "JSONL logs to meta-event CSV");
    detect_cmd->add_option("input", de.input, "JSONL file or - for stdin");
    detect_cmd->add_option("--policy", de.policy)
        ->check(CLI::IsMember({"loose", "strict"}))
        ->capture_default_str();
    detect_cmd->add_flag("--no-self-wrap", de.no_self_wrap);
    detect_cmd->add_option("--max-events-per-tx", de.max_events_per_tx)
        ->capture_default_str();
    detect_cmd->add_flag("--strict-decode", de.strict_decode);
    detect_cmd->add_option("--out", de.out, "Output directory (default: stdout)");

    GraphArgs gr;
    auto *graph_cmd = app.add_subcommand("graph", "Meta-event CSV to token graph");
    graph_cmd->add_option("input", gr.input, "Meta-event CSV or - for stdin");
    graph_cmd->add_flag("--filtered", gr.filtered, "Keep two-way edges only");
    graph_cmd->add_option("--format", gr.format)
        ->check(CLI::IsMember({"json", "dot", "graphml"}))
        ->capture_default_str();
    graph_cmd->add_option("--labels", gr.labels, "JSON object of address labels");
    graph_cmd->add_option("--snapshot", gr.snapshot, "Metadata CSV for symbols");
    graph_cmd->add_option("--out", gr.out, "Output directory (default: stdout)");

    AnalyzeArgs an;
    auto *analyze = app.add_subcommand("analyze", "Graph JSON to reports");
    analyze->add_option("input", an.input, "Graph JSON or - for stdin");
    analyze->add_option("--top-k", an.top_k)->capture_default_str();
    analyze->add_flag("--condense", an.condense, "Longest path over the SCC condensation");
    analyze->add_flag("--longest-path", an.longest_path);
    analyze->add_flag("--scc", an.scc);
    analyze->add_flag("--degrees", an.degrees);
    analyze->add_flag("--components", an.components);
    analyze->add_flag("--top-edges", an.top_edges);
    analyze->add_option("--out", an.out, "Output directory for CSV/JSON reports");

    EnrichArgs en;
    auto *enrich = app.add_subcommand("enrich", "Join a metadata snapshot onto a graph");
    enrich->add_option("input", en.input, "Graph JSON or - for stdin");
    enrich->add_option("--snapshot", en.snapshot, "Metadata snapshot CSV")->required();
    enrich->add_option("--out", en.out, "Output directory (default: stdout)");

    ScenarioArgs sc;
    auto *scenario = app.add_subcommand("scenario", "Generate or run a synthetic scenario");
    scenario->add_option("name", sc.name)
        ->required()
        ->check(CLI::IsMember(scenario_names()));
    add_scenario_params(scenario, sc.params);
    scenario->add_option("--policy", sc.policy)
        ->check(CLI::IsMember({"loose", "strict"}))
        ->capture_default_str();
    scenario->add_option("--format", sc.format, "jsonl (logs), csv (expected events), json (labels)")
        ->check(CLI::IsMember({"jsonl", "csv", "json"}))
        ->capture_default_str();
    scenario->add_flag("--run", sc.run, "Run the pipeline and check ground truth");
    scenario->add_option("--out", sc.out, "Output directory (default: stdout)");

    ServeArgs sv;
    auto *serve = app.add_subcommand("serve", "Serve the explorer HTTP API");
    serve->add_option("input", sv.input, "Meta-event CSV or - for stdin");
    serve->add_option("--scenario", sv.scenario, "Serve a generated scenario instead")
        ->check(CLI::IsMember(scenario_names()));
    add_scenario_params(serve, sv.params);
    serve->add_option("--labels", sv.labels, "JSON object of address labels");
    serve->add_option("--snapshot", sv.snapshot, "Metadata snapshot CSV");
    serve->add_option("--bind", sv.bind, "host:port")->capture_default_str();
    serve->add_option("--static-dir", sv.static_dir, "UI assets served at /");

    std::vector<std::string> argv_store{"tokengraph"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : argv_store) {
        argv.push_back(s.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (CLI::CallForHelp const &e) {
        return app.exit(e, out, err);
    }
    catch (CLI::CallForAllHelp const &e) {
        return app.exit(e, out, err);
    }
    catch (CLI::ParseError const &e) {
        error_json(err, "usage_error", e.what());
        return 2;
    }

    Io io{in, out};
    try {
        if (*extract) {
            return run_extract(ex, io);
        }
        if (*detect_cmd) {
            return run_detect(de, io);
        }
        if (*graph_cmd) {
            return run_graph(gr, io);
        }
        if (*analyze) {
            return run_analyze(an, io);
        }
        if (*enrich) {
            return run_enrich(en, io);
        }
        if (*scenario) {
            return run_scenario(sc, io);
        }
        if (*serve) {
            return run_serve(sv, io);
        }
    }
    catch (CliError const &e) {
        error_json(err, e.type, e.what());
        return 1;
    }
    catch (ParseError const &e) {
        error_json(err, "parse_error", e.what());
        return 1;
    }
    catch (MalformedLogError const &e) {
        error_json(err, "malformed_log", e.what());
        return 1;
    }
    catch (OrderingError const &e) {
        error_json(err, "ordering_error", e.what());
        return 1;
    }
    catch (nlohmann::json::exception const &e) {
        error_json(err, "parse_error", e.what());
        return 1;
    }
    catch (std::invalid_argument const &e) {
        error_json(err, "invalid_argument", e.what());
        return 1;
    }
    catch (std::exception const &e) {
        error_json(err, "runtime_error", e.what());
        return 1;
    }
    return 1;
}

int run_cli(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cin, std::cout, std::cerr);
}

} // namespace tokengraph
