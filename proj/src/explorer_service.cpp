#include <tokengraph/explorer_service.hpp>

#include <tokengraph/keccak.hpp>

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

namespace tokengraph
{

using ojson = nlohmann::ordered_json;

namespace
{
    void fill_view(GraphSnapshot::ModeView &v)
    {
        v.components = weak_components(v.graph);
        v.membership = v.components.membership();
        for (auto const &d : degree_table(v.graph)) {
            v.degrees.emplace(d.token, d);
        }
        for (auto const &[key, ev] : v.graph.edges()) {
            v.neighbours[key.source].push_back(key.target);
            if (key.source != key.target) {
                v.neighbours[key.target].push_back(key.source);
            }
        }
        for (auto &[a, list] : v.neighbours) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        v.strong = strong_components(v.graph);
    }

    struct ApiError
    {
        int status;
        std::string message;
    };

    HttpResponse json_response(int status, ojson const &body, std::string const &etag)
    {
        HttpResponse r;
        r.status = status;
        r.body = body.dump() + "\n";
        r.etag = etag;
        return r;
    }

    GraphMode mode_param(QueryParams const &params)
    {
        auto it = params.find("mode");
        if (it == params.end() || it->second.empty()) {
            return GraphMode::unfiltered;
        }
        try {
            return parse_graph_mode(it->second);
        }
        catch (std::exception const &) {
            throw ApiError{400, "mode must be 'unfiltered' or 'filtered'"};
        }
    }

    std::size_t size_param(QueryParams const &params, std::string const &name,
                           std::size_t fallback, std::size_t lo, std::size_t hi)
    {
        auto it = params.find(name);
        if (it == params.end() || it->second.empty()) {
            return fallback;
        }
        auto const &s = it->second;
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || v < lo || v > hi) {
            throw ApiError{400, name + " must be an integer in [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]"};
        }
        return v;
    }

    bool bool_param(QueryParams const &params, std::string const &name)
    {
        auto it = params.find(name);
        if (it == params.end() || it->second.empty()) {
            return false;
        }
        if (it->second == "true" || it->second == "1") {
            return true;
        }
        if (it->second == "false" || it->second == "0") {
            return false;
        }
        throw ApiError{400, name + " must be true or false"};
    }

    std::string lower(std::string_view s)
    {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return out;
    }

    class Handler
    {
    public:
        Handler(GraphSnapshot const &snap, QueryParams const &params)
            : snap_(snap)
            , params_(params)
        {
        }

        ojson summary() const
        {
            ojson j;
            for (auto mode : {GraphMode::unfiltered, GraphMode::filtered}) {
                auto const &v = snap_.view(mode);
                std::size_t listed = 0;
                for (auto const &a : v.graph.vertices()) {
                    listed += snap_.metadata().contains(a) ? 1 : 0;
                }
                j[std::string(to_string(mode))] = {
                    {"vertices", v.graph.vertex_count()},
                    {"edges", v.graph.edge_count()},
                    {"weak_components", v.components.components.size()},
                    {"nontrivial_strong_components", v.strong.nontrivial.size()},
                    {"loops", v.strong.loops.size()},
                    {"listed_vertices", listed},
                };
            }
            return j;
        }

        ojson components() const
        {
            auto mode = mode_param(params_);
            auto min_size = size_param(params_, "min_size", 1, 1, SIZE_MAX);
            auto page = size_param(params_, "page", 0, 0, 1u << 30);
            auto page_size = size_param(params_, "page_size", 50, 1, 500);
            auto const &v = snap_.view(mode);
            auto popularity = popularity_report(v.components, snap_.metadata());

            std::vector<std::size_t> ids;
            for (std::size_t i = 0; i < v.components.components.size(); ++i) {
                if (v.components.components[i].size() >= min_size) {
                    ids.push_back(i);
                }
            }
            ojson j;
            j["mode"] = to_string(mode);
            j["total"] = ids.size();
            j["page"] = page;
            j["page_size"] = page_size;
            auto &list = j["components"] = ojson::array();
            for (std::size_t k = page * page_size;
                 k < ids.size() && k < (page + 1) * page_size; ++k) {
                auto id = ids[k];
                auto const &members = v.components.components[id];
                ojson c;
                c["id"] = id;
                c["size"] = members.size();
                c["listed_count"] = popularity[id].listed_count;
                c["pooled_count"] = popularity[id].pooled_count;
                auto &preview = c["preview"] = ojson::array();
                for (std::size_t m = 0; m < members.size() && m < 8; ++m) {
                    preview.push_back({{"address", members[m].hex()},
                                       {"label", vertex_label(members[m], snap_.labels())}});
                }
                list.push_back(std::move(c));
            }
            return j;
        }

        ojson component(std::string_view id_text) const
        {
            auto mode = mode_param(params_);
            std::size_t id = 0;
            auto [p, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
            if (id_text.empty() || ec != std::errc{} || p != id_text.data() + id_text.size()) {
                throw ApiError{400, "component id must be a non-negative integer"};
            }
            auto const &v = snap_.view(mode);
            if (id >= v.components.components.size()) {
                throw ApiError{404, "no component " + std::to_string(id)};
            }
            auto const &members = v.components.components[id];
            auto j = induced(mode, std::set<Address>(members.begin(), members.end()));
            j["id"] = id;
            j["size"] = members.size();
            return j;
        }

        ojson token(std::string_view key) const
        {
            auto mode = mode_param(params_);
            auto a = resolve(key);
            auto const &v = snap_.view(mode);
            if (!v.graph.contains(a)) {
                throw ApiError{404, "token " + a.hex() + " is not in the " +
                                        std::string(to_string(mode)) + " graph"};
            }
            ojson j;
            j["mode"] = to_string(mode);
            j["address"] = a.hex();
            j["label"] = vertex_label(a, snap_.labels());
            auto it = snap_.metadata().find(a);
            j["metadata"] = metadata_json(it == snap_.metadata().end() ? nullptr : &it->second);
            auto const &d = v.degrees.at(a);
            j["in_degree"] = d.in_degree;
            j["out_degree"] = d.out_degree;
            j["component_id"] = v.membership.at(a);
            auto in = ojson::array();
            auto out = ojson::array();
            for (auto const &[k, ev] : v.graph.edges()) {
                if (k.target == a) {
                    in.push_back(edge_to_json(k, ev));
                }
                if (k.source == a) {
                    out.push_back(edge_to_json(k, ev));
                }
            }
            j["in_edges"] = std::move(in);
            j["out_edges"] = std::move(out);
            return j;
        }

        ojson neighbourhood(std::string_view key) const
        {
            auto mode = mode_param(params_);
            auto depth = size_param(params_, "depth", 1, 0, ExplorerService::max_depth);
            auto a = resolve(key);
            auto const &v = snap_.view(mode);
            if (!v.graph.contains(a)) {
                throw ApiError{404, "token " + a.hex() + " is not in the " +
                                        std::string(to_string(mode)) + " graph"};
            }
            // Breadth-first over undirected adjacency, neighbours in address
            // order, stopping at the vertex cap.
            std::set<Address> ball{a};
            std::deque<std::pair<Address, std::size_t>> queue{{a, 0}};
            bool truncated = false;
            while (!queue.empty() && !truncated) {
                auto [u, d] = queue.front();
                queue.pop_front();
                if (d == depth) {
                    continue;
                }
                auto it = v.neighbours.find(u);
                if (it == v.neighbours.end()) {
                    continue;
                }
                for (auto const &w : it->second) {
                    if (ball.contains(w)) {
                        continue;
                    }
                    if (ball.size() >= ExplorerService::neighbourhood_cap) {
                        truncated = true;
                        break;
                    }
                    ball.insert(w);
                    queue.emplace_back(w, d + 1);
                }
            }
            auto j = induced(mode, ball);
            j["center"] = a.hex();
            j["depth"] = depth;
            j["truncated"] = truncated;
            return j;
        }

        ojson top_edges_json() const
        {
            auto mode = mode_param(params_);
            auto k = size_param(params_, "k", 10, 1, 10000);
            ojson j;
            j["mode"] = to_string(mode);
            j["k"] = k;
            auto &list = j["edges"] = ojson::array();
            std::size_t rank = 0;
            for (auto const &[key, ev] : top_edges(snap_.view(mode).graph, k)) {
                ojson e;
                e["rank"] = ++rank;
                e["source_label"] = vertex_label(key.source, snap_.labels());
                e["target_label"] = vertex_label(key.target, snap_.labels());
                e["meta_event_count"] = ev.meta_event_count();
                e.update(edge_to_json(key, ev));
                list.push_back(std::move(e));
            }
            return j;
        }

        std::pair<int, ojson> longest() const
        {
            auto mode = mode_param(params_);
            bool condense = bool_param(params_, "condense");
            auto const &g = snap_.view(mode).graph;
            ojson j;
            j["mode"] = to_string(mode);
            j["condensed"] = condense;
            auto vertex = [&](Address const &a) {
                return ojson{{"address", a.hex()}, {"label", vertex_label(a, snap_.labels())}};
            };
            if (condense) {
                auto c = condensation(g);
                auto path = longest_path(c);
                j["length"] = path.length();
                auto &vs = j["vertices"] = ojson::array();
                for (auto const &r : path.vertices) {
                    auto entry = vertex(r);
                    auto &members = entry["members"] = ojson::array();
                    for (auto const &m : c.members.at(r)) {
                        members.push_back(m.hex());
                    }
                    vs.push_back(std::move(entry));
                }
                return {200, j};
            }
            try {
                auto path = longest_path(g);
                j["length"] = path.length();
                auto &vs = j["vertices"] = ojson::array();
                for (auto const &a : path.vertices) {
                    vs.push_back(vertex(a));
                }
                return {200, j};
            }
            catch (CyclicGraphError const &e) {
                ojson err;
                err["error"] = {{"status", 409},
                                {"message", "graph is cyclic; retry with condense=true"}};
                auto &scc = err["scc"] = ojson::array();
                for (auto const &a : e.scc) {
                    scc.push_back(a.hex());
                }
                return {409, err};
            }
        }

        ojson search() const
        {
            auto it = params_.find("q");
            if (it == params_.end() || it->second.empty()) {
                throw ApiError{400, "q is required"};
            }
            auto limit = size_param(params_, "limit", 50, 1, 1000);
            auto q = lower(it->second);
            auto hex_q = q.starts_with("0x") ? q.substr(2) : q;
            bool hex_ok = !hex_q.empty() && hex_q.size() <= 40 &&
                          std::all_of(hex_q.begin(), hex_q.end(), is_hex_digit);

            std::set<Address> all = snap_.view(GraphMode::unfiltered).graph.vertices();
            for (auto const &a : snap_.view(GraphMode::filtered).graph.vertices()) {
                all.insert(a);
            }
            ojson j;
            j["query"] = it->second;
            auto &results = j["results"] = ojson::array();
            for (auto const &a : all) {
                bool match = hex_ok && a.hex().compare(2, hex_q.size(), hex_q) == 0;
                if (!match) {
                    auto l = snap_.labels().find(a);
                    match = l != snap_.labels().end() &&
                            lower(l->second).find(q) != std::string::npos;
                }
                if (!match) {
                    continue;
                }
                if (results.size() == limit) {
                    j["truncated"] = true;
                    break;
                }
                results.push_back(
                    {{"address", a.hex()},
                     {"label", vertex_label(a, snap_.labels())},
                     {"in_unfiltered", snap_.view(GraphMode::unfiltered).graph.contains(a)},
                     {"in_filtered", snap_.view(GraphMode::filtered).graph.contains(a)}});
            }
            if (!j.contains("truncated")) {
                j["truncated"] = false;
            }
            return j;
        }

    private:
        // Full address, or a label naming exactly one vertex.
        Address resolve(std::string_view key) const
        {
            if (auto a = Address::from_hex(key)) {
                return *a;
            }
            std::optional<Address> found;
            for (auto const &[a, label] : snap_.labels()) {
                if (label == key) {
                    if (found) {
                        throw ApiError{400, "label '" + std::string(key) +
                                                "' is ambiguous; use the address"};
                    }
                    found = a;
                }
            }
            if (!found) {
                throw ApiError{404, "unknown token '" + std::string(key) + "'"};
            }
            return *found;
        }

        ojson induced(GraphMode mode, std::set<Address> const &vertices) const
        {
            auto const &v = snap_.view(mode);
            ojson j;
            j["mode"] = to_string(mode);
            // Filled separately: ordered_json keeps members in a vector, so
            // references into j do not survive later insertions.
            auto vs = ojson::array();
            auto labels = ojson::object();
            auto meta = ojson::object();
            auto degrees = ojson::object();
            for (auto const &a : vertices) {
                vs.push_back(a.hex());
                labels[a.hex()] = vertex_label(a, snap_.labels());
                auto it = snap_.metadata().find(a);
                meta[a.hex()] =
                    metadata_json(it == snap_.metadata().end() ? nullptr : &it->second);
                auto const &d = v.degrees.at(a);
                degrees[a.hex()] = {{"in", d.in_degree}, {"out", d.out_degree}};
            }
            j["vertices"] = std::move(vs);
            j["labels"] = std::move(labels);
            j["metadata"] = std::move(meta);
            j["degrees"] = std::move(degrees);
            auto &es = j["edges"] = ojson::array();
            for (auto const &[k, ev] : v.graph.edges()) {
                if (vertices.contains(k.source) && vertices.contains(k.target)) {
                    es.push_back(edge_to_json(k, ev));
                }
            }
            return j;
        }

        GraphSnapshot const &snap_;
        QueryParams const &params_;
    };

    std::string content_hash(TokenGraph const &u, TokenGraph const &f,
                             MetadataMap const &metadata, LabelMap const &labels)
    {
        std::string blob = graph_to_json(u, labels).dump();
        blob += graph_to_json(f).dump();
        blob += snapshot_csv(metadata);
        auto h = keccak256(blob);
        return "\"" + h.hex().substr(2, 32) + "\"";
    }

    constexpr char const *builtin_index = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>Token graph explorer</title></head>
<body>
<h1>Token graph explorer API</h1>
<ul>
<li><a href="/api/summary">/api/summary</a></li>
<li><a href="/api/components">/api/components?mode=&amp;min_size=&amp;page=</a></li>
<li>/api/component/{id}?mode=</li>
<li>/api/token/{address}?mode=</li>
<li>/api/neighborhood/{address}?mode=&amp;depth=</li>
<li><a href="/api/edges/top">/api/edges/top?mode=&amp;k=</a></li>
<li><a href="/api/longest-path?condense=true">/api/longest-path?mode=&amp;condense=</a></li>
<li>/api/search?q=</li>
</ul>
</body></html>
)";
}

std::shared_ptr<GraphSnapshot const>
GraphSnapshot::from_graphs(TokenGraph unfiltered, TokenGraph filtered,
                           MetadataMap metadata, LabelMap labels)
{
    if (unfiltered.mode() != GraphMode::unfiltered ||
        filtered.mode() != GraphMode::filtered) {
        throw std::invalid_argument("snapshot needs an unfiltered and a filtered graph");
    }
    std::shared_ptr<GraphSnapshot> s(new GraphSnapshot());
    s->unfiltered_.graph = std::move(unfiltered);
    s->filtered_.graph = std::move(filtered);
    fill_view(s->unfiltered_);
    fill_view(s->filtered_);
    for (auto const &[a, label] : labels_from(metadata)) {
        labels[a] = label;
    }
    s->etag_ = content_hash(s->unfiltered_.graph, s->filtered_.graph, metadata, labels);
    s->metadata_ = std::move(metadata);
    s->labels_ = std::move(labels);
    return s;
}

std::shared_ptr<GraphSnapshot const>
GraphSnapshot::from_meta_events(std::vector<TokenisingMetaEvent> const &events,
                                MetadataMap metadata, LabelMap labels)
{
    TokenGraphBuilder b;
    for (auto const &e : events) {
        b.add(e);
    }
    return from_graphs(b.build(GraphMode::unfiltered), b.build(GraphMode::filtered),
                       std::move(metadata), std::move(labels));
}

ExplorerService::ExplorerService(std::shared_ptr<GraphSnapshot const> snapshot)
    : snapshot_(std::move(snapshot))
{
}

HttpResponse ExplorerService::handle(std::string_view path, QueryParams const &params) const
{
    auto const &etag = snapshot_->etag();
    Handler h(*snapshot_, params);
    auto tail = [&](std::string_view prefix) -> std::optional<std::string_view> {
        if (path.starts_with(prefix) && path.size() > prefix.size()) {
            auto rest = path.substr(prefix.size());
            if (rest.find('/') == std::string_view::npos) {
                return rest;
            }
        }
        return std::nullopt;
    };
    try {
        if (path == "/api/summary") {
            return json_response(200, h.summary(), etag);
        }
        if (path == "/api/components") {
            return json_response(200, h.components(), etag);
        }
        if (auto id = tail("/api/component/")) {
            return json_response(200, h.component(*id), etag);
        }
        if (auto key = tail("/api/token/")) {
            return json_response(200, h.token(*key), etag);
        }
        if (auto key = tail("/api/neighborhood/")) {
            return json_response(200, h.neighbourhood(*key), etag);
        }
        if (path == "/api/edges/top") {
            return json_response(200, h.top_edges_json(), etag);
        }
        if (path == "/api/longest-path") {
            auto [status, body] = h.longest();
            return json_response(status, body, etag);
        }
        if (path == "/api/search") {
            return json_response(200, h.search(), etag);
        }
        throw ApiError{404, "no such endpoint " + std::string(path)};
    }
    catch (ApiError const &e) {
        ojson body;
        body["error"] = {{"status", e.status}, {"message", e.message}};
        return json_response(e.status, body, etag);
    }
}

struct ExplorerServer::Impl
{
    explicit Impl(ExplorerService s)
        : service(std::move(s))
    {
    }

    ExplorerService service;
    httplib::Server server;
};

ExplorerServer::ExplorerServer(ExplorerService service, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(std::move(service)))
{
    auto &srv = impl_->server;
    auto *svc = &impl_->service;
    srv.Get(R"(/api/.*)", [svc](httplib::Request const &req, httplib::Response &res) {
        QueryParams params;
        for (auto const &[k, v] : req.params) {
            params[k] = v; // last value wins
        }
        auto r = svc->handle(req.path, params);
        res.set_header("ETag", r.etag);
        res.set_header("Cache-Control", "no-cache");
        if (r.status == 200 && req.get_header_value("If-None-Match") == r.etag) {
            res.status = 304;
            return;
        }
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    });
    if (static_dir) {
        if (!srv.set_mount_point("/", *static_dir)) {
            throw std::runtime_error("static directory not found: " + *static_dir);
        }
    }
    else {
        srv.Get("/", [](httplib::Request const &, httplib::Response &res) {
            res.set_content(builtin_index, "text/html");
        });
    }
}

ExplorerServer::~ExplorerServer()
{
    stop();
}

int ExplorerServer::bind(std::string const &host, int port)
{
    if (port == 0) {
        int p = impl_->server.bind_to_any_port(host);
        if (p < 0) {
            throw std::runtime_error("cannot bind " + host);
        }
        return p;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void ExplorerServer::listen()
{
    impl_->server.listen_after_bind();
}

void ExplorerServer::stop()
{
    if (impl_) {
        impl_->server.stop();
    }
}

std::pair<std::string, int> parse_bind_address(std::string const &text)
{
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        return {text.empty() ? "127.0.0.1" : text, 8080};
    }
    int port = 0;
    auto ps = std::string_view(text).substr(colon + 1);
    auto [p, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), port);
    if (ps.empty() || ec != std::errc{} || p != ps.data() + ps.size() || port < 0 ||
        port > 65535) {
        throw std::invalid_argument("invalid bind address '" + text + "'");
    }
    auto host = text.substr(0, colon);
    return {host.empty() ? "127.0.0.1" : host, port};
}

} // namespace tokengraph
