#include <tokengraph/graph_io.hpp>

#include <fstream>
#include <sstream>

namespace tokengraph
{

std::string vertex_label(Address const &a, LabelMap const &labels)
{
    auto it = labels.find(a);
    if (it != labels.end() && !it->second.empty()) {
        return it->second;
    }
    return short_address(a);
}

nlohmann::ordered_json edge_to_json(EdgeKey const &key, EdgeEvidence const &ev)
{
    nlohmann::ordered_json e;
    e["source"] = key.source.hex();
    e["target"] = key.target.hex();
    e["deposit_mint_count"] = ev.deposit_mint_count;
    e["withdraw_burn_count"] = ev.withdraw_burn_count;
    e["total_source_amount"] = to_decimal(ev.total_source_amount);
    e["total_target_amount"] = to_decimal(ev.total_target_amount);
    e["first_block"] = ev.first_block;
    e["last_block"] = ev.last_block;
    auto &samples = e["sample_txs"] = nlohmann::ordered_json::array();
    for (auto const &ref : ev.sample_txs) {
        samples.push_back({{"block_number", ref.block_number},
                           {"tx_hash", ref.tx_hash.hex()}});
    }
    return e;
}

nlohmann::ordered_json graph_to_json(TokenGraph const &graph, LabelMap const &labels)
{
    nlohmann::ordered_json j;
    j["mode"] = to_string(graph.mode());
    auto &vertices = j["vertices"] = nlohmann::ordered_json::array();
    for (auto const &v : graph.vertices()) {
        vertices.push_back(v.hex());
    }
    auto &edges = j["edges"] = nlohmann::ordered_json::array();
    for (auto const &[key, ev] : graph.edges()) {
        edges.push_back(edge_to_json(key, ev));
    }
    if (!labels.empty()) {
        auto &out = j["labels"] = nlohmann::ordered_json::object();
        for (auto const &v : graph.vertices()) {
            if (auto it = labels.find(v); it != labels.end()) {
                out[v.hex()] = it->second;
            }
        }
    }
    return j;
}

TokenGraph graph_from_json(nlohmann::json const &j)
{
    try {
        TokenGraph g(parse_graph_mode(j.at("mode").get<std::string>()));
        for (auto const &e : j.at("edges")) {
            EdgeEvidence ev;
            ev.deposit_mint_count = e.at("deposit_mint_count").get<uint64_t>();
            ev.withdraw_burn_count = e.at("withdraw_burn_count").get<uint64_t>();
            ev.total_source_amount =
                parse_decimal_uint256(e.value("total_source_amount", "0"));
            ev.total_target_amount =
                parse_decimal_uint256(e.value("total_target_amount", "0"));
            ev.first_block = e.value("first_block", uint64_t{0});
            ev.last_block = e.value("last_block", ev.first_block);
            if (auto s = e.find("sample_txs"); s != e.end()) {
                for (auto const &ref : *s) {
                    ev.sample_txs.push_back(
                        {ref.at("block_number").get<uint64_t>(),
                         Hash32::parse(ref.at("tx_hash").get<std::string>())});
                }
            }
            g.add_edge(
                Address::parse(e.at("source").get<std::string>()),
                Address::parse(e.at("target").get<std::string>()), ev);
        }
        for (auto const &v : j.at("vertices")) {
            if (!g.contains(Address::parse(v.get<std::string>()))) {
                throw ParseError("vertex " + v.get<std::string>() + " has no edges");
            }
        }
        return g;
    }
    catch (nlohmann::json::exception const &e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
    catch (std::invalid_argument const &e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
}

TokenGraph load_graph_json(std::string const &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    }
    catch (nlohmann::json::exception const &e) {
        throw ParseError(path + ": " + e.what());
    }
    return graph_from_json(j);
}

namespace
{
    std::string dot_quote(std::string_view s)
    {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') {
                out += '\\';
            }
            out += c;
        }
        out += '"';
        return out;
    }

    std::string xml_escape(std::string_view s)
    {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            case '\'':
                out += "&apos;";
                break;
            default:
                out += c;
            }
        }
        return out;
    }
}

std::string graph_to_dot(TokenGraph const &graph, LabelMap const &labels)
{
    std::ostringstream out;
    out << "digraph token_graph {\n";
    out << "  // mode: " << to_string(graph.mode()) << "\n";
    for (auto const &v : graph.vertices()) {
        out << "  " << dot_quote(v.hex())
            << " [label=" << dot_quote(vertex_label(v, labels)) << "];\n";
    }
    for (auto const &[key, ev] : graph.edges()) {
        out << "  " << dot_quote(key.source.hex()) << " -> "
            << dot_quote(key.target.hex()) << " [weight="
            << ev.meta_event_count() << ", deposit_mint="
            << ev.deposit_mint_count << ", withdraw_burn="
            << ev.withdraw_burn_count << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string graph_to_graphml(TokenGraph const &graph, LabelMap const &labels)
{
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"dm\" for=\"edge\" attr.name=\"deposit_mint_count\" attr.type=\"long\"/>\n"
        << "  <key id=\"wb\" for=\"edge\" attr.name=\"withdraw_burn_count\" attr.type=\"long\"/>\n"
        << "  <graph id=\"" << to_string(graph.mode())
        << "\" edgedefault=\"directed\">\n";
    for (auto const &v : graph.vertices()) {
        out << "    <node id=\"" << v.hex() << "\"><data key=\"label\">"
            << xml_escape(vertex_label(v, labels)) << "</data></node>\n";
    }
    std::size_t id = 0;
    for (auto const &[key, ev] : graph.edges()) {
        out << "    <edge id=\"e" << id++ << "\" source=\"" << key.source.hex()
            << "\" target=\"" << key.target.hex() << "\"><data key=\"dm\">"
            << ev.deposit_mint_count << "</data><data key=\"wb\">"
            << ev.withdraw_burn_count << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

} // namespace tokengraph
