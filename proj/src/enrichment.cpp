#include <tokengraph/enrichment.hpp>

#include <tokengraph/csv.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tokengraph
{

namespace
{
    bool valid_date(std::string_view d)
    {
        if (d.size() != 10 || d[4] != '-' || d[7] != '-') {
            return false;
        }
        for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
            if (d[i] < '0' || d[i] > '9') {
                return false;
            }
        }
        return true;
    }

    std::string format_cap(double v)
    {
        std::ostringstream out;
        out.precision(17);
        out << v;
        return out.str();
    }
}

Snapshot read_snapshot(std::istream &in)
{
    Snapshot snap;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != snapshot_csv_header) {
                throw ParseError("line 1: unexpected snapshot CSV header");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
        std::vector<std::string> f;
        try {
            f = split_csv_line(line);
        }
        catch (ParseError const &e) {
            throw ParseError(where() + e.what());
        }
        if (f.size() != 5) {
            throw ParseError(where() + "expected 5 fields");
        }
        TokenMetadata m;
        auto addr = Address::from_hex(f[0]);
        if (!addr) {
            throw ParseError(where() + "invalid token address '" + f[0] + "'");
        }
        m.token = *addr;
        if (!f[1].empty()) {
            m.symbol = f[1];
        }
        if (!f[2].empty()) {
            double cap = 0;
            auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), cap);
            if (ec != std::errc{} || p != f[2].data() + f[2].size() ||
                !std::isfinite(cap) || cap < 0) {
                throw ParseError(where() + "invalid market_cap_usd '" + f[2] + "'");
            }
            m.market_cap_usd = cap;
        }
        {
            auto const &s = f[3];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), m.pool_count);
            if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
                throw ParseError(where() + "invalid pool_count '" + s + "'");
            }
        }
        if (!valid_date(f[4])) {
            throw ParseError(where() + "invalid snapshot_date '" + f[4] + "'");
        }
        m.snapshot_date = f[4];
        auto [it, inserted] = snap.tokens.insert_or_assign(m.token, m);
        if (!inserted) {
            ++snap.duplicate_rows;
        }
    }
    return snap;
}

Snapshot load_snapshot(std::string const &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_snapshot(in);
}

std::string snapshot_csv(MetadataMap const &tokens)
{
    std::ostringstream out;
    out << snapshot_csv_header << '\n';
    for (auto const &[a, m] : tokens) {
        out << a.hex() << ',' << csv_escape(m.symbol.value_or("")) << ','
            << (m.market_cap_usd ? format_cap(*m.market_cap_usd) : "") << ','
            << m.pool_count << ',' << m.snapshot_date << '\n';
    }
    return out.str();
}

LabelMap labels_from(MetadataMap const &metadata)
{
    LabelMap labels;
    for (auto const &[a, m] : metadata) {
        if (m.symbol) {
            labels.emplace(a, *m.symbol);
        }
    }
    return labels;
}

AnnotatedGraph::AnnotatedGraph(TokenGraph const &graph, MetadataMap const &metadata)
    : graph_(&graph)
{
    for (auto const &v : graph.vertices()) {
        auto it = metadata.find(v);
        if (it != metadata.end()) {
            joined_.emplace(v, &it->second);
            ++listed_;
        }
    }
}

TokenMetadata const *AnnotatedGraph::metadata(Address const &v) const
{
    auto it = joined_.find(v);
    return it == joined_.end() ? nullptr : it->second;
}

LabelMap AnnotatedGraph::labels() const
{
    LabelMap labels;
    for (auto const &[a, m] : joined_) {
        if (m->symbol) {
            labels.emplace(a, *m->symbol);
        }
    }
    return labels;
}

nlohmann::ordered_json metadata_json(TokenMetadata const *m)
{
    nlohmann::ordered_json j;
    if (!m) {
        j["listed"] = false;
        return j;
    }
    j["listed"] = true;
    j["symbol"] = m->symbol ? nlohmann::ordered_json(*m->symbol) : nlohmann::ordered_json();
    j["market_cap_usd"] =
        m->market_cap_usd ? nlohmann::ordered_json(*m->market_cap_usd) : nlohmann::ordered_json();
    j["pool_count"] = m->pool_count;
    j["snapshot_date"] = m->snapshot_date;
    return j;
}

nlohmann::ordered_json AnnotatedGraph::to_json() const
{
    auto j = graph_to_json(*graph_, labels());
    auto &meta = j["metadata"] = nlohmann::ordered_json::object();
    for (auto const &v : graph_->vertices()) {
        meta[v.hex()] = metadata_json(metadata(v));
    }
    return j;
}

AnnotatedGraph annotate(TokenGraph const &graph, MetadataMap const &metadata)
{
    return AnnotatedGraph(graph, metadata);
}

std::vector<ComponentPopularity>
popularity_report(ComponentReport const &components, MetadataMap const &metadata)
{
    std::vector<ComponentPopularity> out;
    for (std::size_t i = 0; i < components.components.size(); ++i) {
        ComponentPopularity row{i, components.components[i].size(), 0, 0};
        for (auto const &v : components.components[i]) {
            auto it = metadata.find(v);
            if (it == metadata.end()) {
                continue;
            }
            row.listed_count += it->second.has_market_cap() ? 1 : 0;
            row.pooled_count += it->second.pooled() ? 1 : 0;
        }
        out.push_back(row);
    }
    return out;
}

std::string popularity_csv(std::vector<ComponentPopularity> const &rows)
{
    std::ostringstream out;
    out << "component_id,size,listed_count,pooled_count\n";
    for (auto const &r : rows) {
        out << r.component_id << ',' << r.size << ',' << r.listed_count << ','
            << r.pooled_count << '\n';
    }
    return out.str();
}

} // namespace tokengraph
