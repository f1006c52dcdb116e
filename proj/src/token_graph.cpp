#include <tokengraph/token_graph.hpp>

#include <algorithm>

namespace tokengraph
{

std::string_view to_string(GraphMode mode)
{
    return mode == GraphMode::filtered ? "filtered" : "unfiltered";
}

GraphMode parse_graph_mode(std::string_view text)
{
    if (text == "filtered") {
        return GraphMode::filtered;
    }
    if (text == "unfiltered") {
        return GraphMode::unfiltered;
    }
    throw std::invalid_argument(
        "mode must be 'filtered' or 'unfiltered', got '" + std::string(text) +
        "'");
}

UnknownVertexError::UnknownVertexError(Address const &a)
    : std::runtime_error("unknown vertex " + a.hex())
    , vertex(a)
{
}

namespace
{
    void add_sample(std::vector<TxRef> &samples, TxRef const &ref)
    {
        auto it = std::lower_bound(samples.begin(), samples.end(), ref);
        if (it != samples.end() && *it == ref) {
            return;
        }
        if (samples.size() >= EdgeEvidence::default_sample_cap &&
            it == samples.end()) {
            return;
        }
        samples.insert(it, ref);
        if (samples.size() > EdgeEvidence::default_sample_cap) {
            samples.pop_back();
        }
    }
}

void EdgeEvidence::add(TokenisingMetaEvent const &event)
{
    bool const first = meta_event_count() == 0;
    if (event.action == ActionKind::deposit_and_mint) {
        ++deposit_mint_count;
    }
    else {
        ++withdraw_burn_count;
    }
    total_source_amount += event.source_amount;
    total_target_amount += event.target_amount;
    add_sample(sample_txs, {event.block_number, event.tx_hash});
    if (first) {
        first_block = last_block = event.block_number;
    }
    else {
        first_block = std::min(first_block, event.block_number);
        last_block = std::max(last_block, event.block_number);
    }
}

void EdgeEvidence::merge(EdgeEvidence const &other)
{
    if (other.meta_event_count() == 0) {
        return;
    }
    bool const first = meta_event_count() == 0;
    deposit_mint_count += other.deposit_mint_count;
    withdraw_burn_count += other.withdraw_burn_count;
    total_source_amount += other.total_source_amount;
    total_target_amount += other.total_target_amount;
    for (auto const &ref : other.sample_txs) {
        add_sample(sample_txs, ref);
    }
    if (first) {
        first_block = other.first_block;
        last_block = other.last_block;
    }
    else {
        first_block = std::min(first_block, other.first_block);
        last_block = std::max(last_block, other.last_block);
    }
}

EdgeEvidence const *TokenGraph::find_edge(Address const &s, Address const &t) const
{
    auto it = edges_.find({s, t});
    return it == edges_.end() ? nullptr : &it->second;
}

void TokenGraph::add_edge(
    Address const &source, Address const &target, EdgeEvidence const &evidence)
{
    if (evidence.meta_event_count() == 0) {
        throw std::invalid_argument("edge evidence must hold at least one meta-event");
    }
    auto &slot = edges_[{source, target}];
    slot.merge(evidence);
    if (mode_ == GraphMode::filtered && !slot.two_way()) {
        edges_.erase({source, target});
        throw std::invalid_argument(
            "filtered graph edge needs both deposit & mint and withdraw & burn "
            "evidence");
    }
    vertices_.insert(source);
    vertices_.insert(target);
}

TokenGraph TokenGraph::from_edge_list(
    std::vector<std::pair<Address, Address>> const &edges, GraphMode mode)
{
    TokenGraph g(mode);
    EdgeEvidence ev;
    ev.deposit_mint_count = 1;
    ev.withdraw_burn_count = 1;
    for (auto const &[s, t] : edges) {
        if (!g.find_edge(s, t)) {
            g.add_edge(s, t, ev);
        }
    }
    return g;
}

void TokenGraphBuilder::add(TokenisingMetaEvent const &event)
{
    ++events_;
    edges_[{event.source_token, event.target_token}].add(event);
}

TokenGraph TokenGraphBuilder::build(GraphMode mode) const
{
    TokenGraph g(mode);
    for (auto const &[key, ev] : edges_) {
        if (mode == GraphMode::filtered && !ev.two_way()) {
            continue;
        }
        g.add_edge(key.source, key.target, ev);
    }
    return g;
}

TokenGraph build(std::vector<TokenisingMetaEvent> const &events, GraphMode mode)
{
    TokenGraphBuilder builder;
    for (auto const &m : events) {
        builder.add(m);
    }
    return builder.build(mode);
}

TokenGraph subgraph(TokenGraph const &graph, std::set<Address> const &vertices)
{
    for (auto const &v : vertices) {
        if (!graph.contains(v)) {
            throw UnknownVertexError(v);
        }
    }
    TokenGraph out(graph.mode());
    for (auto const &[key, ev] : graph.edges()) {
        if (vertices.contains(key.source) && vertices.contains(key.target)) {
            out.add_edge(key.source, key.target, ev);
        }
    }
    return out;
}

} // namespace tokengraph
