#pragma once

#include <tokengraph/token_graph.hpp>

#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace tokengraph
{

// Display labels (token symbols) keyed by address. Labels never affect
// vertex identity.
using LabelMap = std::map<Address, std::string>;

// Symbol when known, otherwise the short address.
std::string vertex_label(Address const &a, LabelMap const &labels);

nlohmann::ordered_json edge_to_json(EdgeKey const &key, EdgeEvidence const &ev);

// {mode, vertices:[...], edges:[{source, target, deposit_mint_count, ...}]}
// plus a "labels" object when labels are supplied.
nlohmann::ordered_json graph_to_json(
    TokenGraph const &graph, LabelMap const &labels = {});
TokenGraph graph_from_json(nlohmann::json const &j);
TokenGraph load_graph_json(std::string const &path);

std::string graph_to_dot(TokenGraph const &graph, LabelMap const &labels = {});
std::string graph_to_graphml(TokenGraph const &graph, LabelMap const &labels = {});

} // namespace tokengraph
