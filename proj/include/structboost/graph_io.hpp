#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "structboost/errors.hpp"
#include "structboost/graph.hpp"

namespace structboost {

// Graph documents are JSON objects with exactly two keys:
//
//   {
//     "vertices": ["a", "b", "c"],
//     "edges": [
//       ["a", "b"],
//       ["b", "c"]
//     ]
//   }
//
// save_graph writes this canonical layout (edges sorted by vertex position),
// so save_graph(load_graph(x)) == x for any canonical document x.

inline StructureGraph graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("graph document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "vertices" && key != "edges") throw ParseError("unknown key '" + key + "' in graph document");
  }
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError("graph document needs a 'vertices' array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw ParseError("graph document needs an 'edges' array");

  std::vector<std::string> labels;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw ParseError("vertex labels must be strings");
    labels.push_back(v.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ParseError("each edge must be a pair of vertex labels");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return StructureGraph::from_labels(std::move(labels), edges);
}

inline StructureGraph load_graph(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
  return graph_from_json(doc);
}

inline StructureGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graph file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_graph(ss.str());
}

inline nlohmann::json graph_to_json(const StructureGraph& g) {
  nlohmann::json doc;
  doc["vertices"] = g.labels();
  auto edges = nlohmann::json::array();
  for (auto [a, b] : g.edges()) edges.push_back({g.label(a), g.label(b)});
  doc["edges"] = std::move(edges);
  return doc;
}

inline std::string save_graph(const StructureGraph& g) {
  std::string out = "{\n  \"vertices\": [";
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (v) out += ", ";
    out += nlohmann::json(g.label(v)).dump();
  }
  out += "],\n  \"edges\": [";
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out += i ? ",\n    [" : "\n    [";
    out += nlohmann::json(g.label(edges[i].first)).dump();
    out += ", ";
    out += nlohmann::json(g.label(edges[i].second)).dump();
    out += "]";
  }
  out += edges.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace structboost
