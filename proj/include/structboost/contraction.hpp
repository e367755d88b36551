#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "structboost/errors.hpp"
#include "structboost/graph.hpp"
#include "structboost/vertex_set.hpp"

namespace structboost {

// A graph obtained from an original graph by edge contractions, together
// with the original vertices each super-vertex absorbed. Super-vertex 0
// always contains original vertex 0.
struct ContractionState {
  StructureGraph current;
  std::vector<VertexSet> merge_map;  // per super-vertex, over the original graph
  std::shared_ptr<const std::vector<std::string>> original_labels;

  static ContractionState identity(const StructureGraph& g) {
    ContractionState s;
    s.current = g;
    s.merge_map.reserve(g.num_vertices());
    for (std::size_t v = 0; v < g.num_vertices(); ++v) s.merge_map.emplace_back(g.num_vertices(), std::initializer_list<std::size_t>{v});
    s.original_labels = std::make_shared<const std::vector<std::string>>(g.labels());
    return s;
  }

  std::size_t original_size() const { return original_labels ? original_labels->size() : 0; }
};

namespace detail {

inline std::string merged_label(const VertexSet& members, const std::vector<std::string>& labels) {
  std::vector<std::string> parts;
  members.for_each([&](std::size_t v) { parts.push_back(labels[v]); });
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '+';
    out += p;
  }
  return out;
}

}  // namespace detail

// Identifies the endpoints of edge `e` of state.current and drops the self
// loop and parallel edges this creates. The merged super-vertex takes the
// lower of the two positions; vertices after the higher one shift down.
inline ContractionState contract_edge(const ContractionState& state, Edge e) {
  const StructureGraph& g = state.current;
  auto [a, b] = e;
  if (a > b) std::swap(a, b);
  if (!g.has_edge(a, b))
    throw EdgeNotFound("(" + std::to_string(a) + ", " + std::to_string(b) + ") is not an edge of the current graph");

  const std::size_t n = g.num_vertices();
  auto remap = [&](std::size_t v) { return v == b ? a : (v > b ? v - 1 : v); };

  ContractionState next;
  next.original_labels = state.original_labels;
  next.merge_map.reserve(n - 1);
  std::vector<std::string> labels;
  labels.reserve(n - 1);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == b) continue;
    next.merge_map.push_back(v == a ? state.merge_map[a] | state.merge_map[b] : state.merge_map[v]);
    labels.push_back(v == a ? detail::merged_label(next.merge_map.back(), *state.original_labels) : g.label(v));
  }

  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (auto [x, y] : g.edges()) {
    auto nx = remap(x), ny = remap(y);
    if (nx == ny) continue;
    edges.emplace_back(std::min(nx, ny), std::max(nx, ny));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  next.current = StructureGraph::from_indices(std::move(labels), edges);
  return next;
}

inline ContractionState contract_edge(const ContractionState& state, const std::string& a, const std::string& b) {
  auto ia = state.current.find(a);
  auto ib = state.current.find(b);
  if (!ia || !ib) throw EdgeNotFound("'" + a + "'-'" + b + "' is not an edge of the current graph");
  return contract_edge(state, Edge{*ia, *ib});
}

// Checks that the merge map partitions the original vertex set.
inline bool merge_map_is_partition(const ContractionState& s) {
  const std::size_t n = s.original_size();
  if (s.merge_map.size() != s.current.num_vertices()) return false;
  VertexSet seen(n);
  for (const auto& m : s.merge_map) {
    if (m.width() != n || m.empty() || m.intersects(seen)) return false;
    seen |= m;
  }
  return seen == VertexSet::full(n);
}

}  // namespace structboost
