#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "structboost/errors.hpp"
#include "structboost/vertex_set.hpp"

namespace structboost {

using Edge = std::pair<std::size_t, std::size_t>;

// Vertex-labeled simple connected undirected graph describing which values
// of a categorical variable are neighbors. Vertices are indexed in the order
// they were supplied; every VertexSet over this graph uses that indexing.
// Immutable once built.
class StructureGraph {
 public:
  StructureGraph() = default;

  // Validates and builds. Edges are label pairs; throws ValidationError on
  // empty or duplicate labels, unknown endpoints, self-loops, duplicate
  // edges, or a disconnected result.
  static StructureGraph from_labels(std::vector<std::string> labels,
                                    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty()) throw ValidationError("vertex " + std::to_string(i) + " has an empty label");
      if (!index.emplace(labels[i], i).second)
        throw ValidationError("duplicate vertex label '" + labels[i] + "'");
    }
    std::vector<Edge> idx_edges;
    idx_edges.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      auto ia = index.find(a);
      auto ib = index.find(b);
      if (ia == index.end()) throw ValidationError("edge endpoint '" + a + "' is not a vertex");
      if (ib == index.end()) throw ValidationError("edge endpoint '" + b + "' is not a vertex");
      idx_edges.emplace_back(ia->second, ib->second);
    }
    return from_indices(std::move(labels), idx_edges);
  }

  static StructureGraph from_indices(std::vector<std::string> labels, const std::vector<Edge>& edges) {
    StructureGraph g;
    g.labels_ = std::move(labels);
    const std::size_t n = g.labels_.size();
    if (n == 0) throw ValidationError("graph has no vertices");
    for (std::size_t i = 0; i < n; ++i) {
      if (g.labels_[i].empty()) throw ValidationError("vertex " + std::to_string(i) + " has an empty label");
      if (!g.index_.emplace(g.labels_[i], i).second)
        throw ValidationError("duplicate vertex label '" + g.labels_[i] + "'");
    }
    g.adjacency_.assign(n, {});
    for (auto [a, b] : edges) {
      if (a >= n || b >= n) throw ValidationError("edge endpoint out of range");
      if (a == b) throw ValidationError("self-loop on '" + g.labels_[a] + "'");
      g.adjacency_[a].push_back(b);
      g.adjacency_[b].push_back(a);
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto& adj = g.adjacency_[v];
      std::sort(adj.begin(), adj.end());
      if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
        throw ValidationError("duplicate edge at '" + g.labels_[v] + "'");
    }
    g.num_edges_ = edges.size();
    g.finish();
    if (!g.connected_from_zero())
      throw ValidationError("graph is disconnected");
    return g;
  }

  std::size_t num_vertices() const noexcept { return labels_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }

  const std::string& label(std::size_t v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw UnknownCategory("'" + label + "' is not a vertex of the graph");
    return it->second;
  }

  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  const VertexSet& neighbor_set(std::size_t v) const { return neighbor_sets_.at(v); }

  bool has_edge(std::size_t a, std::size_t b) const {
    if (a >= num_vertices() || b >= num_vertices()) return false;
    return neighbor_sets_[a].contains(b);
  }

  // Edges as (lower, higher) index pairs, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (std::size_t a = 0; a < adjacency_.size(); ++a)
      for (auto b : adjacency_[a])
        if (a < b) out.emplace_back(a, b);
    return out;
  }

  VertexSet empty_set() const { return VertexSet(num_vertices()); }
  VertexSet all_vertices() const { return VertexSet::full(num_vertices()); }

  VertexSet set_of(const std::vector<std::string>& members) const {
    VertexSet s = empty_set();
    for (const auto& m : members) s.insert(index_of(m));
    return s;
  }

  std::vector<std::string> labels_of(const VertexSet& s) const {
    std::vector<std::string> out;
    s.for_each([&](std::size_t v) { out.push_back(labels_[v]); });
    return out;
  }

  // One bitmask of neighbors per vertex; only meaningful when the graph has
  // at most 64 vertices.
  const std::vector<std::uint64_t>& neighbor_masks64() const noexcept { return masks64_; }

  friend bool operator==(const StructureGraph& a, const StructureGraph& b) {
    return a.labels_ == b.labels_ && a.adjacency_ == b.adjacency_;
  }

 private:
  void finish() {
    const std::size_t n = labels_.size();
    neighbor_sets_.assign(n, VertexSet(n));
    for (std::size_t v = 0; v < n; ++v)
      for (auto u : adjacency_[v]) neighbor_sets_[v].insert(u);
    masks64_.clear();
    if (n <= 64) {
      masks64_.assign(n, 0);
      for (std::size_t v = 0; v < n; ++v)
        for (auto u : adjacency_[v]) masks64_[v] |= std::uint64_t{1} << u;
    }
  }

  bool connected_from_zero() const {
    std::vector<char> seen(labels_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto u : adjacency_[v])
        if (!seen[u]) {
          seen[u] = 1;
          ++count;
          stack.push_back(u);
        }
    }
    return count == labels_.size();
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<VertexSet> neighbor_sets_;
  std::vector<std::uint64_t> masks64_;
  std::size_t num_edges_ = 0;
};

namespace detail {

inline bool is_connected_mask64(std::uint64_t mask, const std::vector<std::uint64_t>& nbr) {
  if (mask == 0) return false;
  std::uint64_t reached = mask & (~mask + 1);
  std::uint64_t frontier = reached;
  while (frontier) {
    const int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const std::uint64_t fresh = nbr[static_cast<std::size_t>(v)] & mask & ~reached;
    reached |= fresh;
    frontier |= fresh;
  }
  return reached == mask;
}

}  // namespace detail

// True iff the subgraph induced by `s` is connected. A single vertex is
// connected; the empty set is not.
inline bool is_connected(const StructureGraph& g, const VertexSet& s) {
  if (s.width() != g.num_vertices())
    throw WidthMismatch("vertex set width " + std::to_string(s.width()) + " does not match graph with " +
                        std::to_string(g.num_vertices()) + " vertices");
  if (g.num_vertices() <= 64) return detail::is_connected_mask64(s.words()[0], g.neighbor_masks64());
  const std::size_t start = s.first();
  if (start == s.width()) return false;
  VertexSet reached(s.width());
  reached.insert(start);
  std::vector<std::size_t> stack{start};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto u : g.neighbors(v))
      if (s.contains(u) && !reached.contains(u)) {
        reached.insert(u);
        stack.push_back(u);
      }
  }
  return reached == s;
}

// Grid graph with rows x cols vertices labeled "r<i>c<j>", 4-neighborhood.
inline StructureGraph make_grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      labels.push_back("r" + std::to_string(i) + "c" + std::to_string(j));
      const std::size_t v = i * cols + j;
      if (j + 1 < cols) edges.emplace_back(v, v + 1);
      if (i + 1 < rows) edges.emplace_back(v, v + cols);
    }
  return StructureGraph::from_indices(std::move(labels), edges);
}

inline StructureGraph make_path_graph(std::size_t n, const std::string& prefix = "v") {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(prefix + std::to_string(i));
    if (i + 1 < n) edges.emplace_back(i, i + 1);
  }
  return StructureGraph::from_indices(std::move(labels), edges);
}

inline StructureGraph make_cycle_graph(std::size_t n, const std::string& prefix = "v") {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(prefix + std::to_string(i));
    if (n >= 3) edges.emplace_back(i, (i + 1) % n);
    else if (i + 1 < n) edges.emplace_back(i, i + 1);
  }
  return StructureGraph::from_indices(std::move(labels), edges);
}

inline StructureGraph make_complete_graph(std::size_t n, const std::string& prefix = "v") {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(prefix + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) edges.emplace_back(j, i);
  }
  return StructureGraph::from_indices(std::move(labels), edges);
}

}  // namespace structboost
