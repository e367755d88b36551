#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "structboost/graph.hpp"
#include "structboost/random.hpp"
#include "structboost/vertex_set.hpp"

namespace structboost {

struct SpanningTree {
  std::size_t root = 0;
  std::vector<std::size_t> parent;  // parent[root] == root
  std::vector<Edge> edges;          // (lower, higher) pairs, sorted
};

// Uniform random spanning tree by Wilson's loop-erased random walks, rooted
// at vertex 0. Each walk starts at the lowest vertex not yet in the tree and
// wanders until it hits the tree; remembering only the last exit from every
// vertex erases the loops.
inline SpanningTree wilson_spanning_tree(const StructureGraph& g, Rng& rng) {
  const std::size_t n = g.num_vertices();
  SpanningTree t;
  t.root = 0;
  t.parent.assign(n, 0);
  std::vector<char> in_tree(n, 0);
  in_tree[0] = 1;
  for (std::size_t start = 1; start < n; ++start) {
    std::size_t u = start;
    while (!in_tree[u]) {
      const auto& nb = g.neighbors(u);
      t.parent[u] = nb[uniform_index(rng, nb.size())];
      u = t.parent[u];
    }
    for (u = start; !in_tree[u]; u = t.parent[u]) in_tree[u] = 1;
  }
  t.edges.reserve(n ? n - 1 : 0);
  for (std::size_t v = 1; v < n; ++v) t.edges.emplace_back(std::min(v, t.parent[v]), std::max(v, t.parent[v]));
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

// Checks the SpanningTree invariants against its host graph.
inline bool is_valid_spanning_tree(const StructureGraph& g, const SpanningTree& t) {
  const std::size_t n = g.num_vertices();
  if (t.parent.size() != n || t.root >= n || t.parent[t.root] != t.root) return false;
  if (t.edges.size() + 1 != n) return false;
  for (auto [a, b] : t.edges)
    if (!g.has_edge(a, b)) return false;
  // Union-find over the edge list: n-1 edges with no cycle span everything.
  std::vector<std::size_t> uf(n);
  for (std::size_t i = 0; i < n; ++i) uf[i] = i;
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (auto [a, b] : t.edges) {
    auto ra = find(a), rb = find(b);
    if (ra == rb) return false;
    uf[ra] = rb;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (v == t.root) continue;
    auto e = Edge{std::min(v, t.parent[v]), std::max(v, t.parent[v])};
    if (!std::binary_search(t.edges.begin(), t.edges.end(), e)) return false;
  }
  return true;
}

// For every non-root vertex v, the vertex set of the subtree hanging below
// the tree edge (v, parent[v]). Removing that edge separates exactly this
// set from the rest of the tree. Indexed by v; the root's entry is empty.
inline std::vector<VertexSet> subtree_sets(const SpanningTree& t) {
  const std::size_t n = t.parent.size();
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t v = 0; v < n; ++v)
    if (v != t.root) children[t.parent[v]].push_back(v);
  std::vector<std::size_t> order{t.root};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto c : children[order[i]]) order.push_back(c);
  std::vector<VertexSet> below(n, VertexSet(n));
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t v = order[i];
    below[v].insert(v);
    below[t.parent[v]] |= below[v];
  }
  below[t.root] = VertexSet(n);
  return below;
}

}  // namespace structboost
