#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "structboost/graph.hpp"
#include "structboost/vertex_set.hpp"

namespace structboost {

namespace detail {

// Set operations for graphs of at most 64 vertices.
struct Mask64Ops {
  using Set = std::uint64_t;
  const std::vector<std::uint64_t>& nbr;

  static Set singleton(std::size_t, std::size_t v) { return Set{1} << v; }
  static Set prefix(std::size_t, std::size_t upto) {  // {0..upto}
    return upto >= 63 ? ~Set{0} : (Set{1} << (upto + 1)) - 1;
  }
  static bool empty(Set s) { return s == 0; }
  static std::size_t first(Set s) { return static_cast<std::size_t>(std::countr_zero(s)); }
  static void insert(Set& s, std::size_t v) { s |= Set{1} << v; }
  static void erase(Set& s, std::size_t v) { s &= ~(Set{1} << v); }
  static Set unite(Set a, Set b) { return a | b; }
  static Set minus(Set a, Set b) { return a & ~b; }
  static bool is_subset(Set a, Set b) { return (a & ~b) == 0; }
  static Set full(std::size_t n) { return n >= 64 ? ~Set{0} : (Set{1} << n) - 1; }
  Set neighbors(std::size_t v) const { return nbr[v]; }

  // Vertices of `within` reachable from `start` inside `within`.
  Set component(Set within, std::size_t start) const {
    Set reached = Set{1} << start;
    Set frontier = reached;
    while (frontier) {
      const auto v = static_cast<std::size_t>(std::countr_zero(frontier));
      frontier &= frontier - 1;
      const Set fresh = nbr[v] & within & ~reached;
      reached |= fresh;
      frontier |= fresh;
    }
    return reached;
  }
};

struct VertexSetOps {
  using Set = VertexSet;
  const StructureGraph& g;

  static Set singleton(std::size_t n, std::size_t v) { return VertexSet(n, {v}); }
  static Set prefix(std::size_t n, std::size_t upto) {
    VertexSet s(n);
    for (std::size_t i = 0; i <= upto && i < n; ++i) s.insert(i);
    return s;
  }
  static bool empty(const Set& s) { return s.empty(); }
  static std::size_t first(const Set& s) { return s.first(); }
  static void insert(Set& s, std::size_t v) { s.insert(v); }
  static void erase(Set& s, std::size_t v) { s.erase(v); }
  static Set unite(const Set& a, const Set& b) { return a | b; }
  static Set minus(const Set& a, const Set& b) { return a - b; }
  static bool is_subset(const Set& a, const Set& b) { return a.is_subset_of(b); }
  static Set full(std::size_t n) { return VertexSet::full(n); }
  const Set& neighbors(std::size_t v) const { return g.neighbor_set(v); }

  Set component(const Set& within, std::size_t start) const {
    VertexSet reached(within.width(), {start});
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : g.neighbors(v))
        if (within.contains(u) && !reached.contains(u)) {
          reached.insert(u);
          stack.push_back(u);
        }
    }
    return reached;
  }
};

// Frontier-branching enumeration. `current` is a connected set, `frontier`
// the neighbors still eligible to join it and `excluded` the vertices that
// an earlier branch already decided to leave out. Each connected set is
// produced exactly once, rooted at its lowest vertex.
template <typename Ops, typename Visit>
void extend_connected(const Ops& ops, typename Ops::Set& current, std::size_t size, std::size_t max_size,
                      typename Ops::Set frontier, typename Ops::Set excluded, Visit& visit) {
  visit(static_cast<const typename Ops::Set&>(current), size);
  if (size == max_size) return;
  while (!Ops::empty(frontier)) {
    const std::size_t u = Ops::first(frontier);
    Ops::erase(frontier, u);
    Ops::insert(excluded, u);
    auto grown = Ops::unite(frontier, Ops::minus(Ops::minus(ops.neighbors(u), current), excluded));
    Ops::insert(current, u);
    extend_connected(ops, current, size + 1, max_size, std::move(grown), excluded, visit);
    Ops::erase(current, u);
  }
}

template <typename Ops, typename Visit>
void enumerate_connected(const Ops& ops, std::size_t n, std::size_t max_size, Visit& visit) {
  for (std::size_t v = 0; v < n; ++v) {
    auto current = Ops::singleton(n, v);
    auto excluded = Ops::prefix(n, v);
    auto frontier = Ops::minus(ops.neighbors(v), excluded);
    extend_connected(ops, current, 1, max_size, std::move(frontier), std::move(excluded), visit);
  }
}

// Like extend_connected, but only descends while every excluded vertex can
// still end up in one connected complement: growing `current` only shrinks
// the complement, so excluded vertices in different components of it stay
// separated forever. Reports `current` when its complement is connected.
template <typename Ops, typename Visit>
void extend_with_connected_complement(const Ops& ops, typename Ops::Set& current, std::size_t size,
                                      std::size_t max_size, typename Ops::Set frontier,
                                      typename Ops::Set excluded, const typename Ops::Set& all, Visit& visit) {
  const auto rest = Ops::minus(all, current);
  if (Ops::empty(rest)) return;
  const auto reach = ops.component(rest, Ops::first(Ops::empty(excluded) ? rest : excluded));
  if (!Ops::is_subset(excluded, reach)) return;
  if (reach == rest) visit(static_cast<const typename Ops::Set&>(current), size);
  if (size == max_size) return;
  while (!Ops::empty(frontier)) {
    const std::size_t u = Ops::first(frontier);
    Ops::erase(frontier, u);
    Ops::insert(current, u);
    auto grown = Ops::unite(frontier, Ops::minus(Ops::minus(ops.neighbors(u), current), excluded));
    extend_with_connected_complement(ops, current, size + 1, max_size, std::move(grown), excluded, all, visit);
    Ops::erase(current, u);
    Ops::insert(excluded, u);
  }
}

template <typename Ops, typename Visit>
void enumerate_with_connected_complement(const Ops& ops, std::size_t n, std::size_t max_size, Visit& visit) {
  const auto all = Ops::full(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto current = Ops::singleton(n, v);
    auto excluded = Ops::minus(Ops::prefix(n, v), current);
    auto frontier = Ops::minus(Ops::minus(ops.neighbors(v), excluded), current);
    extend_with_connected_complement(ops, current, 1, max_size, std::move(frontier), std::move(excluded), all,
                                     visit);
  }
}

}  // namespace detail

// Streams every connected vertex subset of cardinality <= max_size exactly
// once to `visit(const VertexSet&)`. The set passed to the callback is only
// valid for the duration of the call. Sets rooted at a lower vertex come
// first; within a root the order is depth-first.
template <typename Visit>
void for_each_connected_set(const StructureGraph& g, std::size_t max_size, Visit&& visit) {
  const std::size_t n = g.num_vertices();
  if (max_size == 0 || max_size > n)
    throw InvalidConfig("max_size must lie in [1, " + std::to_string(n) + "]");
  if (n <= 64) {
    VertexSet scratch(n);
    auto adapter = [&](std::uint64_t mask, std::size_t) {
      scratch.assign_low_word(mask);
      visit(static_cast<const VertexSet&>(scratch));
    };
    detail::enumerate_connected(detail::Mask64Ops{g.neighbor_masks64()}, n, max_size, adapter);
  } else {
    auto adapter = [&](const VertexSet& s, std::size_t) { visit(s); };
    detail::enumerate_connected(detail::VertexSetOps{g}, n, max_size, adapter);
  }
}

inline std::size_t count_connected_sets(const StructureGraph& g, std::size_t max_size) {
  const std::size_t n = g.num_vertices();
  if (max_size == 0 || max_size > n)
    throw InvalidConfig("max_size must lie in [1, " + std::to_string(n) + "]");
  std::size_t count = 0;
  auto counter = [&](const auto&, std::size_t) { ++count; };
  if (n <= 64) detail::enumerate_connected(detail::Mask64Ops{g.neighbor_masks64()}, n, max_size, counter);
  else detail::enumerate_connected(detail::VertexSetOps{g}, n, max_size, counter);
  return count;
}

// Level-by-level growth of sets whose complement is connected: every
// such set of size k is extended by each of its outside neighbors, the
// distinct results are the size-(k+1) candidates, and the candidates whose
// complement is connected seed the next level. Singletons are the size-1
// candidates. Counts the distinct candidates of size <= max_size; on the
// contiguous-US graph with max_size 24 this is the 35,327,031 sets behind
// its 4,149,721 allowable splits.
//
// The growth only reaches sets connected to a singleton through a chain of
// sets with connected complements, so it can miss allowable splits on some
// graphs; for_each_allowable_split does not depend on it.
inline std::size_t count_growth_candidates(const StructureGraph& g, std::size_t max_size) {
  const std::size_t n = g.num_vertices();
  if (max_size == 0 || max_size > n)
    throw InvalidConfig("max_size must lie in [1, " + std::to_string(n) + "]");
  std::size_t count = n;
  if (n <= 64) {
    // Same procedure on 64-bit masks; avoids millions of small allocations.
    const auto& nbr = g.neighbor_masks64();
    const std::uint64_t all = detail::Mask64Ops::full(n);
    std::vector<std::uint64_t> level;
    for (std::size_t v = 0; v < n; ++v)
      if (detail::is_connected_mask64(all & ~(std::uint64_t{1} << v), nbr)) level.push_back(std::uint64_t{1} << v);
    for (std::size_t size = 1; size < max_size && !level.empty(); ++size) {
      std::vector<std::uint64_t> candidates;
      for (auto s : level) {
        std::uint64_t out = 0;
        for (auto t = s; t; t &= t - 1) out |= nbr[static_cast<std::size_t>(std::countr_zero(t))];
        for (out &= ~s; out; out &= out - 1) candidates.push_back(s | (out & (~out + 1)));
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      count += candidates.size();
      level.clear();
      for (auto c : candidates)
        if (detail::is_connected_mask64(all & ~c, nbr)) level.push_back(c);
    }
    return count;
  }
  std::vector<VertexSet> level;
  for (std::size_t v = 0; v < n; ++v) {
    VertexSet s(n, {v});
    if (is_connected(g, s.complement())) level.push_back(std::move(s));
  }
  for (std::size_t size = 1; size < max_size && !level.empty(); ++size) {
    std::vector<VertexSet> candidates;
    for (const auto& s : level) {
      VertexSet out(n);
      s.for_each([&](std::size_t v) { out |= g.neighbor_set(v); });
      (out - s).for_each([&](std::size_t u) {
        candidates.push_back(s);
        candidates.back().insert(u);
      });
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    count += candidates.size();
    level.clear();
    for (auto& c : candidates)
      if (is_connected(g, c.complement())) level.push_back(std::move(c));
  }
  return count;
}

// Materialized enumeration in canonical (ascending VertexSet) order.
inline std::vector<VertexSet> enumerate_connected_sets(const StructureGraph& g, std::size_t max_size) {
  std::vector<VertexSet> out;
  for_each_connected_set(g, max_size, [&](const VertexSet& s) { out.push_back(s); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace structboost
