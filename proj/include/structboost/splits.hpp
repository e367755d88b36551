#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "structboost/connected_sets.hpp"
#include "structboost/contraction.hpp"
#include "structboost/errors.hpp"
#include "structboost/graph.hpp"
#include "structboost/random.hpp"
#include "structboost/spanning_tree.hpp"
#include "structboost/vertex_set.hpp"

namespace structboost {

// A bipartition {S, S^C} of a graph's vertices stored as the side holding
// vertex 0, which makes equal splits compare equal.
struct Split {
  VertexSet left;

  static Split canonical(VertexSet side) {
    if (!side.contains(0)) side = side.complement();
    return Split{std::move(side)};
  }

  VertexSet right() const { return left.complement(); }

  friend bool operator==(const Split&, const Split&) = default;
  friend auto operator<=>(const Split& a, const Split& b) { return a.left <=> b.left; }
};

// Both sides non-empty and connected, and stored canonically.
inline bool is_allowable(const StructureGraph& g, const Split& s) {
  if (s.left.width() != g.num_vertices() || !s.left.contains(0)) return false;
  const VertexSet right = s.left.complement();
  if (right.empty()) return false;
  return is_connected(g, s.left) && is_connected(g, right);
}

enum class SamplerMethod { full_enumeration, edge_contraction, spanning_tree };

inline const char* to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::full_enumeration: return "full_enumeration";
    case SamplerMethod::edge_contraction: return "edge_contraction";
    case SamplerMethod::spanning_tree: return "spanning_tree";
  }
  return "?";
}

inline SamplerMethod sampler_method_from_string(const std::string& s) {
  if (s == "full_enumeration") return SamplerMethod::full_enumeration;
  if (s == "edge_contraction") return SamplerMethod::edge_contraction;
  if (s == "spanning_tree") return SamplerMethod::spanning_tree;
  throw InvalidConfig("unknown sampler method '" + s + "'");
}

inline constexpr std::size_t kDefaultEnumerationLimit = 50'000'000;

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::spanning_tree;
  std::size_t contraction_size = 5;       // c
  std::size_t max_splits_to_search = 20;  // m
  std::size_t num_spanning_trees = 1;     // n
  std::size_t enumeration_limit = kDefaultEnumerationLimit;

  void validate() const {
    if (contraction_size < 2) throw InvalidConfig("contraction_size must be at least 2");
    if (max_splits_to_search < 1) throw InvalidConfig("max_splits_to_search must be at least 1");
    if (num_spanning_trees < 1) throw InvalidConfig("num_spanning_trees must be at least 1");
    if (enumeration_limit < 1) throw InvalidConfig("enumeration_limit must be at least 1");
  }

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

inline nlohmann::json to_json(const SamplerConfig& c) {
  return {{"method", to_string(c.method)},
          {"contraction_size", c.contraction_size},
          {"max_splits_to_search", c.max_splits_to_search},
          {"num_spanning_trees", c.num_spanning_trees}};
}

inline SamplerConfig sampler_config_from_json(const nlohmann::json& j) {
  SamplerConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "method") c.method = sampler_method_from_string(value.get<std::string>());
    else if (key == "contraction_size") c.contraction_size = value.get<std::size_t>();
    else if (key == "max_splits_to_search") c.max_splits_to_search = value.get<std::size_t>();
    else if (key == "num_spanning_trees") c.num_spanning_trees = value.get<std::size_t>();
    else if (key == "enumeration_limit") c.enumeration_limit = value.get<std::size_t>();
    else throw InvalidConfig("unknown sampler key '" + key + "'");
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

// Streams every allowable split of `g` once, canonical side first, to
// `visit(const VertexSet& left)`. Searches connected sets of at most |V|/2
// vertices whose complement is connected, pruning branches whose forced
// complement vertices are already separated; a half-size pair is reported
// only through the side holding vertex 0. Throws ResourceLimit once more
// than `limit` search nodes were expanded.
template <typename Visit>
void for_each_allowable_split(const StructureGraph& g, Visit&& visit,
                              std::size_t limit = kDefaultEnumerationLimit) {
  const std::size_t n = g.num_vertices();
  if (n < 2) return;
  const std::size_t half = n / 2;
  std::size_t seen = 0;
  auto over_limit = [&] {
    throw ResourceLimit("split enumeration exceeded the limit of " + std::to_string(limit) + " search nodes");
  };
  if (n <= 64) {
    const std::uint64_t all = detail::Mask64Ops::full(n);
    VertexSet scratch(n);
    auto emit = [&](std::uint64_t s, std::size_t size) {
      if (++seen > limit) over_limit();
      const bool has_zero = s & 1U;
      if (2 * size == n && !has_zero) return;
      scratch.assign_low_word(has_zero ? s : all & ~s);
      visit(static_cast<const VertexSet&>(scratch));
    };
    detail::enumerate_with_connected_complement(detail::Mask64Ops{g.neighbor_masks64()}, n, half, emit);
  } else {
    auto emit = [&](const VertexSet& s, std::size_t size) {
      if (++seen > limit) over_limit();
      const bool has_zero = s.contains(0);
      if (2 * size == n && !has_zero) return;
      if (has_zero) visit(s);
      else visit(static_cast<const VertexSet&>(s.complement()));
    };
    detail::enumerate_with_connected_complement(detail::VertexSetOps{g}, n, half, emit);
  }
}

inline std::size_t count_allowable_splits(const StructureGraph& g, std::size_t limit = kDefaultEnumerationLimit) {
  std::size_t count = 0;
  for_each_allowable_split(g, [&](const VertexSet&) { ++count; }, limit);
  return count;
}

// All allowable splits in canonical order.
inline std::vector<Split> enumerate_allowable_splits(const StructureGraph& g,
                                                     std::size_t limit = kDefaultEnumerationLimit) {
  std::vector<Split> out;
  for_each_allowable_split(g, [&](const VertexSet& s) { out.push_back(Split{s}); }, limit);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

// k distinct positions out of [0, n) by partial Fisher-Yates, ascending.
inline std::vector<std::size_t> choose_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k >= n) return idx;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline void sort_unique(std::vector<Split>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

// Maps a split of a contracted graph back to the original graph by
// replacing every super-vertex with the original vertices it absorbed.
inline Split lift_split(const Split& contracted, const ContractionState& state) {
  const std::size_t n = state.original_size();
  if (contracted.left.width() != state.current.num_vertices() ||
      state.merge_map.size() != state.current.num_vertices())
    throw InconsistentState("split width does not match the contracted graph");
  VertexSet left(n);
  contracted.left.for_each([&](std::size_t v) {
    if (state.merge_map[v].width() != n) throw InconsistentState("merge map entry has the wrong width");
    left |= state.merge_map[v];
  });
  return Split::canonical(std::move(left));
}

// Random contraction to `c` vertices, exhaustive split enumeration of the
// small graph, then a uniform subset of at most m lifted splits.
inline std::vector<Split> sample_splits_edge_contraction(const StructureGraph& g, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.method != SamplerMethod::edge_contraction)
    throw InvalidConfig("sampler method is not edge_contraction");
  if (cfg.contraction_size > g.num_vertices())
    throw InvalidConfig("contraction_size " + std::to_string(cfg.contraction_size) + " exceeds the graph's " +
                        std::to_string(g.num_vertices()) + " vertices");
  ContractionState state = ContractionState::identity(g);
  while (state.current.num_vertices() > cfg.contraction_size) {
    const auto edges = state.current.edges();
    state = contract_edge(state, edges[uniform_index(rng, edges.size())]);
  }
  std::vector<VertexSet> small;
  for_each_allowable_split(state.current, [&](const VertexSet& s) { small.push_back(s); }, cfg.enumeration_limit);
  std::sort(small.begin(), small.end());
  std::vector<Split> out;
  for (auto i : detail::choose_without_replacement(small.size(), cfg.max_splits_to_search, rng))
    out.push_back(lift_split(Split{small[i]}, state));
  detail::sort_unique(out);
  return out;
}

// One split per edge of each of n uniform spanning trees, deduplicated.
inline std::vector<Split> sample_splits_spanning_tree(const StructureGraph& g, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.method != SamplerMethod::spanning_tree) throw InvalidConfig("sampler method is not spanning_tree");
  std::vector<Split> out;
  if (g.num_vertices() < 2) return out;
  out.reserve(cfg.num_spanning_trees * (g.num_vertices() - 1));
  for (std::size_t t = 0; t < cfg.num_spanning_trees; ++t) {
    const SpanningTree tree = wilson_spanning_tree(g, rng);
    auto below = subtree_sets(tree);
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
      if (v != tree.root) out.push_back(Split::canonical(std::move(below[v])));
  }
  detail::sort_unique(out);
  return out;
}

// Draws candidate splits for one categorical feature according to `cfg`.
// Full enumeration of a graph is computed once and cached; each draw then
// takes a uniform subset of at most max_splits_to_search of it.
class SplitSampler {
 public:
  SplitSampler(const StructureGraph& graph, SamplerConfig cfg) : graph_(&graph), cfg_(cfg) {
    cfg_.validate();
    // Small graphs cannot be contracted below their own size.
    if (cfg_.method == SamplerMethod::edge_contraction)
      cfg_.contraction_size = std::min(cfg_.contraction_size, std::max<std::size_t>(graph.num_vertices(), 2));
  }

  SplitSampler(StructureGraph&&, SamplerConfig) = delete;

  const SamplerConfig& config() const noexcept { return cfg_; }

  std::vector<Split> draw(Rng& rng) {
    if (graph_->num_vertices() < 2) return {};
    switch (cfg_.method) {
      case SamplerMethod::spanning_tree: return sample_splits_spanning_tree(*graph_, cfg_, rng);
      case SamplerMethod::edge_contraction: return sample_splits_edge_contraction(*graph_, cfg_, rng);
      case SamplerMethod::full_enumeration: {
        if (!universe_) universe_ = enumerate_allowable_splits(*graph_, cfg_.enumeration_limit);
        if (universe_->size() <= cfg_.max_splits_to_search) return *universe_;
        std::vector<Split> out;
        for (auto i : detail::choose_without_replacement(universe_->size(), cfg_.max_splits_to_search, rng))
          out.push_back((*universe_)[i]);
        return out;
      }
    }
    return {};
  }

 private:
  const StructureGraph* graph_;
  SamplerConfig cfg_;
  std::optional<std::vector<Split>> universe_;
};

inline std::vector<Split> sample_splits(const StructureGraph& g, const SamplerConfig& cfg, Rng& rng) {
  switch (cfg.method) {
    case SamplerMethod::edge_contraction: return sample_splits_edge_contraction(g, cfg, rng);
    case SamplerMethod::spanning_tree: return sample_splits_spanning_tree(g, cfg, rng);
    case SamplerMethod::full_enumeration: return SplitSampler(g, cfg).draw(rng);
  }
  return {};
}

// Text form of a split: the canonical side's labels, sorted, as a JSON array.
inline std::string format_split(const StructureGraph& g, const Split& s) {
  auto labels = g.labels_of(s.left);
  std::sort(labels.begin(), labels.end());
  return nlohmann::json(labels).dump();
}

}  // namespace structboost
