#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "structboost/dataset.hpp"
#include "structboost/errors.hpp"
#include "structboost/random.hpp"
#include "structboost/splits.hpp"

namespace structboost {

struct GrowthParams {
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
  double reg_lambda = 1.0;
  double min_gain = 0.0;
  SamplerConfig sampler;

  void validate() const {
    if (max_depth < 1) throw InvalidConfig("max_depth must be at least 1");
    if (min_samples_leaf < 1) throw InvalidConfig("min_samples_leaf must be at least 1");
    if (!(reg_lambda >= 0)) throw InvalidConfig("reg_lambda must be non-negative");
    if (!(min_gain >= 0)) throw InvalidConfig("min_gain must be non-negative");
    sampler.validate();
  }
};

// Second-order gain of sending (gl, hl) left and (gr, hr) right.
inline double split_gain(double gl, double hl, double gr, double hr, double lambda) {
  auto score = [lambda](double g, double h) { return g * g / (h + lambda); };
  return 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr));
}

inline double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

struct TreeNode {
  enum class Kind : std::uint8_t { leaf, numeric, categorical };
  Kind kind = Kind::leaf;
  std::size_t feature = 0;
  double threshold = 0.0;  // numeric: value <= threshold goes left; missing goes left
  VertexSet left_set;      // categorical: members go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;      // leaf output (log-odds increment)

  bool is_leaf() const noexcept { return kind == Kind::leaf; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      const auto& n = nodes[static_cast<std::size_t>(i)];
      if (n.is_leaf()) {
        best = std::max(best, d);
      } else {
        stack.push_back({n.left, d + 1});
        stack.push_back({n.right, d + 1});
      }
    }
    return best;
  }

  std::size_t leaf_index(const Dataset& data, std::size_t row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      bool go_left;
      const auto& col = data.columns[n.feature];
      if (n.kind == TreeNode::Kind::categorical) go_left = n.left_set.contains(col.category[row]);
      else go_left = col.missing[row] || col.numeric[row] <= n.threshold;
      i = static_cast<std::size_t>(go_left ? n.left : n.right);
    }
    return i;
  }

  double predict(const Dataset& data, std::size_t row) const { return nodes[leaf_index(data, row)].value; }
};

// Routes one row given as raw text cells aligned with schema.features.
// Every vertex of a feature's graph routes somewhere, because categorical
// rules partition the whole vertex set, not just the values seen in
// training. Throws UnknownCategory for a label outside the graph and
// MissingValue for an empty categorical cell.
inline double route(const DecisionTree& tree, const Schema& schema, const std::vector<std::string>& cells) {
  if (cells.size() != schema.features.size())
    throw SchemaMismatch("row has " + std::to_string(cells.size()) + " cells, schema has " +
                         std::to_string(schema.features.size()) + " features");
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    const auto& spec = schema.features[n.feature];
    const auto& cell = cells[n.feature];
    bool go_left;
    if (n.kind == TreeNode::Kind::categorical) {
      if (cell.empty()) throw MissingValue("categorical feature '" + spec.name + "' is missing");
      auto v = spec.graph->find(cell);
      if (!v) throw UnknownCategory("'" + cell + "' is not a vertex of the graph for '" + spec.name + "'");
      go_left = n.left_set.contains(*v);
    } else if (cell.empty()) {
      go_left = true;
    } else {
      double x = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("'" + cell + "' is not a number for feature '" + spec.name + "'");
      go_left = x <= n.threshold;
    }
    i = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return tree.nodes[i].value;
}

struct NumericSplit {
  double threshold = 0;
  double gain = 0;
};

struct CategoricalSplit {
  Split split;
  double gain = 0;
};

// Sorted scan over midpoints between adjacent distinct values. Missing
// values always go left. Returns nothing when no threshold beats min_gain
// with both children holding at least min_samples_leaf rows.
inline std::optional<NumericSplit> best_numeric_split(const Dataset& data, std::span<const std::size_t> rows,
                                                      std::span<const double> grads, std::span<const double> hess,
                                                      std::size_t feature, const GrowthParams& params) {
  const auto& col = data.columns.at(feature);
  struct Item {
    double x, g, h;
  };
  std::vector<Item> items;
  items.reserve(rows.size());
  double g_miss = 0, h_miss = 0, g_all = 0, h_all = 0;
  std::size_t n_miss = 0;
  for (auto r : rows) {
    g_all += grads[r];
    h_all += hess[r];
    if (col.missing[r]) {
      g_miss += grads[r];
      h_miss += hess[r];
      ++n_miss;
    } else {
      items.push_back({col.numeric[r], grads[r], hess[r]});
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.x < b.x; });

  std::optional<NumericSplit> best;
  double gl = g_miss, hl = h_miss;
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    gl += items[i].g;
    hl += items[i].h;
    if (items[i].x == items[i + 1].x) continue;
    const std::size_t n_left = n_miss + i + 1;
    if (n_left < params.min_samples_leaf || n - n_left < params.min_samples_leaf) continue;
    const double gain = split_gain(gl, hl, g_all - gl, h_all - hl, params.reg_lambda);
    if (gain > params.min_gain && (!best || gain > best->gain))
      best = NumericSplit{items[i].x + (items[i + 1].x - items[i].x) / 2, gain};
  }
  return best;
}

// Evaluates each candidate split of a categorical feature from per-vertex
// gradient sums. Ties keep the earliest candidate.
inline std::optional<CategoricalSplit> best_categorical_split(const Dataset& data, std::span<const std::size_t> rows,
                                                              std::span<const double> grads,
                                                              std::span<const double> hess, std::size_t feature,
                                                              const std::vector<Split>& candidates,
                                                              const GrowthParams& params) {
  const auto& col = data.columns.at(feature);
  const std::size_t width = data.schema.features.at(feature).graph->num_vertices();
  std::vector<double> g_v(width, 0.0), h_v(width, 0.0);
  std::vector<std::size_t> n_v(width, 0);
  double g_all = 0, h_all = 0;
  for (auto r : rows) {
    const auto v = col.category[r];
    g_v[v] += grads[r];
    h_v[v] += hess[r];
    ++n_v[v];
    g_all += grads[r];
    h_all += hess[r];
  }
  const std::size_t n = rows.size();
  std::optional<CategoricalSplit> best;
  std::size_t best_index = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double gl = 0, hl = 0;
    std::size_t nl = 0;
    candidates[c].left.for_each([&](std::size_t v) {
      gl += g_v[v];
      hl += h_v[v];
      nl += n_v[v];
    });
    if (nl < params.min_samples_leaf || n - nl < params.min_samples_leaf) continue;
    const double gain = split_gain(gl, hl, g_all - gl, h_all - hl, params.reg_lambda);
    if (gain > params.min_gain && (!best || gain > best->gain)) {
      best = CategoricalSplit{Split{}, gain};
      best_index = c;
    }
  }
  if (best) best->split = candidates[best_index];
  return best;
}

// Grows Structured Categorical Decision Trees over one dataset. Candidate
// splits for every categorical feature are drawn afresh at every node; the
// samplers (and any cached full enumeration) live as long as the grower.
class TreeGrower {
 public:
  TreeGrower(const Dataset& data, GrowthParams params) : data_(&data), params_(std::move(params)) {
    params_.validate();
    for (const auto& f : data.schema.features) {
      if (f.is_categorical()) samplers_.emplace_back(std::in_place, *f.graph, params_.sampler);
      else samplers_.emplace_back();
    }
  }

  const GrowthParams& params() const noexcept { return params_; }

  DecisionTree grow(std::vector<std::size_t> rows, std::span<const double> grads, std::span<const double> hess,
                    Rng& rng) {
    if (rows.empty()) throw InsufficientData("cannot grow a tree on zero rows");
    DecisionTree tree;
    tree.nodes.emplace_back();
    grow_node(tree, 0, std::move(rows), 0, grads, hess, rng);
    return tree;
  }

 private:
  void make_leaf(TreeNode& node, std::span<const std::size_t> rows, std::span<const double> grads,
                 std::span<const double> hess) const {
    double g = 0, h = 0;
    for (auto r : rows) {
      g += grads[r];
      h += hess[r];
    }
    node.kind = TreeNode::Kind::leaf;
    node.value = leaf_weight(g, h, params_.reg_lambda);
  }

  void grow_node(DecisionTree& tree, std::size_t index, std::vector<std::size_t> rows, std::size_t depth,
                 std::span<const double> grads, std::span<const double> hess, Rng& rng) {
    if (depth >= params_.max_depth || rows.size() < 2 * params_.min_samples_leaf) {
      make_leaf(tree.nodes[index], rows, grads, hess);
      return;
    }
    std::optional<TreeNode> rule;
    double best_gain = 0;
    for (std::size_t f = 0; f < data_->schema.features.size(); ++f) {
      if (samplers_[f]) {
        const auto candidates = samplers_[f]->draw(rng);
        if (candidates.empty()) continue;
        auto s = best_categorical_split(*data_, rows, grads, hess, f, candidates, params_);
        if (s && (!rule || s->gain > best_gain)) {
          best_gain = s->gain;
          rule = TreeNode{TreeNode::Kind::categorical, f, 0.0, std::move(s->split.left)};
        }
      } else {
        auto s = best_numeric_split(*data_, rows, grads, hess, f, params_);
        if (s && (!rule || s->gain > best_gain)) {
          best_gain = s->gain;
          rule = TreeNode{TreeNode::Kind::numeric, f, s->threshold, VertexSet{}};
        }
      }
    }
    if (!rule) {
      make_leaf(tree.nodes[index], rows, grads, hess);
      return;
    }

    std::vector<std::size_t> left_rows, right_rows;
    const auto& col = data_->columns[rule->feature];
    for (auto r : rows) {
      const bool go_left = rule->kind == TreeNode::Kind::categorical
                               ? rule->left_set.contains(col.category[r])
                               : (col.missing[r] || col.numeric[r] <= rule->threshold);
      (go_left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    rule->left = left;
    rule->right = left + 1;
    tree.nodes[index] = std::move(*rule);
    grow_node(tree, static_cast<std::size_t>(left), std::move(left_rows), depth + 1, grads, hess, rng);
    grow_node(tree, static_cast<std::size_t>(left) + 1, std::move(right_rows), depth + 1, grads, hess, rng);
  }

  const Dataset* data_;
  GrowthParams params_;
  std::vector<std::optional<SplitSampler>> samplers_;
};

inline DecisionTree grow_tree(const Dataset& data, std::vector<std::size_t> rows, std::span<const double> grads,
                              std::span<const double> hess, const GrowthParams& params, Rng& rng) {
  TreeGrower grower(data, params);
  return grower.grow(std::move(rows), grads, hess, rng);
}

// Every categorical rule must be an allowable split of its feature's graph.
inline bool rules_are_allowable(const DecisionTree& tree, const Schema& schema) {
  for (const auto& n : tree.nodes) {
    if (n.kind != TreeNode::Kind::categorical) continue;
    const auto& g = *schema.features.at(n.feature).graph;
    if (!is_allowable(g, Split{n.left_set})) return false;
  }
  return true;
}

}  // namespace structboost
