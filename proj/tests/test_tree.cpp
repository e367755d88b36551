#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "structboost/boosting.hpp"
#include "structboost/synthetic.hpp"
#include "structboost/tree.hpp"

using namespace structboost;

namespace {

Dataset categorical_data(std::shared_ptr<const StructureGraph> g, const std::vector<std::uint32_t>& cats) {
  Schema s;
  s.features.push_back(FeatureSpec::categorical("c", std::move(g)));
  Dataset d(s);
  for (auto v : cats) d.add_row({static_cast<double>(v)}, 0);
  return d;
}

Dataset numeric_data(const std::vector<double>& xs) {
  Schema s;
  s.features.push_back(FeatureSpec::numeric("x"));
  Dataset d(s);
  for (auto x : xs) d.add_row({x}, 0);
  return d;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

}  // namespace

TEST(Gain, HandComputedTwoVertexExample) {
  auto g = std::make_shared<const StructureGraph>(StructureGraph::from_labels({"a", "b"}, {{"a", "b"}}));
  auto d = categorical_data(g, {0, 0, 1, 1});
  std::vector<double> grads{-0.5, -0.5, 0.5, 0.5}, hess(4, 0.25);
  GrowthParams p;
  p.reg_lambda = 0;
  auto s = best_categorical_split(d, all_rows(4), grads, hess, 0, enumerate_allowable_splits(*g), p);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->split.left, VertexSet(2, {0}));
  // GL = -1, HL = 0.5, GR = 1, HR = 0.5, G = 0.
  EXPECT_DOUBLE_EQ(s->gain, 0.5 * (1.0 / 0.5 + 1.0 / 0.5 - 0.0));
}

TEST(Gain, ZeroGradientsNeverSplit) {
  auto g = std::make_shared<const StructureGraph>(make_cycle_graph(5));
  auto d = categorical_data(g, {0, 1, 2, 3, 4, 0, 1});
  std::vector<double> grads(7, 0.0), hess(7, 0.25);
  GrowthParams p;
  EXPECT_FALSE(best_categorical_split(d, all_rows(7), grads, hess, 0, enumerate_allowable_splits(*g), p));
  auto n = numeric_data({1, 2, 3, 4, 5, 6, 7});
  EXPECT_FALSE(best_numeric_split(n, all_rows(7), grads, hess, 0, p));
}

TEST(Gain, CategoricalArgmaxMatchesBruteForce) {
  auto g = std::make_shared<const StructureGraph>(make_cycle_graph(5));
  Rng rng(3);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::uint32_t> cats;
    std::vector<double> grads, hess;
    for (int i = 0; i < 40; ++i) {
      const auto v = static_cast<std::uint32_t>(uniform_index(rng, 5));
      cats.push_back(v);
      // Signal concentrated on the arc {1,2}.
      grads.push_back((v == 1 || v == 2 ? -0.4 : 0.3) + 0.2 * (uniform_unit(rng) - 0.5));
      hess.push_back(0.1 + 0.2 * uniform_unit(rng));
    }
    auto d = categorical_data(g, cats);
    GrowthParams p;
    p.reg_lambda = 0.5;
    auto got = best_categorical_split(d, all_rows(40), grads, hess, 0, enumerate_allowable_splits(*g), p);

    // Direct row-level evaluation of every oracle split.
    double best = 0;
    std::uint64_t best_mask = 0;
    for (auto mask : oracle::allowable_splits(*g)) {
      double gl = 0, hl = 0, gr = 0, hr = 0;
      for (std::size_t i = 0; i < cats.size(); ++i) {
        if (mask >> cats[i] & 1) gl += grads[i], hl += hess[i];
        else gr += grads[i], hr += hess[i];
      }
      if (hl == 0 || hr == 0) continue;
      const double gain = 0.5 * (gl * gl / (hl + 0.5) + gr * gr / (hr + 0.5) - (gl + gr) * (gl + gr) / (hl + hr + 0.5));
      if (gain > best) best = gain, best_mask = mask;
    }
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(oracle::to_mask(got->split.left), best_mask);
    EXPECT_NEAR(got->gain, best, 1e-12);
  }
}

TEST(NumericSplit, SingleValueHasNoSplit) {
  auto d = numeric_data({2, 2, 2});
  std::vector<double> grads{-1, 1, 0.5}, hess(3, 0.25);
  EXPECT_FALSE(best_numeric_split(d, all_rows(3), grads, hess, 0, GrowthParams{}));
}

TEST(NumericSplit, MidpointThreshold) {
  auto d = numeric_data({1, 2});
  std::vector<double> grads{-1, 1}, hess(2, 0.25);
  GrowthParams p;
  p.reg_lambda = 0;
  auto s = best_numeric_split(d, all_rows(2), grads, hess, 0, p);
  ASSERT_TRUE(s.has_value());
  EXPECT_DOUBLE_EQ(s->threshold, 1.5);
  EXPECT_DOUBLE_EQ(s->gain, 0.5 * (1 / 0.25 + 1 / 0.25));
}

TEST(NumericSplit, MatchesExhaustiveThresholdScan) {
  Rng rng(4);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<double> xs, grads, hess;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(uniform_index(rng, 30)) / 3.0);
      grads.push_back(uniform_unit(rng) - 0.5 + (xs.back() > 4 ? 0.3 : 0));
      hess.push_back(0.05 + 0.2 * uniform_unit(rng));
    }
    auto d = numeric_data(xs);
    GrowthParams p;
    p.min_samples_leaf = 1 + uniform_index(rng, 5);
    auto got = best_numeric_split(d, all_rows(n), grads, hess, 0, p);

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    double best = 0;
    std::optional<double> best_t;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const double t = (sorted[k] + sorted[k + 1]) / 2;
      double gl = 0, hl = 0, gr = 0, hr = 0;
      std::size_t nl = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] <= t) gl += grads[i], hl += hess[i], ++nl;
        else gr += grads[i], hr += hess[i];
      }
      if (nl < p.min_samples_leaf || n - nl < p.min_samples_leaf) continue;
      const double gain = split_gain(gl, hl, gr, hr, p.reg_lambda);
      if (gain > best + 1e-12) best = gain, best_t = t;
    }
    ASSERT_EQ(got.has_value(), best_t.has_value());
    if (got) {
      EXPECT_NEAR(got->gain, best, 1e-9);
      EXPECT_NEAR(got->threshold, *best_t, 1e-12);
    }
  }
}

TEST(NumericSplit, MissingValuesGoLeft) {
  Schema s;
  s.features.push_back(FeatureSpec::numeric("x"));
  Dataset d(s);
  d.add_row({std::nan("")}, 0);
  d.add_row({1.0}, 0);
  d.add_row({5.0}, 0);
  std::vector<double> grads{-1, -1, 1}, hess(3, 0.25);
  GrowthParams p;
  p.max_depth = 1;
  p.reg_lambda = 0;
  Rng rng(0);
  auto t = grow_tree(d, all_rows(3), grads, hess, p, rng);
  ASSERT_EQ(t.nodes.size(), 3u);
  EXPECT_EQ(t.leaf_index(d, 0), t.leaf_index(d, 1));
  EXPECT_DOUBLE_EQ(route(t, s, {""}), t.predict(d, 0));
}

TEST(Grower, DepthOneIsStump) {
  auto syn = generate_synthetic(ScenarioSpec{}, 1);
  const auto& d = syn.data;
  std::vector<double> grads, hess;
  for (std::size_t i = 0; i < d.rows; ++i) {
    grads.push_back(0.4 - d.target[i]);
    hess.push_back(0.24);
  }
  GrowthParams p;
  p.max_depth = 1;
  Rng rng(1);
  auto t = grow_tree(d, all_rows(d.rows), grads, hess, p, rng);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(t.nodes.size(), 3u);
}

TEST(Grower, PureNodeIsLeaf) {
  auto g = std::make_shared<const StructureGraph>(make_path_graph(4));
  auto d = categorical_data(g, {0, 1, 2, 3, 0, 1});
  std::vector<double> grads(6, 0.3), hess(6, 0.21);
  Rng rng(2);
  auto t = grow_tree(d, all_rows(6), grads, hess, GrowthParams{}, rng);
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(t.nodes[0].value, -1.8 / (6 * 0.21 + 1.0));
}

TEST(Grower, RulesAreAllowableAndRespectLeafSize) {
  Rng rng(3);
  for (int iter = 0; iter < 30; ++iter) {
    auto g = std::make_shared<const StructureGraph>(oracle::random_connected_graph(3 + uniform_index(rng, 12), uniform_index(rng, 10), rng));
    std::vector<std::uint32_t> cats;
    std::vector<double> grads, hess;
    for (int i = 0; i < 200; ++i) {
      cats.push_back(static_cast<std::uint32_t>(uniform_index(rng, g->num_vertices())));
      grads.push_back(uniform_unit(rng) - 0.5);
      hess.push_back(0.25);
    }
    auto d = categorical_data(g, cats);
    GrowthParams p;
    p.max_depth = 4;
    p.min_samples_leaf = 5;
    p.sampler.method = iter % 3 == 0 ? SamplerMethod::spanning_tree
                                     : iter % 3 == 1 ? SamplerMethod::edge_contraction : SamplerMethod::full_enumeration;
    auto t = grow_tree(d, all_rows(200), grads, hess, p, rng);
    EXPECT_TRUE(rules_are_allowable(t, d.schema));
    EXPECT_LE(t.depth(), 4u);
    std::vector<std::size_t> per_leaf(t.nodes.size(), 0);
    for (std::size_t r = 0; r < d.rows; ++r) ++per_leaf[t.leaf_index(d, r)];
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
      if (t.nodes[i].is_leaf()) EXPECT_GE(per_leaf[i], 5u);
  }
}

TEST(Grower, DeeperTreeFitsTrainingDataAtLeastAsWell) {
  ScenarioSpec spec;
  spec.grid_size = 4;
  auto syn = generate_synthetic(spec, 5);
  auto d = syn.data.subset(all_rows(3000));
  const double base = d.target_mean();
  std::vector<double> grads, hess;
  for (std::size_t i = 0; i < d.rows; ++i) {
    grads.push_back(base - d.target[i]);
    hess.push_back(base * (1 - base));
  }
  auto train_loss = [&](std::size_t depth) {
    GrowthParams p;
    p.max_depth = depth;
    p.sampler.method = SamplerMethod::full_enumeration;
    p.sampler.max_splits_to_search = 1u << 30;  // every split: depth 2 extends the depth 1 stump
    Rng rng(9);
    auto t = grow_tree(d, all_rows(d.rows), grads, hess, p, rng);
    std::vector<double> p_hat;
    for (std::size_t i = 0; i < d.rows; ++i) p_hat.push_back(sigmoid(logit(base) + t.predict(d, i)));
    return log_loss(d.target, p_hat);
  };
  EXPECT_LE(train_loss(2), train_loss(1));
}

TEST(Route, StumpAndUnseenCategories) {
  auto g = std::make_shared<const StructureGraph>(StructureGraph::from_labels({"a", "b"}, {{"a", "b"}}));
  Schema s;
  s.features.push_back(FeatureSpec::categorical("c", g));
  DecisionTree t;
  t.nodes.resize(3);
  t.nodes[0] = TreeNode{TreeNode::Kind::categorical, 0, 0.0, VertexSet(2, {0}), 1, 2};
  t.nodes[1].value = -1;
  t.nodes[2].value = 1;
  EXPECT_EQ(route(t, s, {"a"}), -1);
  EXPECT_EQ(route(t, s, {"b"}), 1);
  EXPECT_THROW(route(t, s, {"Berkshire"}), UnknownCategory);
  EXPECT_THROW(route(t, s, {""}), MissingValue);
  EXPECT_THROW(route(t, s, {"a", "b"}), SchemaMismatch);
}

TEST(Route, VertexAbsentFromTrainingStillRoutes) {
  auto g = std::make_shared<const StructureGraph>(make_grid_graph(4, 4));
  std::vector<std::uint32_t> cats;
  std::vector<double> grads, hess;
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    auto v = static_cast<std::uint32_t>(uniform_index(rng, 16));
    if (v == 5 || v == 10) continue;
    cats.push_back(v);
    grads.push_back(v < 8 ? -0.5 : 0.5);
    hess.push_back(0.25);
  }
  auto d = categorical_data(g, cats);
  GrowthParams p;
  p.max_depth = 3;
  auto t = grow_tree(d, all_rows(d.rows), grads, hess, p, rng);
  for (const auto& label : g->labels()) EXPECT_NO_THROW(route(t, d.schema, {label}));
}
