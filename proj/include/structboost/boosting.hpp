#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "structboost/dataset.hpp"
#include "structboost/errors.hpp"
#include "structboost/metrics.hpp"
#include "structboost/random.hpp"
#include "structboost/tree.hpp"

namespace structboost {

struct BoostConfig {
  double learning_rate = 0.02;
  std::size_t max_rounds = 5000;
  std::size_t early_stopping_rounds = 20;
  GrowthParams growth;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0 && learning_rate <= 1)) throw InvalidConfig("learning_rate must lie in (0, 1]");
    if (max_rounds < 1) throw InvalidConfig("max_rounds must be at least 1");
    if (early_stopping_rounds < 1) throw InvalidConfig("early_stopping_rounds must be at least 1");
    growth.validate();
  }
};

inline constexpr double kBaseScoreClamp = 1e-6;

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// First and second derivative of the per-sample log-loss with respect to
// the margin, at probability p.
struct GradHess {
  double grad, hess;
};
inline GradHess logloss_grad_hess(double p, std::uint8_t y) { return {p - static_cast<double>(y), p * (1.0 - p)}; }

// Additive model: margin = base_score + learning_rate * sum of tree outputs.
struct BoostedModel {
  Schema schema;
  double base_score = 0;
  double learning_rate = 0.02;
  std::vector<DecisionTree> trees;

  void check_schema(const Dataset& data) const {
    if (!schema.compatible_with(data.schema) && !features_match(data.schema))
      throw SchemaMismatch("dataset schema does not match the model");
  }

  std::vector<double> predict_margin(const Dataset& data) const {
    check_schema(data);
    std::vector<double> m(data.rows, base_score);
    for (const auto& t : trees)
      for (std::size_t r = 0; r < data.rows; ++r) m[r] += learning_rate * t.predict(data, r);
    return m;
  }

  std::vector<double> predict_proba(const Dataset& data) const {
    auto m = predict_margin(data);
    for (auto& x : m) x = sigmoid(x);
    return m;
  }

 private:
  // Prediction inputs may come without a target column, so only features
  // are compared.
  bool features_match(const Schema& other) const {
    Schema a = schema, b = other;
    a.target = b.target = "";
    if (a.features.size() != b.features.size()) return false;
    for (std::size_t i = 0; i < a.features.size(); ++i) {
      const auto& x = a.features[i];
      const auto& y = b.features[i];
      if (x.name != y.name || x.kind != y.kind) return false;
      if (x.is_categorical() && x.graph != y.graph && !(*x.graph == *y.graph)) return false;
    }
    return true;
  }
};

struct TrainResult {
  BoostedModel model;
  std::vector<double> valid_history;  // [0] = base score only, [k] = after k rounds
  std::size_t best_round = 0;         // number of trees kept
  std::size_t rounds_run = 0;
};

// Newton boosting on binary log-loss. Stops once validation loss has not
// improved for early_stopping_rounds rounds (or at max_rounds) and keeps
// the trees up to the round with the lowest validation loss. With an empty
// validation set every round is kept.
inline TrainResult train(const Dataset& train_data, const Dataset& valid_data, const BoostConfig& config) {
  config.validate();
  train_data.schema.validate();
  if (!train_data.schema.compatible_with(valid_data.schema))
    throw SchemaMismatch("training and validation schemas differ");
  if (train_data.rows == 0) throw InsufficientData("training set is empty");
  if (!train_data.has_target() || (valid_data.rows > 0 && !valid_data.has_target()))
    throw MissingTarget("training and validation data need targets");

  const double mean = train_data.target_mean();
  const auto single_class = [](const Dataset& d) {
    return d.rows == 0 || std::all_of(d.target.begin(), d.target.end(), [&](auto y) { return y == d.target[0]; });
  };
  if (single_class(train_data) && single_class(valid_data))
    throw DegenerateTarget("training and validation targets each hold a single class");

  TrainResult result;
  auto& model = result.model;
  model.schema = train_data.schema;
  model.learning_rate = config.learning_rate;
  model.base_score = logit(std::clamp(mean, kBaseScoreClamp, 1 - kBaseScoreClamp));

  const std::size_t n = train_data.rows;
  std::vector<double> train_margin(n, model.base_score);
  std::vector<double> valid_margin(valid_data.rows, model.base_score);
  std::vector<double> grads(n), hess(n), valid_p(valid_data.rows);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  auto valid_loss = [&] {
    for (std::size_t i = 0; i < valid_data.rows; ++i) valid_p[i] = sigmoid(valid_margin[i]);
    return log_loss(valid_data.target, valid_p);
  };
  const bool early_stopping = valid_data.rows > 0;
  double best_loss = early_stopping ? valid_loss() : 0.0;
  if (early_stopping) result.valid_history.push_back(best_loss);

  TreeGrower grower(train_data, config.growth);
  Rng rng(config.seed);
  for (std::size_t round = 1; round <= config.max_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto gh = logloss_grad_hess(sigmoid(train_margin[i]), train_data.target[i]);
      grads[i] = gh.grad;
      hess[i] = gh.hess;
    }
    DecisionTree tree = grower.grow(all_rows, grads, hess, rng);
    for (std::size_t i = 0; i < n; ++i) train_margin[i] += config.learning_rate * tree.predict(train_data, i);
    for (std::size_t i = 0; i < valid_data.rows; ++i)
      valid_margin[i] += config.learning_rate * tree.predict(valid_data, i);
    model.trees.push_back(std::move(tree));
    result.rounds_run = round;

    if (!early_stopping) {
      result.best_round = round;
      continue;
    }
    const double loss = valid_loss();
    result.valid_history.push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      result.best_round = round;
    } else if (round - result.best_round >= config.early_stopping_rounds) {
      break;
    }
  }
  model.trees.resize(result.best_round);
  return result;
}

inline EvalResult evaluate(const BoostedModel& model, const Dataset& data) {
  if (!data.has_target()) throw MissingTarget("evaluation data needs a target column");
  const auto p = model.predict_proba(data);
  return evaluate(data.target, p);
}

}  // namespace structboost
