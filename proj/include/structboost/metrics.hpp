#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "structboost/errors.hpp"

namespace structboost {

inline constexpr double kProbabilityClamp = 1e-15;

// Mean negative log-likelihood of 0/1 labels; probabilities are clamped to
// [1e-15, 1 - 1e-15].
inline double log_loss(std::span<const std::uint8_t> y, std::span<const double> p) {
  if (y.size() != p.size() || y.empty()) throw InsufficientData("log_loss needs aligned, non-empty inputs");
  double total = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += y[i] ? std::log(q) : std::log1p(-q);
  }
  return -total / static_cast<double>(y.size());
}

// Area under the ROC curve via the Mann-Whitney rank statistic; tied scores
// count one half.
inline double auroc(std::span<const std::uint8_t> y, std::span<const double> p) {
  if (y.size() != p.size() || y.empty()) throw InsufficientData("auroc needs aligned, non-empty inputs");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  double rank_sum_pos = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && p[order[j]] == p[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (y[order[k]]) {
        rank_sum_pos += mid_rank;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = y.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw AurocUndefined("AUROC is undefined when only one class is present");
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1) / 2.0) / (np * nn);
}

struct EvalResult {
  double log_loss = 0;
  double auroc = 0;  // NaN when the labels hold a single class
  std::size_t n = 0;
};

inline EvalResult evaluate(std::span<const std::uint8_t> y, std::span<const double> p) {
  EvalResult r;
  r.n = y.size();
  r.log_loss = log_loss(y, p);
  try {
    r.auroc = auroc(y, p);
  } catch (const AurocUndefined&) {
    r.auroc = std::nan("");
  }
  return r;
}

}  // namespace structboost
