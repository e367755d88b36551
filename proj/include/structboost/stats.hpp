#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "structboost/errors.hpp"

namespace structboost {

namespace detail {

// Continued fraction for the regularized incomplete beta function, evaluated
// with the modified Lentz method.
inline double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * detail::incomplete_beta_cf(a, b, x) / a;
  return 1 - front * detail::incomplete_beta_cf(b, a, 1 - x) / b;
}

// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof`
// degrees of freedom.
inline double student_t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0;
  return regularized_incomplete_beta(dof / 2, 0.5, dof / (dof + t * t));
}

struct TTestResult {
  enum class Flag { none, zero_differences, zero_variance };
  double t = 0;
  double p = 1;
  std::size_t dof = 0;
  double mean_difference = 0;
  Flag flag = Flag::none;
};

inline const char* to_string(TTestResult::Flag f) {
  switch (f) {
    case TTestResult::Flag::none: return "";
    case TTestResult::Flag::zero_differences: return "zero_differences";
    case TTestResult::Flag::zero_variance: return "zero_variance";
  }
  return "";
}

// Paired t-test on a - b. Conventions for degenerate inputs: all differences
// zero gives t = 0, p = 1; constant non-zero differences give t = +-inf,
// p = 0. Both are flagged.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InsufficientData("paired t-test needs samples of equal length");
  if (a.size() < 2) throw InsufficientData("paired t-test needs at least two pairs");
  const std::size_t n = a.size();
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  TTestResult r;
  r.dof = n - 1;
  r.mean_difference = mean;
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0) {
    if (mean == 0) {
      r.flag = TTestResult::Flag::zero_differences;
      r.t = 0;
      r.p = 1;
    } else {
      r.flag = TTestResult::Flag::zero_variance;
      r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(r.dof));
  return r;
}

}  // namespace structboost
