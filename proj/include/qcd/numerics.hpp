#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qcd/dual.hpp"

namespace qcd {

/// Raised when an argument lies outside the mathematical domain of an
/// operation (probability outside (0,1), zero scale, empty grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a request is well-formed but not supported by the chosen
/// scheme or distribution mode.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a construction would exceed a fixed resource budget.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398614;

double std_normal_pdf(double x);
double std_normal_log_pdf(double x);

/// Φ(x) computed from erfc; absolute error near machine precision.
double std_normal_cdf(double x);

/// Φ(x) on a dual number: derivative φ(x)·x'.
inline Dual std_normal_cdf(const Dual& x) {
  return {std_normal_cdf(x.value), std_normal_pdf(x.value) * x.derivative};
}

/// Φ⁻¹(p) for p in (0,1). Rational approximation polished with a Halley
/// step against the cdf. Throws DomainError outside (0,1).
double std_normal_quantile(double p);

/// exp(mu + sigma Φ⁻¹(p)); works for double or Dual parameters.
template <class T>
T lognormal_quantile(double p, const T& mu, const T& sigma) {
  using std::exp;
  if (!(value_of(sigma) > 0.0)) throw DomainError("lognormal_quantile: sigma must be positive");
  return exp(mu + sigma * T(std_normal_quantile(p)));
}

/// Gauss rule against the standard normal density (probabilists' Hermite).
/// Nodes ascending and symmetric about zero; weights positive and sum to one.
struct HermiteRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on the orthonormal three-term recurrence.
/// Valid for 1 <= n <= 200.
HermiteRule hermite_rule(int n);

/// log(x!) for x >= 0; exact table for small x, Stirling series beyond.
double log_factorial(long x);

/// Poisson log-pmf x log z - z - log x!, generic in the rate.
template <class T>
T poisson_log_pmf(long x, const T& rate) {
  using std::log;
  if (x < 0) return T(-INFINITY);
  if (value_of(rate) <= 0.0) {
    return T(x == 0 ? 0.0 : -INFINITY);
  }
  return T(static_cast<double>(x)) * log(rate) - rate - T(log_factorial(x));
}

/// log Σ exp(terms); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> terms);

/// Dual-aware log-sum-exp.
template <class T>
T log_sum_exp_generic(std::span<const T> terms) {
  using std::exp;
  using std::log;
  double m = -INFINITY;
  for (const auto& t : terms) m = std::max(m, value_of(t));
  if (!std::isfinite(m)) return T(m);
  T acc(0.0);
  for (const auto& t : terms) acc += exp(t - T(m));
  return T(m) + log(acc);
}

}  // namespace qcd
