#include "qcd/numerics.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

namespace qcd {

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation, relative error below 1.2e-9.
double acklam_quantile(double p) {
  constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
  constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0,1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  double x = acklam_quantile(p);
  // Halley refinement. Work with the smaller tail to keep the residual exact.
  for (int it = 0; it < 2; ++it) {
    const double e = (p < 0.5) ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
    const double u = e / std_normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

HermiteRule hermite_rule(int n) {
  if (n < 1 || n > 200) {
    throw DomainError("hermite_rule: order must lie in [1, 200], got " + std::to_string(n));
  }
  HermiteRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  // Orthonormal probabilists' Hermite values p_{n}(u) and p_{n-1}(u).
  auto evaluate = [n](double u) {
    double p_prev = 0.0;
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      const double next = (u * p - std::sqrt(static_cast<double>(k)) * p_prev) /
                          std::sqrt(static_cast<double>(k + 1));
      p_prev = p;
      p = next;
    }
    return std::pair{p, p_prev};
  };

  // Positive roots, bracketed by sign changes on a scan of (0, sqrt(4n + 2)),
  // which contains every root. The step stays well below the smallest root
  // spacing (about pi / sqrt(n) near the origin). Each bracket is narrowed by
  // bisection and polished by Newton.
  const int half = n / 2;
  std::vector<double> roots;
  roots.reserve(half);
  const double hi = std::sqrt(4.0 * n + 2.0);
  const double step = 0.05 / std::sqrt(static_cast<double>(n));
  double a = hi;
  double pa = evaluate(a).first;
  while (static_cast<int>(roots.size()) < half && a > 0.0) {
    const double b = std::max(0.0, a - step);
    const double pb = evaluate(b).first;
    if ((pa > 0.0) != (pb > 0.0) && b > 0.0) {
      double lo = b, up = a;
      const bool lo_positive = pb > 0.0;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + up);
        if ((evaluate(mid).first > 0.0) == lo_positive) lo = mid; else up = mid;
      }
      double u = 0.5 * (lo + up);
      for (int it = 0; it < 3; ++it) {
        const auto [p, p_prev] = evaluate(u);
        const double next = u - p / (std::sqrt(static_cast<double>(n)) * p_prev);
        if (!(next >= lo && next <= up)) break;
        u = next;
      }
      roots.push_back(u);
    }
    a = b;
    pa = pb;
  }
  if (static_cast<int>(roots.size()) != half) {
    throw DomainError("hermite_rule: root search failed for order " + std::to_string(n));
  }
  if (n % 2 == 1) roots.push_back(0.0);  // descending order, middle root last

  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    const double u = roots[i];
    const double p_prev = evaluate(u).second;
    const double w = 1.0 / (n * p_prev * p_prev);
    rule.nodes[n - 1 - i] = u;
    rule.nodes[i] = -u;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (auto& w : rule.weights) w /= total;
  return rule;
}

double log_factorial(long x) {
  if (x < 0) throw DomainError("log_factorial: negative argument");
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    t[0] = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = t[k - 1] + std::log(static_cast<double>(k));
    return t;
  }();
  if (x < static_cast<long>(table.size())) return table[static_cast<std::size_t>(x)];
  // Stirling series for log Γ(x+1).
  const double n = static_cast<double>(x);
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  return n * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi * n) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

double log_sum_exp(std::span<const double> terms) {
  double m = -INFINITY;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace qcd
