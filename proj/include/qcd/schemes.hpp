#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcd/dual.hpp"
#include "qcd/integrate.hpp"
#include "qcd/numerics.hpp"
#include "qcd/transforms.hpp"

namespace qcd {

/// Points and weights of a discretized mixing law.
///
/// Points are stored row-major with `dim` coordinates each, so the same type
/// carries scalar grids (dim = 1) and simplex grids (dim = M + 1). Weights are
/// nonnegative and sum to one. `reparameterizable` is true when the weights
/// do not depend on the mixing law's parameters.
template <class T>
struct QuadratureGrid {
  int dim = 1;
  std::vector<T> coords;
  std::vector<T> weights;
  bool reparameterizable = true;

  std::size_t size() const { return weights.size(); }
  std::span<const T> point(std::size_t n) const {
    return std::span<const T>(coords).subspan(n * static_cast<std::size_t>(dim),
                                              static_cast<std::size_t>(dim));
  }
  /// Scalar point; only meaningful when dim == 1.
  const T& z(std::size_t n) const { return coords[n * static_cast<std::size_t>(dim)]; }
};

/// Value part of a (possibly dual) grid.
template <class T>
QuadratureGrid<double> grid_values(const QuadratureGrid<T>& g) {
  QuadratureGrid<double> out;
  out.dim = g.dim;
  out.reparameterizable = g.reparameterizable;
  out.coords.reserve(g.coords.size());
  out.weights.reserve(g.weights.size());
  for (const auto& c : g.coords) out.coords.push_back(value_of(c));
  for (const auto& w : g.weights) out.weights.push_back(value_of(w));
  return out;
}

/// Checks nonnegative weights summing to one within `tol`, and for scalar
/// grids nondecreasing points. Throws DomainError on violation.
template <class T>
void validate_grid(const QuadratureGrid<T>& g, double tol = 1e-12) {
  if (g.size() == 0) throw DomainError("grid: no points");
  if (g.coords.size() != g.size() * static_cast<std::size_t>(g.dim)) {
    throw DomainError("grid: coordinate count does not match weights");
  }
  double total = 0.0;
  for (const auto& w : g.weights) {
    if (!(value_of(w) >= 0.0)) throw DomainError("grid: negative or NaN weight");
    total += value_of(w);
  }
  if (std::abs(total - 1.0) > tol) throw DomainError("grid: weights do not sum to one");
  if (g.dim == 1) {
    for (std::size_t n = 1; n < g.size(); ++n) {
      if (value_of(g.z(n)) < value_of(g.z(n - 1))) {
        throw DomainError("grid: scalar points must be nondecreasing");
      }
    }
  }
}

enum class SupportKind { bounded, half_line, full_line };

struct Support {
  SupportKind kind = SupportKind::full_line;
  double lo = -INFINITY;
  double hi = INFINITY;

  static Support bounded(double a, double b) { return {SupportKind::bounded, a, b}; }
  static Support half_line() { return {SupportKind::half_line, 0.0, INFINITY}; }
  static Support full_line() { return {}; }
};

/// Strictly increasing map p in (0,1) -> support point.
template <class T>
struct QuantileFunction {
  std::function<T(double)> quantile;
  Support support;
};

namespace detail {

// Consecutive quantiles must differ unless they have saturated onto a support
// endpoint in floating point.
template <class T>
void check_quantiles_strict(const std::vector<T>& nu, const Support& s) {
  for (std::size_t n = 1; n < nu.size(); ++n) {
    const double a = value_of(nu[n - 1]);
    const double b = value_of(nu[n]);
    if (!(b >= a)) throw DomainError("quantiles are not increasing");
    if (b == a && a != s.lo && a != s.hi) {
      throw DomainError("degenerate quantiles: density vanishes on an interior interval");
    }
  }
}

template <class T>
QuadratureGrid<T> midpoints_equal_weight(const std::vector<T>& nu) {
  const std::size_t n = nu.size() - 1;
  QuadratureGrid<T> g;
  g.dim = 1;
  g.reparameterizable = true;
  g.coords.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) g.coords.push_back((nu[i - 1] + nu[i]) / T(2.0));
  g.weights.assign(n, T(1.0 / static_cast<double>(n)));
  return g;
}

}  // namespace detail

/// Equal-weight grid at midpoints of consecutive n/N quantiles; the outer
/// endpoints are the support endpoints.
template <class T>
QuadratureGrid<T> quantile_midpoint_bounded(const QuantileFunction<T>& q, int n) {
  if (q.support.kind != SupportKind::bounded) {
    throw DomainError("quantile_midpoint_bounded: support must be a bounded interval");
  }
  if (n < 1) throw DomainError("quantile_midpoint_bounded: N must be positive");
  std::vector<T> nu(static_cast<std::size_t>(n) + 1);
  nu.front() = T(q.support.lo);
  nu.back() = T(q.support.hi);
  for (int i = 1; i < n; ++i) nu[i] = q.quantile(static_cast<double>(i) / n);
  detail::check_quantiles_strict(nu, q.support);
  return detail::midpoints_equal_weight(nu);
}

/// Equal-weight midpoint grid on [0, ∞): ν_0 = 0, ν_n the n/N quantiles for
/// n < N, and the last endpoint extrapolated linearly from the two before it.
template <class T>
QuadratureGrid<T> quantile_midpoint_halfline(const QuantileFunction<T>& q, int n) {
  if (q.support.kind != SupportKind::half_line) {
    throw DomainError("quantile_midpoint_halfline: support must be [0, inf)");
  }
  if (n < 2) throw DomainError("quantile_midpoint_halfline: N must be at least 2");
  std::vector<T> nu(static_cast<std::size_t>(n) + 1);
  nu[0] = T(0.0);
  for (int i = 1; i < n; ++i) nu[i] = q.quantile(static_cast<double>(i) / n);
  nu[n] = nu[n - 1] + (nu[n - 1] - nu[n - 2]);
  detail::check_quantiles_strict(nu, q.support);
  return detail::midpoints_equal_weight(nu);
}

/// Midpoint grid whose cell endpoints are the n/N quantiles of the law with
/// density proportional to √p, weighted by the exact cell probabilities of p.
///
/// Integration runs in the logistic coordinate z = a + (b - a) sigmoid(t),
/// which turns boundary layers of p into smooth tails. Cumulative √p mass is
/// tabulated on 4096 cells of t ∈ [-40, 40] by adaptive Simpson; each
/// endpoint is bracketed in the table and refined by bisection. With dual
/// densities the endpoint derivatives follow from the implicit function
/// theorem and the weights from the Leibniz rule.
template <class T>
QuadratureGrid<T> sqrt_quantile_midpoint(const std::function<T(double)>& density,
                                         const Support& support, int n) {
  using std::sqrt;
  if (support.kind != SupportKind::bounded || !std::isfinite(support.lo) ||
      !std::isfinite(support.hi) || !(support.hi > support.lo)) {
    throw DomainError("sqrt_quantile_midpoint: support must be a bounded interval");
  }
  if (n < 1) throw DomainError("sqrt_quantile_midpoint: N must be positive");

  constexpr int kTable = 4096;
  constexpr double kT = 40.0;
  constexpr double kTol = 1e-10;
  const double a = support.lo;
  const double width = support.hi - support.lo;

  auto z_of = [a, width](double t) { return a + width * sigmoid(t); };
  auto jac = [width](double t) { return width * sigmoid(t) * sigmoid(-t); };
  auto p_at = [&](double t) -> T {
    const double z = z_of(t);
    if (!(z > support.lo && z < support.hi)) return T(0.0);
    T p = density(z);
    if (!std::isfinite(value_of(p)) || value_of(p) <= 0.0) return T(0.0);
    return p;
  };
  auto root_mass = [&](double t) -> T {
    const T p = p_at(t);
    if (value_of(p) <= 0.0) return T(0.0);
    return sqrt(p) * T(jac(t));
  };
  auto mass = [&](double t) -> T { return p_at(t) * T(jac(t)); };

  const double h = 2.0 * kT / kTable;
  std::vector<T> cum(kTable + 1, T(0.0));
  for (int i = 0; i < kTable; ++i) {
    const double lo = -kT + i * h;
    cum[i + 1] = cum[i] + adaptive_simpson(root_mass, lo, lo + h, kTol / kTable, 1);
  }
  const T total = cum.back();
  if (!(value_of(total) > 0.0)) throw DomainError("sqrt_quantile_midpoint: density has no mass");

  // Endpoints in the t coordinate, with derivatives when T is dual.
  std::vector<T> t_end(static_cast<std::size_t>(n) + 1);
  t_end.front() = T(-kT);
  t_end.back() = T(kT);
  for (int k = 1; k < n; ++k) {
    const double frac = static_cast<double>(k) / n;
    const double target = frac * value_of(total);
    auto it = std::upper_bound(cum.begin(), cum.end(), target,
                               [](double v, const T& c) { return v < value_of(c); });
    int seg = static_cast<int>(std::distance(cum.begin(), it)) - 1;
    seg = std::clamp(seg, 0, kTable - 1);
    const double seg_lo = -kT + seg * h;
    const double base = value_of(cum[seg]);
    double lo = seg_lo;
    double hi = seg_lo + h;
    for (int it2 = 0; it2 < 60 && hi - lo > 1e-14; ++it2) {
      const double mid = 0.5 * (lo + hi);
      const double part = value_of(adaptive_simpson(root_mass, seg_lo, mid, kTol / kTable, 1));
      if (base + part < target) lo = mid; else hi = mid;
    }
    const double t_star = 0.5 * (lo + hi);
    T tk(t_star);
    if constexpr (is_dual_v<T>) {
      const T partial = cum[seg] + adaptive_simpson(root_mass, seg_lo, t_star, kTol / kTable, 1);
      const double g = value_of(root_mass(t_star));
      if (!(g > 0.0)) throw DomainError("sqrt_quantile_midpoint: density vanishes at an endpoint");
      tk.derivative = (frac * total.derivative - partial.derivative) / g;
    }
    t_end[k] = tk;
  }

  std::vector<T> z_end(t_end.size());
  for (std::size_t k = 0; k < t_end.size(); ++k) z_end[k] = T(a) + T(width) * sigmoid(t_end[k]);
  z_end.front() = T(support.lo);
  z_end.back() = T(support.hi);

  QuadratureGrid<T> g;
  g.dim = 1;
  g.reparameterizable = false;
  T weight_total(0.0);
  for (int k = 1; k <= n; ++k) {
    const T w = integrate_with_limits<T>(mass, t_end[k - 1], t_end[k], kTol, 64);
    const T zk = (z_end[k - 1] + z_end[k]) / T(2.0);
    if (!(value_of(density(value_of(zk))) > 0.0)) {
      throw DomainError("sqrt_quantile_midpoint: density is not positive on a grid cell");
    }
    g.coords.push_back(zk);
    g.weights.push_back(w);
    weight_total += w;
  }
  for (auto& w : g.weights) w /= weight_total;
  return g;
}

/// Points F(u_n) with the base weights.
template <class T>
QuadratureGrid<T> pushforward_scheme(const QuadratureGrid<double>& base,
                                     const Diffeomorphism<T>& f) {
  if (f.in_dim() != base.dim) throw DomainError("pushforward_scheme: dimension mismatch");
  QuadratureGrid<T> g;
  g.dim = f.out_dim();
  g.reparameterizable = base.reparameterizable;
  g.coords.reserve(base.size() * static_cast<std::size_t>(g.dim));
  for (std::size_t n = 0; n < base.size(); ++n) {
    const auto u = base.point(n);
    std::vector<T> ut(u.begin(), u.end());
    const auto z = f.forward(std::span<const T>(ut));
    g.coords.insert(g.coords.end(), z.begin(), z.end());
  }
  g.weights.assign(base.weights.begin(), base.weights.end());
  return g;
}

/// Hermite rule as a grid against the standard normal.
QuadratureGrid<double> hermite_grid(int n);

template <class T>
QuadratureGrid<T> gauss_hermite_pushforward(int n, const Diffeomorphism<T>& f) {
  return pushforward_scheme(hermite_grid(n), f);
}

/// Equal-probability product cells of a law with i.i.d. components, mapped
/// to the simplex by F. Each cell is represented by the per-axis quantile at
/// (k - 1/2)/K; points are emitted in lexicographic order of (k_1, ..., k_M).
template <class T>
QuadratureGrid<T> cubature_constant_probability(int k, int m,
                                                const std::function<double(double)>& component_quantile,
                                                const Diffeomorphism<T>& f) {
  if (k < 1 || m < 1) throw DomainError("cubature: K and M must be positive");
  if (f.in_dim() != m) throw DomainError("cubature: map input dimension must equal M");
  const double count = std::pow(static_cast<double>(k), m);
  if (count > 1e6) throw ResourceError("cubature: K^M exceeds 10^6 points");
  std::vector<double> reps(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) reps[i] = component_quantile((i + 0.5) / k);

  const auto total = static_cast<std::size_t>(count);
  QuadratureGrid<T> g;
  g.dim = f.out_dim();
  g.reparameterizable = true;
  g.coords.reserve(total * static_cast<std::size_t>(g.dim));
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<T> u(static_cast<std::size_t>(m));
  for (std::size_t c = 0; c < total; ++c) {
    for (int j = 0; j < m; ++j) u[j] = T(reps[idx[j]]);
    const auto z = f.forward(std::span<const T>(u));
    g.coords.insert(g.coords.end(), z.begin(), z.end());
    for (int j = m - 1; j >= 0; --j) {
      if (++idx[j] < k) break;
      idx[j] = 0;
    }
  }
  g.weights.assign(total, T(1.0 / static_cast<double>(total)));
  return g;
}

}  // namespace qcd
