#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcd/dual.hpp"

namespace qcd {

namespace detail {

inline double error_size(double x) { return std::abs(x); }
inline double error_size(const Dual& x) {
  return std::max(std::abs(x.value), std::abs(x.derivative));
}

template <class T, class F>
T simpson_recurse(const F& f, double a, double b, const T& fa, const T& fm, const T& fb,
                  const T& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = T((m - a) / 6.0) * (fa + T(4.0) * flm + fm);
  const T right = T((b - m) / 6.0) * (fm + T(4.0) * frm + fb);
  const T delta = left + right - whole;
  const double err = error_size(delta);
  if (depth <= 0 || err <= 15.0 * tol || err <= 1e-14 * error_size(left + right) ||
      !(b - a > 1e-300)) {
    return left + right + delta / T(15.0);
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// The range is first split into `panels` equal pieces so that narrow
/// features are not skipped by the coarse first pass. f may return double
/// or Dual; for Dual the derivative part is error-controlled as well.
template <class F>
auto adaptive_simpson(const F& f, double a, double b, double tol, int panels = 16,
                      int max_depth = 40) {
  using T = std::remove_cvref_t<decltype(f(a))>;
  if (panels < 1) panels = 1;
  T total(0.0);
  if (a == b) return total;
  const double h = (b - a) / panels;
  const double panel_tol = tol / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
    const T flo = f(lo);
    const T fhi = f(hi);
    const T fm = f(0.5 * (lo + hi));
    const T whole = T((hi - lo) / 6.0) * (flo + T(4.0) * fm + fhi);
    total += detail::simpson_recurse(f, lo, hi, flo, fm, fhi, whole, panel_tol, max_depth);
  }
  return total;
}

/// ∫_lo^hi f with limits that may themselves carry a derivative (Leibniz rule).
template <class T, class F>
T integrate_with_limits(const F& f, const T& lo, const T& hi, double tol, int panels = 16) {
  T body = adaptive_simpson(f, value_of(lo), value_of(hi), tol, panels);
  if constexpr (is_dual_v<T>) {
    body.derivative += value_of(f(hi.value)) * hi.derivative -
                       value_of(f(lo.value)) * lo.derivative;
  }
  return body;
}

}  // namespace qcd
