#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace qcd {

/// Forward-mode dual number carrying a value and its derivative with respect
/// to a single designated parameter.
struct Dual {
  double value = 0.0;
  double derivative = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: constants promote implicitly
  constexpr Dual(double v, double d) : value(v), derivative(d) {}

  /// A seeded variable: d/dλ λ = 1.
  static constexpr Dual variable(double v) { return {v, 1.0}; }

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    derivative += o.derivative;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    derivative -= o.derivative;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    derivative = derivative * o.value + value * o.derivative;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    derivative = (derivative * o.value - value * o.derivative) / (o.value * o.value);
    value /= o.value;
    return *this;
  }
};

constexpr Dual operator-(const Dual& a) { return {-a.value, -a.derivative}; }
constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }

// Comparisons look at the value only.
constexpr bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
constexpr bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
constexpr bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
constexpr bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
constexpr bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }

inline std::ostream& operator<<(std::ostream& os, const Dual& a) {
  return os << a.value << " + " << a.derivative << "ε";
}

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return {e, e * a.derivative};
}
inline Dual log(const Dual& a) { return {std::log(a.value), a.derivative / a.value}; }
inline Dual log1p(const Dual& a) {
  return {std::log1p(a.value), a.derivative / (1.0 + a.value)};
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.value);
  return {s, a.derivative / (2.0 * s)};
}
inline Dual abs(const Dual& a) {
  return a.value < 0.0 ? -a : a;
}
inline Dual pow(const Dual& a, double k) {
  const double p = std::pow(a.value, k);
  return {p, k * std::pow(a.value, k - 1.0) * a.derivative};
}
inline Dual sin(const Dual& a) {
  return {std::sin(a.value), std::cos(a.value) * a.derivative};
}
inline Dual cos(const Dual& a) {
  return {std::cos(a.value), -std::sin(a.value) * a.derivative};
}
inline bool isfinite(const Dual& a) {
  return std::isfinite(a.value) && std::isfinite(a.derivative);
}

template <class T>
inline constexpr bool is_dual_v = std::is_same_v<std::remove_cvref_t<T>, Dual>;

/// Value part of a scalar, for double or Dual.
constexpr double value_of(double x) { return x; }
constexpr double value_of(const Dual& x) { return x.value; }

constexpr double derivative_of(double) { return 0.0; }
constexpr double derivative_of(const Dual& x) { return x.derivative; }

/// Logistic sigmoid, stable for large |t|.
template <class T>
T sigmoid(const T& t) {
  using std::exp;
  if (value_of(t) >= 0.0) {
    const T e = exp(-t);
    return T(1.0) / (T(1.0) + e);
  }
  const T e = exp(t);
  return e / (T(1.0) + e);
}

/// log(1 + e^t) without overflow.
template <class T>
T softplus(const T& t) {
  using std::exp;
  using std::log1p;
  if (value_of(t) > 0.0) return t + log1p(exp(-t));
  return log1p(exp(t));
}

/// Heaviside step H(t) = 1[t > 0]; its derivative is zero almost everywhere.
template <class T>
T step(const T& t) {
  return T(value_of(t) > 0.0 ? 1.0 : 0.0);
}

}  // namespace qcd
