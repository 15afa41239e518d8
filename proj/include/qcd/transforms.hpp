#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcd/dual.hpp"
#include "qcd/numerics.hpp"

namespace qcd {

/// Invertible smooth map between open subsets of R^in and R^out (for the
/// simplex-valued maps, out = in + 1 and all coordinates are stored).
///
/// The log-determinant is that of the inverse map's Jacobian, evaluated at
/// an image point. For simplex-valued maps it is taken in the chart given by
/// the first `in` coordinates.
template <class T>
class Diffeomorphism {
 public:
  using Vec = std::vector<T>;
  using Map = std::function<Vec(std::span<const T>)>;
  using LogDet = std::function<T(std::span<const T>)>;
  using Contains = std::function<bool(std::span<const T>)>;

  Diffeomorphism(int in_dim, int out_dim, Map forward, Map inverse, LogDet log_det_inverse,
                 Contains image_contains, std::string name)
      : in_dim_(in_dim),
        out_dim_(out_dim),
        forward_(std::move(forward)),
        inverse_(std::move(inverse)),
        log_det_inverse_(std::move(log_det_inverse)),
        image_contains_(std::move(image_contains)),
        name_(std::move(name)) {}

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::string& name() const { return name_; }

  Vec forward(std::span<const T> x) const { return forward_(x); }
  Vec inverse(std::span<const T> y) const { return inverse_(y); }
  T log_abs_det_jacobian_inverse(std::span<const T> y) const { return log_det_inverse_(y); }
  bool image_contains(std::span<const T> y) const { return image_contains_(y); }

  // Scalar conveniences for maps R -> R.
  T forward(const T& x) const { return forward_(std::span<const T>(&x, 1))[0]; }
  T inverse(const T& y) const { return inverse_(std::span<const T>(&y, 1))[0]; }
  T log_abs_det_jacobian_inverse(const T& y) const {
    return log_det_inverse_(std::span<const T>(&y, 1));
  }

 private:
  int in_dim_;
  int out_dim_;
  Map forward_;
  Map inverse_;
  LogDet log_det_inverse_;
  Contains image_contains_;
  std::string name_;
};

template <class T>
Diffeomorphism<T> identity(int dim = 1) {
  using Vec = std::vector<T>;
  auto copy = [](std::span<const T> x) { return Vec(x.begin(), x.end()); };
  return Diffeomorphism<T>(
      dim, dim, copy, copy, [](std::span<const T>) { return T(0.0); },
      [](std::span<const T>) { return true; }, "identity");
}

/// u -> shift + scale * u, componentwise. A length-1 shift broadcasts.
template <class T>
Diffeomorphism<T> affine(std::vector<T> shift, T scale, int dim = 1) {
  using Vec = std::vector<T>;
  using std::abs;
  using std::log;
  if (value_of(scale) == 0.0) throw DomainError("affine: scale must be nonzero");
  if (dim < 1) throw DomainError("affine: dim must be positive");
  if (shift.empty()) shift.assign(1, T(0.0));
  if (shift.size() != 1 && static_cast<int>(shift.size()) != dim) {
    throw DomainError("affine: shift length must be 1 or dim");
  }
  auto shift_at = [shift](std::size_t i) { return shift.size() == 1 ? shift[0] : shift[i]; };
  const T log_det = -T(static_cast<double>(dim)) * log(abs(scale));
  return Diffeomorphism<T>(
      dim, dim,
      [shift_at, scale](std::span<const T> u) {
        Vec y(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) y[i] = shift_at(i) + scale * u[i];
        return y;
      },
      [shift_at, scale](std::span<const T> y) {
        Vec u(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) u[i] = (y[i] - shift_at(i)) / scale;
        return u;
      },
      [log_det](std::span<const T>) { return log_det; },
      [](std::span<const T>) { return true; }, "affine");
}

template <class T>
Diffeomorphism<T> affine(T shift, T scale) {
  return affine<T>(std::vector<T>{shift}, scale, 1);
}

/// Logistic map R -> (0,1); inverse is the logit.
template <class T>
Diffeomorphism<T> sigmoid_map() {
  using Vec = std::vector<T>;
  using std::log;
  using std::log1p;
  auto in_unit = [](std::span<const T> y) {
    return value_of(y[0]) > 0.0 && value_of(y[0]) < 1.0;
  };
  return Diffeomorphism<T>(
      1, 1, [](std::span<const T> t) { return Vec{sigmoid(t[0])}; },
      [in_unit](std::span<const T> y) {
        if (!in_unit(y)) throw DomainError("sigmoid inverse: argument must lie in (0,1)");
        return Vec{log(y[0]) - log1p(-y[0])};
      },
      [in_unit](std::span<const T> y) {
        if (!in_unit(y)) throw DomainError("sigmoid inverse: argument must lie in (0,1)");
        return -log(y[0]) - log1p(-y[0]);
      },
      in_unit, "sigmoid");
}

/// Centered softmax R^M -> interior of the M-simplex, stored with all M+1
/// coordinates: y_m = e^{t_m} / (1 + Σ e^{t_j}) for m < M, y_M = 1 / (1 + Σ e^{t_j}).
template <class T>
Diffeomorphism<T> centered_softmax(int m) {
  using Vec = std::vector<T>;
  using std::exp;
  using std::log;
  if (m < 1) throw DomainError("centered_softmax: M must be at least 1");
  auto interior = [m](std::span<const T> y) {
    if (static_cast<int>(y.size()) != m + 1) return false;
    for (const auto& c : y) {
      if (!(value_of(c) > 0.0)) return false;
    }
    return true;
  };
  return Diffeomorphism<T>(
      m, m + 1,
      [m](std::span<const T> t) {
        double shift = 0.0;
        for (int j = 0; j < m; ++j) shift = std::max(shift, value_of(t[j]));
        Vec y(m + 1);
        T denom = exp(T(-shift));
        for (int j = 0; j < m; ++j) {
          y[j] = exp(t[j] - T(shift));
          denom += y[j];
        }
        y[m] = exp(T(-shift));
        for (auto& c : y) c /= denom;
        return y;
      },
      [m, interior](std::span<const T> y) {
        if (!interior(y)) throw DomainError("centered_softmax inverse: point not in simplex interior");
        Vec t(m);
        const T last = log(y[m]);
        for (int j = 0; j < m; ++j) t[j] = log(y[j]) - last;
        return t;
      },
      [interior](std::span<const T> y) {
        if (!interior(y)) throw DomainError("centered_softmax inverse: point not in simplex interior");
        T acc(0.0);
        for (const auto& c : y) acc -= log(c);
        return acc;
      },
      interior, "centered_softmax");
}

/// Composition applying parts in list order: chain({f, g})(x) = g(f(x)).
/// An empty list is the identity.
template <class T>
Diffeomorphism<T> chain(std::vector<Diffeomorphism<T>> parts) {
  using Vec = std::vector<T>;
  if (parts.empty()) return identity<T>();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i - 1].out_dim() != parts[i].in_dim()) {
      throw DomainError("chain: incompatible dimensions between parts");
    }
  }
  const int in_dim = parts.front().in_dim();
  const int out_dim = parts.back().out_dim();
  std::string name = "chain(";
  for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? "," : "") + parts[i].name();
  name += ")";
  auto shared = std::make_shared<const std::vector<Diffeomorphism<T>>>(std::move(parts));
  return Diffeomorphism<T>(
      in_dim, out_dim,
      [shared](std::span<const T> x) {
        Vec cur(x.begin(), x.end());
        for (const auto& p : *shared) cur = p.forward(std::span<const T>(cur));
        return cur;
      },
      [shared](std::span<const T> y) {
        Vec cur(y.begin(), y.end());
        for (auto it = shared->rbegin(); it != shared->rend(); ++it) {
          cur = it->inverse(std::span<const T>(cur));
        }
        return cur;
      },
      [shared](std::span<const T> y) {
        Vec cur(y.begin(), y.end());
        T acc(0.0);
        for (auto it = shared->rbegin(); it != shared->rend(); ++it) {
          acc += it->log_abs_det_jacobian_inverse(std::span<const T>(cur));
          cur = it->inverse(std::span<const T>(cur));
        }
        return acc;
      },
      [shared](std::span<const T> y) {
        Vec cur(y.begin(), y.end());
        for (auto it = shared->rbegin(); it != shared->rend(); ++it) {
          if (!it->image_contains(std::span<const T>(cur))) return false;
          if (std::next(it) != shared->rend()) cur = it->inverse(std::span<const T>(cur));
        }
        return true;
      },
      name);
}

/// Density of F(X) for X ~ base: base(F⁻¹(y)) |DF⁻¹(y)|.
struct PushforwardDensity {
  std::function<double(std::span<const double>)> base_density;
  Diffeomorphism<double> map;
};

/// Zero outside the open image of the map.
double pushforward_density_at(const PushforwardDensity& pd, std::span<const double> y);
double pushforward_density_at(const PushforwardDensity& pd, double y);

}  // namespace qcd
