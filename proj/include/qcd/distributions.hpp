#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcd/dual.hpp"
#include "qcd/numerics.hpp"
#include "qcd/random.hpp"
#include "qcd/schemes.hpp"
#include "qcd/transforms.hpp"

namespace qcd {

// ---------------------------------------------------------------------------
// Categorical draws over grid indices.

/// Inverse-CDF sampler over a fixed weight vector.
class CategoricalIndex {
 public:
  explicit CategoricalIndex(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return cumulative_.size(); }
  double weight(std::size_t n) const;

 private:
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Generic quadrature compound.

/// Conditional family z -> p(x | z). `log_prob` is required; `sample` may be
/// empty for families without a sampler.
template <class X>
struct Conditional {
  std::function<double(std::span<const double> z, const X& x)> log_prob;
  std::function<X(std::span<const double> z, Rng& rng)> sample;
};

/// q_N(x) = Σ_n w_n p(x | z_n). A valid probability function for every grid.
template <class X>
struct QuadratureCompound {
  QuadratureGrid<double> grid;
  Conditional<X> conditional;
};

template <class X>
double qc_log_prob(const QuadratureCompound<X>& qc, const X& x) {
  std::vector<double> terms;
  terms.reserve(qc.grid.size());
  for (std::size_t n = 0; n < qc.grid.size(); ++n) {
    if (qc.grid.weights[n] <= 0.0) continue;
    terms.push_back(std::log(qc.grid.weights[n]) + qc.conditional.log_prob(qc.grid.point(n), x));
  }
  return log_sum_exp(terms);
}

template <class X>
double qc_prob(const QuadratureCompound<X>& qc, const X& x) {
  return std::exp(qc_log_prob(qc, x));
}

/// Two-step draw: grid index from the weights, then x from p(x | z_n).
template <class X>
X qc_sample(const QuadratureCompound<X>& qc, Rng& rng) {
  if (!qc.conditional.sample) throw UnsupportedError("qc_sample: conditional has no sampler");
  const CategoricalIndex index(qc.grid.weights);
  return qc.conditional.sample(qc.grid.point(index.sample(rng)), rng);
}

Conditional<long> poisson_conditional();

// ---------------------------------------------------------------------------
// Poisson-LogNormal quadrature compound.

/// Equal-weight half-line quantile-midpoint grid of LogNormal(mu, sigma)
/// mixed into Poisson rates. Generic in the scalar so that the whole path
/// (quantiles, midpoints, pmf) can be differentiated.
template <class T>
class PoissonLogNormalQC {
 public:
  PoissonLogNormalQC(T mu, T sigma, int n) : mu_(mu), sigma_(sigma), n_(n) {
    if (!(value_of(sigma) > 0.0)) throw DomainError("PoissonLogNormalQC: sigma must be positive");
    if (n < 2) throw DomainError("PoissonLogNormalQC: N must be at least 2");
    QuantileFunction<T> q{[mu, sigma](double p) { return lognormal_quantile(p, mu, sigma); },
                          Support::half_line()};
    grid_ = quantile_midpoint_halfline(q, n);
  }

  const T& mu() const { return mu_; }
  const T& sigma() const { return sigma_; }
  int n() const { return n_; }
  const QuadratureGrid<T>& grid() const { return grid_; }

  T log_pmf(long x) const {
    std::vector<T> terms;
    terms.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      using std::log;
      terms.push_back(log(grid_.weights[i]) + poisson_log_pmf(x, grid_.z(i)));
    }
    return log_sum_exp_generic<T>(terms);
  }

  T pmf(long x) const {
    using std::exp;
    if (x < 0) return T(0.0);
    return exp(log_pmf(x));
  }

  /// Smallest X with Σ_n w_n P[Poisson(z_n) > X] below `tail` (Chernoff bound).
  long truncation_point(double tail = 1e-12) const;

  /// Σ_{x=0}^{X} pmf(x) with X from truncation_point.
  double total_mass(double tail = 1e-12) const {
    const long stop = truncation_point(tail);
    double acc = 0.0;
    for (long x = 0; x <= stop; ++x) acc += value_of(pmf(x));
    return acc;
  }

  /// Equivalent generic compound (value parts only), for sampling.
  QuadratureCompound<long> compound() const {
    return {grid_values(grid_), poisson_conditional()};
  }

 private:
  T mu_;
  T sigma_;
  int n_;
  QuadratureGrid<T> grid_;
};

/// Chernoff bound on P[Poisson(rate) > x].
double poisson_upper_tail_bound(double rate, long x);

template <class T>
long PoissonLogNormalQC<T>::truncation_point(double tail) const {
  double max_rate = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) max_rate = std::max(max_rate, value_of(grid_.z(i)));
  long x = static_cast<long>(std::ceil(max_rate));
  for (;; x += 1 + x / 16) {
    double bound = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      bound += value_of(grid_.weights[i]) * poisson_upper_tail_bound(value_of(grid_.z(i)), x);
    }
    if (bound < tail) return x;
  }
}

/// (dq/dmu, dq/dsigma) at x, by forward-mode differentiation of the full pipeline.
std::pair<double, double> plqc_grad(double mu, double sigma, int n, long x);

// ---------------------------------------------------------------------------
// Mixture-weight laws.

/// Symmetric scalar law g_c of the i.i.d. logit perturbations.
struct ComponentLaw {
  std::string name;
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  std::function<double(Rng&)> sample;
  bool is_standard_normal = false;
};

ComponentLaw standard_normal_component();
ComponentLaw logistic_component();

enum class WeightMode { sigmoid, softmax };

/// Z = Softmax(σπ + σU) over the simplex (softmax mode, M logits and M+1
/// weights), or Z = Sigmoid(σπ + σU) in (0,1) (sigmoid mode, M = 1, the
/// two weights being (Z, 1 - Z)).
struct MixtureWeightLaw {
  std::vector<double> pi;
  double sigma = 1.0;
  ComponentLaw component = standard_normal_component();
  WeightMode mode = WeightMode::sigmoid;

  int m() const { return static_cast<int>(pi.size()); }
  /// Number of mixture weights (M + 1).
  int weight_count() const { return m() + 1; }
  void validate() const;

  /// u -> weights map: chain of affine(σπ, σ) and the sigmoid or centered softmax.
  Diffeomorphism<double> weight_map() const;
  /// Quantile of Z in sigmoid mode.
  double quantile(double p) const;
  /// Density of Z in sigmoid mode; zero outside (0,1).
  double density(double z) const;
  /// A full weight vector of length M + 1.
  std::vector<double> sample(Rng& rng) const;
};

/// Builds a sigmoid-mode law from the logit bias b and scale σ, i.e. Z = Sigmoid(b + σU).
MixtureWeightLaw sigmoid_law_from_bias(double bias, double sigma);

enum class SchemeKind { quantile_midpoint, sqrt_quantile, hermite_pushforward, cubature };

std::string_view scheme_name(SchemeKind s);
SchemeKind parse_scheme(std::string_view name);

/// Grid over (0,1) in sigmoid mode or over the simplex interior in softmax
/// mode. In softmax mode `n` is the per-axis count K for the cubature scheme.
QuadratureGrid<double> mixture_weight_grid(const MixtureWeightLaw& law, int n, SchemeKind scheme);

/// P[Z^i > Z^j] for weight indices i != j in [0, M]; index M is the weight
/// with the implicit zero logit. Independent of σ.
double prob_component_larger(const MixtureWeightLaw& law, int i, int j);

// ---------------------------------------------------------------------------
// Vector diffeomixture.

struct LocationScale {
  Eigen::VectorXd loc;
  Eigen::MatrixXd scale;
};

/// Base density r on R^d; must expose a log-density and a sampler.
struct BaseDensity {
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> log_density;
  std::function<Eigen::VectorXd(Rng&)> sample;
  bool is_standard_normal = false;
};

BaseDensity standard_normal_base(int dim);

/// q(x) = Σ_n w_n |det L(z_n)|⁻¹ r(L(z_n)⁻¹ (x - μ(z_n))) with
/// μ(z) = Σ_m z^m μ^m and L(z) = Σ_m z^m L^m.
///
/// A grid with dim = 1 is read as the sigmoid identification (z, 1 - z) and
/// needs two components; otherwise the grid dim must equal the component count.
class VectorDiffeomixture {
 public:
  VectorDiffeomixture(QuadratureGrid<double> weights_grid, std::vector<LocationScale> components,
                      BaseDensity base);

  int dim() const { return dim_; }
  const QuadratureGrid<double>& grid() const { return grid_; }
  const std::vector<LocationScale>& components() const { return components_; }
  const BaseDensity& base() const { return base_; }

  /// Mixing weights (z^0, ..., z^M) of grid point n.
  const std::vector<double>& mixing_weights(std::size_t n) const { return z_[n]; }
  const Eigen::VectorXd& location(std::size_t n) const { return loc_[n]; }
  const Eigen::MatrixXd& scale(std::size_t n) const { return scale_[n]; }

  double log_density(const Eigen::VectorXd& x) const;
  double density(const Eigen::VectorXd& x) const { return std::exp(log_density(x)); }

  /// H_{z_n}(v) = μ(z_n) + L(z_n) v.
  Eigen::VectorXd transform(std::size_t n, const Eigen::VectorXd& v) const;

  /// Three-step draw: index, base draw, then H_z.
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  QuadratureGrid<double> grid_;
  std::vector<LocationScale> components_;
  BaseDensity base_;
  int dim_ = 1;
  CategoricalIndex index_;
  std::vector<std::vector<double>> z_;
  std::vector<Eigen::VectorXd> loc_;
  std::vector<Eigen::MatrixXd> scale_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::vector<double> log_abs_det_;
};

}  // namespace qcd
