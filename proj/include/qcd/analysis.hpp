#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcd/distributions.hpp"

namespace qcd {

/// Scalar density given by its log.
struct ScalarDensity {
  std::function<double(double)> log_density;
  double operator()(double x) const { return std::exp(log_density(x)); }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Mixture of unit-variance normals on the line.
struct ScalarMixture {
  std::vector<double> means;
  std::vector<double> weights;

  double log_density(double x) const;
  ScalarDensity as_density() const;
};

/// Density of <X, e> for a diffeomixture whose scales are all the identity
/// and whose component means lie on a common line with direction e.
/// Orthogonal directions carry identical unit normals in both members of a
/// pair of such mixtures, so divergences are unchanged by the reduction.
/// Throws UnsupportedError otherwise.
ScalarMixture reduce_vdm_to_1d(const VectorDiffeomixture& v);

/// ∫ a log(a/b) without clipping; +inf when b vanishes where a does not.
double kl_divergence_unclipped(const ScalarDensity& a, const ScalarDensity& b,
                               const Interval& support, double tol = 1e-6);
/// KL(a‖b) clipped at zero from below.
double kl_divergence(const ScalarDensity& a, const ScalarDensity& b, const Interval& support,
                     double tol = 1e-6);
/// ½∫|a - b|.
double tv_distance(const ScalarDensity& a, const ScalarDensity& b, const Interval& support,
                   double tol = 1e-6);

// ---------------------------------------------------------------------------
// Scheme comparison sweep.

struct SweepConfig {
  /// Logit bias b of Z = Sigmoid(b + σU) for the two-component mixture.
  std::vector<double> pis;
  std::vector<double> sigmas;
  std::vector<int> ns;
  std::vector<double> mus;
  int dim = 10;
  int reference_n = 150;
  std::vector<SchemeKind> schemes;
  double tol = 1e-6;

  void validate() const;
  /// The sweep sets of the original scheme comparison.
  static SweepConfig standard();
};

struct DivergenceReport {
  double pi = 0.0;
  double sigma = 0.0;
  int n = 0;
  double mu = 0.0;
  SchemeKind scheme = SchemeKind::quantile_midpoint;
  double kl_q_p = 0.0;
  double kl_p_q = 0.0;
  double tv = 0.0;
  /// Smallest KL value before clipping (sanity check, expected >= -1e-9).
  double kl_unclipped_min = 0.0;
  std::optional<std::string> error;
};

/// Agreement of alternative 150-point references per (π, σ, μ).
struct ReferenceCheck {
  double max_tv_quantile_schemes = 0.0;  // quant-midpoint vs sqrt-quantile
  double max_tv_hermite = 0.0;           // hermite vs quant-midpoint (diagnostic)
};

struct SweepResult {
  std::vector<DivergenceReport> rows;
  ReferenceCheck reference_check;
};

/// Two-component diffeomixture in R^dim with components at ±μ(1,...,1) and
/// identity scales, mixed by the given weight grid.
VectorDiffeomixture sweep_mixture(const QuadratureGrid<double>& grid, double mu, int dim);

/// Divergences of every configuration against the reference_n-point
/// quantile-midpoint mixture, computed on the 1D reduction. Rows follow the
/// lexicographic order of (pi, sigma, n, mu, scheme) over the config lists.
/// A failing configuration records its error and does not stop the sweep.
SweepResult run_sweep(const SweepConfig& cfg, bool check_references = true);

struct SchemeSummary {
  SchemeKind scheme;
  double kl_q_p = 0.0;
  double kl_p_q = 0.0;
  double tv = 0.0;
  int rows = 0;
};

struct NSummary {
  SchemeKind scheme;
  int n = 0;
  double tv = 0.0;
  int rows = 0;
};

std::vector<SchemeSummary> summarize_by_scheme(const SweepConfig& cfg,
                                               const std::vector<DivergenceReport>& rows);
std::vector<NSummary> summarize_by_n(const SweepConfig& cfg,
                                     const std::vector<DivergenceReport>& rows);

// ---------------------------------------------------------------------------
// Reparameterized gradient estimation.

struct GradEstimate {
  double value_mean = 0.0;
  double grad_mean = 0.0;
  long k = 0;
  double stderr_value = 0.0;
  double stderr_grad = 0.0;
};

class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, long index)
      : std::runtime_error(what), sample_index(index) {}
  long sample_index;
};

/// S_K = mean φ(F(X_k; λ)) and its λ-derivative, from the same draws X_k.
GradEstimate reparam_grad_estimate(const std::function<Dual(double, const Dual&)>& transform,
                                   const std::function<double(Rng&)>& base_sampler,
                                   const std::function<Dual(const Dual&)>& phi, double lambda0,
                                   long k, std::uint64_t seed);

struct GradCheck {
  std::string name;
  double lambda = 0.0;
  GradEstimate estimate;
  double true_grad = 0.0;
  bool pass = false;
  bool known_biased = false;
};

/// Named cases over X ~ N(0,1): linear (λ + x), quadratic ((λ + x)²),
/// sigmoid-smooth (sigmoid(λ + x)²), abs (|x - λ|) and step (H(x - λ)).
/// pass means |grad_mean - true_grad| within 4 standard errors; for step it
/// means the estimator is identically zero, and known_biased is set.
GradCheck gradcheck_case(const std::string& name, long k, std::uint64_t seed,
                         std::optional<double> lambda = std::nullopt);

const std::vector<std::string>& gradcheck_case_names();

}  // namespace qcd
