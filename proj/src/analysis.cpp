#include "qcd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qcd/integrate.hpp"

namespace qcd {

double ScalarMixture::log_density(double x) const {
  std::vector<double> terms;
  terms.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    terms.push_back(std::log(weights[i]) + std_normal_log_pdf(x - means[i]));
  }
  return log_sum_exp(terms);
}

ScalarDensity ScalarMixture::as_density() const {
  return ScalarDensity{[self = *this](double x) { return self.log_density(x); }};
}

ScalarMixture reduce_vdm_to_1d(const VectorDiffeomixture& v) {
  if (!v.base().is_standard_normal) {
    throw UnsupportedError("reduce_vdm_to_1d: base density must be the standard normal");
  }
  const auto& comps = v.components();
  const int d = v.dim();
  double scale_mag = 1.0;
  for (const auto& c : comps) {
    if (!c.scale.isIdentity(1e-12)) {
      throw UnsupportedError("reduce_vdm_to_1d: component scales must be the identity");
    }
    scale_mag = std::max(scale_mag, c.loc.norm());
  }
  const double tol = 1e-9 * scale_mag;

  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (std::size_t m = 1; m < comps.size() && e.isZero(); ++m) {
    const Eigen::VectorXd diff = comps[m].loc - comps[0].loc;
    if (diff.norm() > tol) e = diff.normalized();
  }
  if (e.isZero()) {
    if (comps[0].loc.norm() > tol) {
      e = comps[0].loc.normalized();
    } else {
      e[0] = 1.0;
    }
  }
  // Orient e so that its first nonzero coordinate is positive.
  for (int i = 0; i < d; ++i) {
    if (std::abs(e[i]) > 1e-12) {
      if (e[i] < 0.0) e = -e;
      break;
    }
  }
  for (const auto& c : comps) {
    const Eigen::VectorXd diff = c.loc - comps[0].loc;
    const Eigen::VectorXd residual = diff - diff.dot(e) * e;
    if (residual.norm() > tol) {
      throw UnsupportedError("reduce_vdm_to_1d: component means are not colinear");
    }
  }

  ScalarMixture out;
  out.means.reserve(v.grid().size());
  out.weights = v.grid().weights;
  for (std::size_t n = 0; n < v.grid().size(); ++n) out.means.push_back(v.location(n).dot(e));
  return out;
}

namespace {

int panels_for(const Interval& s) {
  return std::max(16, static_cast<int>(std::ceil((s.hi - s.lo) / 0.5)));
}

}  // namespace

double kl_divergence_unclipped(const ScalarDensity& a, const ScalarDensity& b,
                               const Interval& support, double tol) {
  bool infinite = false;
  const auto integrand = [&](double x) {
    const double la = a.log_density(x);
    if (la == -INFINITY) return 0.0;
    const double lb = b.log_density(x);
    if (lb == -INFINITY) {
      infinite = true;
      return 0.0;
    }
    return std::exp(la) * (la - lb);
  };
  const double value = adaptive_simpson(integrand, support.lo, support.hi, tol, panels_for(support));
  return infinite ? INFINITY : value;
}

double kl_divergence(const ScalarDensity& a, const ScalarDensity& b, const Interval& support,
                     double tol) {
  return std::max(0.0, kl_divergence_unclipped(a, b, support, tol));
}

double tv_distance(const ScalarDensity& a, const ScalarDensity& b, const Interval& support,
                   double tol) {
  // Symmetric by construction: |a - b| == |b - a| at every node.
  const auto integrand = [&](double x) { return std::abs(a(x) - b(x)); };
  const double v = 0.5 * adaptive_simpson(integrand, support.lo, support.hi, tol, panels_for(support));
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
  if (pis.empty() || sigmas.empty() || ns.empty() || mus.empty() || schemes.empty()) {
    throw DomainError("SweepConfig: every sweep set must be nonempty");
  }
  if (dim < 1) throw DomainError("SweepConfig: dim must be positive");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw DomainError("SweepConfig: sigma must be positive");
  }
  for (int n : ns) {
    if (n < 1) throw DomainError("SweepConfig: N must be positive");
  }
  if (reference_n < *std::max_element(ns.begin(), ns.end())) {
    throw DomainError("SweepConfig: reference_n must be at least every N");
  }
}

SweepConfig SweepConfig::standard() {
  SweepConfig cfg;
  cfg.pis = {0.0, 0.5, 1.0, 1.5, 2.5};
  cfg.sigmas = {2.0, 5.0};
  cfg.ns = {5, 10, 20, 50};
  cfg.mus = {2.0, 4.0};
  cfg.dim = 10;
  cfg.reference_n = 150;
  cfg.schemes = {SchemeKind::sqrt_quantile, SchemeKind::quantile_midpoint,
                 SchemeKind::hermite_pushforward};
  return cfg;
}

VectorDiffeomixture sweep_mixture(const QuadratureGrid<double>& grid, double mu, int dim) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  std::vector<LocationScale> comps{{Eigen::VectorXd::Constant(dim, mu), id},
                                   {Eigen::VectorXd::Constant(dim, -mu), id}};
  return VectorDiffeomixture(grid, std::move(comps), standard_normal_base(dim));
}

namespace {

Interval common_support(const ScalarMixture& a, const ScalarMixture& b) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto* m : {&a, &b}) {
    for (double x : m->means) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  return {lo - 10.0, hi + 10.0};
}

ScalarMixture reduced(const MixtureWeightLaw& law, int n, SchemeKind scheme, double mu, int dim) {
  return reduce_vdm_to_1d(sweep_mixture(mixture_weight_grid(law, n, scheme), mu, dim));
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, bool check_references) {
  cfg.validate();
  SweepResult result;
  for (double pi : cfg.pis) {
    for (double sigma : cfg.sigmas) {
      const auto law = sigmoid_law_from_bias(pi, sigma);
      std::map<double, ScalarMixture> references;
      for (double mu : cfg.mus) {
        references[mu] = reduced(law, cfg.reference_n, SchemeKind::quantile_midpoint, mu, cfg.dim);
        if (check_references) {
          const auto& ref = references[mu];
          const auto alt = reduced(law, cfg.reference_n, SchemeKind::sqrt_quantile, mu, cfg.dim);
          const auto herm =
              reduced(law, cfg.reference_n, SchemeKind::hermite_pushforward, mu, cfg.dim);
          auto& rc = result.reference_check;
          rc.max_tv_quantile_schemes =
              std::max(rc.max_tv_quantile_schemes,
                       tv_distance(ref.as_density(), alt.as_density(), common_support(ref, alt),
                                   cfg.tol));
          rc.max_tv_hermite = std::max(
              rc.max_tv_hermite, tv_distance(ref.as_density(), herm.as_density(),
                                             common_support(ref, herm), cfg.tol));
        }
      }
      for (int n : cfg.ns) {
        for (double mu : cfg.mus) {
          for (SchemeKind scheme : cfg.schemes) {
            DivergenceReport row;
            row.pi = pi;
            row.sigma = sigma;
            row.n = n;
            row.mu = mu;
            row.scheme = scheme;
            try {
              const auto q = reduced(law, n, scheme, mu, cfg.dim);
              const auto& p = references.at(mu);
              const auto support = common_support(q, p);
              const auto qd = q.as_density();
              const auto pd = p.as_density();
              const double kqp = kl_divergence_unclipped(qd, pd, support, cfg.tol);
              const double kpq = kl_divergence_unclipped(pd, qd, support, cfg.tol);
              row.kl_unclipped_min = std::min(kqp, kpq);
              row.kl_q_p = std::max(0.0, kqp);
              row.kl_p_q = std::max(0.0, kpq);
              row.tv = tv_distance(pd, qd, support, cfg.tol);
            } catch (const std::exception& ex) {
              row.error = ex.what();
            }
            result.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return result;
}

std::vector<SchemeSummary> summarize_by_scheme(const SweepConfig& cfg,
                                               const std::vector<DivergenceReport>& rows) {
  std::vector<SchemeSummary> out;
  for (SchemeKind s : cfg.schemes) {
    SchemeSummary sum{s};
    for (const auto& r : rows) {
      if (r.scheme != s || r.error) continue;
      sum.kl_q_p += r.kl_q_p;
      sum.kl_p_q += r.kl_p_q;
      sum.tv += r.tv;
      ++sum.rows;
    }
    if (sum.rows > 0) {
      sum.kl_q_p /= sum.rows;
      sum.kl_p_q /= sum.rows;
      sum.tv /= sum.rows;
    }
    out.push_back(sum);
  }
  return out;
}

std::vector<NSummary> summarize_by_n(const SweepConfig& cfg,
                                     const std::vector<DivergenceReport>& rows) {
  std::vector<NSummary> out;
  for (int n : cfg.ns) {
    for (SchemeKind s : cfg.schemes) {
      NSummary sum{s, n};
      for (const auto& r : rows) {
        if (r.scheme != s || r.n != n || r.error) continue;
        sum.tv += r.tv;
        ++sum.rows;
      }
      if (sum.rows > 0) sum.tv /= sum.rows;
      out.push_back(sum);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GradEstimate reparam_grad_estimate(const std::function<Dual(double, const Dual&)>& transform,
                                   const std::function<double(Rng&)>& base_sampler,
                                   const std::function<Dual(const Dual&)>& phi, double lambda0,
                                   long k, std::uint64_t seed) {
  if (k < 1) throw DomainError("reparam_grad_estimate: K must be positive");
  Rng rng = make_stream(seed, "reparam-grad");
  const Dual lambda = Dual::variable(lambda0);
  // Welford accumulators for value and derivative.
  double mean_v = 0.0, m2_v = 0.0, mean_g = 0.0, m2_g = 0.0;
  for (long i = 0; i < k; ++i) {
    const double x = base_sampler(rng);
    const Dual y = phi(transform(x, lambda));
    if (!std::isfinite(y.value) || !std::isfinite(y.derivative)) {
      throw EstimationError("reparam_grad_estimate: non-finite loss at sample " + std::to_string(i),
                            i);
    }
    const double n = static_cast<double>(i + 1);
    const double dv = y.value - mean_v;
    mean_v += dv / n;
    m2_v += dv * (y.value - mean_v);
    const double dg = y.derivative - mean_g;
    mean_g += dg / n;
    m2_g += dg * (y.derivative - mean_g);
  }
  GradEstimate est;
  est.k = k;
  est.value_mean = mean_v;
  est.grad_mean = mean_g;
  if (k > 1) {
    const double kk = static_cast<double>(k);
    est.stderr_value = std::sqrt(m2_v / (kk - 1.0) / kk);
    est.stderr_grad = std::sqrt(m2_g / (kk - 1.0) / kk);
  }
  return est;
}

const std::vector<std::string>& gradcheck_case_names() {
  static const std::vector<std::string> names{"linear", "quadratic", "sigmoid-smooth", "abs",
                                              "step"};
  return names;
}

namespace {

double expected_sigmoid_square(double lambda) {
  const auto f = [lambda](double x) {
    const double s = sigmoid(lambda + x);
    return s * s * std_normal_pdf(x);
  };
  return adaptive_simpson(f, -12.0, 12.0, 1e-14, 64);
}

}  // namespace

GradCheck gradcheck_case(const std::string& name, long k, std::uint64_t seed,
                         std::optional<double> lambda) {
  const auto normal = [](Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return nd(rng);
  };
  const auto identity_phi = [](const Dual& y) { return y; };
  GradCheck gc;
  gc.name = name;
  std::function<Dual(double, const Dual&)> f;
  std::function<Dual(const Dual&)> phi = identity_phi;
  if (name == "linear") {
    gc.lambda = lambda.value_or(0.5);
    f = [](double x, const Dual& l) { return l + Dual(x); };
    gc.true_grad = 1.0;
  } else if (name == "quadratic") {
    gc.lambda = lambda.value_or(1.0);
    f = [](double x, const Dual& l) { return l + Dual(x); };
    phi = [](const Dual& y) { return y * y; };
    gc.true_grad = 2.0 * gc.lambda;
  } else if (name == "sigmoid-smooth") {
    gc.lambda = lambda.value_or(0.3);
    f = [](double x, const Dual& l) { return sigmoid(l + Dual(x)); };
    phi = [](const Dual& y) { return y * y; };
    constexpr double h = 1e-4;
    gc.true_grad = (expected_sigmoid_square(gc.lambda + h) - expected_sigmoid_square(gc.lambda - h)) /
                   (2.0 * h);
  } else if (name == "abs") {
    gc.lambda = lambda.value_or(0.5);
    f = [](double x, const Dual& l) { return Dual(x) - l; };
    phi = [](const Dual& y) { return abs(y); };
    gc.true_grad = 2.0 * std_normal_cdf(gc.lambda) - 1.0;
  } else if (name == "step") {
    gc.lambda = lambda.value_or(0.0);
    f = [](double x, const Dual& l) { return Dual(x) - l; };
    phi = [](const Dual& y) { return step(y); };
    gc.true_grad = -std_normal_pdf(gc.lambda);
  } else {
    throw UnsupportedError("unknown gradcheck case '" + name + "'");
  }
  gc.estimate = reparam_grad_estimate(f, normal, phi, gc.lambda, k, seed);
  if (name == "step") {
    gc.known_biased = true;
    gc.pass = gc.estimate.grad_mean == 0.0;
  } else {
    // Zero-variance cases (linear) compare exactly up to rounding.
    gc.pass = std::abs(gc.estimate.grad_mean - gc.true_grad) <=
              4.0 * gc.estimate.stderr_grad + 1e-12;
  }
  return gc;
}

}  // namespace qcd
