#include "qcd/distributions.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qcd/integrate.hpp"

namespace qcd {

CategoricalIndex::CategoricalIndex(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("CategoricalIndex: no weights");
  cumulative_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("CategoricalIndex: negative weight");
    acc += w;
    cumulative_.push_back(acc);
  }
  if (!(acc > 0.0)) throw DomainError("CategoricalIndex: weights have zero mass");
  for (auto& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

std::size_t CategoricalIndex::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               cumulative_.size() - 1);
}

double CategoricalIndex::weight(std::size_t n) const {
  return n == 0 ? cumulative_[0] : cumulative_[n] - cumulative_[n - 1];
}

Conditional<long> poisson_conditional() {
  Conditional<long> c;
  c.log_prob = [](std::span<const double> z, const long& x) { return poisson_log_pmf(x, z[0]); };
  c.sample = [](std::span<const double> z, Rng& rng) -> long {
    if (z[0] <= 0.0) return 0;
    std::poisson_distribution<long> pois(z[0]);
    return pois(rng);
  };
  return c;
}

double poisson_upper_tail_bound(double rate, long x) {
  if (rate <= 0.0) return 0.0;
  const double k = static_cast<double>(x + 1);
  if (k <= rate) return 1.0;
  // P[X >= k] <= e^{-rate} (e rate / k)^k
  return std::exp(-rate + k * (1.0 + std::log(rate / k)));
}

std::pair<double, double> plqc_grad(double mu, double sigma, int n, long x) {
  const PoissonLogNormalQC<Dual> by_mu(Dual::variable(mu), Dual(sigma), n);
  const PoissonLogNormalQC<Dual> by_sigma(Dual(mu), Dual::variable(sigma), n);
  return {by_mu.pmf(x).derivative, by_sigma.pmf(x).derivative};
}

// ---------------------------------------------------------------------------

ComponentLaw standard_normal_component() {
  ComponentLaw c;
  c.name = "std-normal";
  c.pdf = [](double u) { return std_normal_pdf(u); };
  c.cdf = [](double u) { return std_normal_cdf(u); };
  c.quantile = [](double p) { return std_normal_quantile(p); };
  c.sample = [](Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return nd(rng);
  };
  c.is_standard_normal = true;
  return c;
}

ComponentLaw logistic_component() {
  ComponentLaw c;
  c.name = "logistic";
  c.pdf = [](double u) {
    const double s = sigmoid(u);
    return s * (1.0 - s);
  };
  c.cdf = [](double u) { return sigmoid(u); };
  c.quantile = [](double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("logistic quantile: p must lie in (0,1)");
    return std::log(p) - std::log1p(-p);
  };
  c.sample = [](Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double p = unif(rng);
    while (p <= 0.0) p = unif(rng);
    return std::log(p) - std::log1p(-p);
  };
  return c;
}

void MixtureWeightLaw::validate() const {
  if (pi.empty()) throw DomainError("MixtureWeightLaw: pi must have at least one entry");
  if (!(sigma > 0.0)) throw DomainError("MixtureWeightLaw: sigma must be positive");
  if (mode == WeightMode::sigmoid && pi.size() != 1) {
    throw DomainError("MixtureWeightLaw: sigmoid mode takes a scalar pi");
  }
}

Diffeomorphism<double> MixtureWeightLaw::weight_map() const {
  validate();
  std::vector<double> shift(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) shift[i] = sigma * pi[i];
  auto lin = affine<double>(shift, sigma, m());
  if (mode == WeightMode::sigmoid) return chain<double>({lin, sigmoid_map<double>()});
  return chain<double>({lin, centered_softmax<double>(m())});
}

double MixtureWeightLaw::quantile(double p) const {
  validate();
  if (mode != WeightMode::sigmoid) throw UnsupportedError("quantile: defined for sigmoid mode only");
  return sigmoid(sigma * pi[0] + sigma * component.quantile(p));
}

double MixtureWeightLaw::density(double z) const {
  validate();
  if (mode != WeightMode::sigmoid) throw UnsupportedError("density: defined for sigmoid mode only");
  if (!(z > 0.0 && z < 1.0)) return 0.0;
  const double t = std::log(z) - std::log1p(-z);
  const double u = (t - sigma * pi[0]) / sigma;
  return component.pdf(u) / (sigma * z * (1.0 - z));
}

std::vector<double> MixtureWeightLaw::sample(Rng& rng) const {
  validate();
  std::vector<double> u(pi.size());
  for (auto& x : u) x = component.sample(rng);
  if (mode == WeightMode::sigmoid) {
    const double z = sigmoid(sigma * pi[0] + sigma * u[0]);
    return {z, sigmoid(-(sigma * pi[0] + sigma * u[0]))};
  }
  std::vector<double> t(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) t[i] = sigma * pi[i] + sigma * u[i];
  return centered_softmax<double>(m()).forward(std::span<const double>(t));
}

MixtureWeightLaw sigmoid_law_from_bias(double bias, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigmoid_law_from_bias: sigma must be positive");
  MixtureWeightLaw law;
  law.pi = {bias / sigma};
  law.sigma = sigma;
  law.mode = WeightMode::sigmoid;
  return law;
}

std::string_view scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::quantile_midpoint: return "quant-midpoint";
    case SchemeKind::sqrt_quantile: return "sqrt-quantile";
    case SchemeKind::hermite_pushforward: return "hermite";
    case SchemeKind::cubature: return "cubature";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "quant-midpoint" || name == "QuantMidpt") return SchemeKind::quantile_midpoint;
  if (name == "sqrt-quantile" || name == "SqrtQuantMidpt") return SchemeKind::sqrt_quantile;
  if (name == "hermite" || name == "PushFwdHermite") return SchemeKind::hermite_pushforward;
  if (name == "cubature") return SchemeKind::cubature;
  throw UnsupportedError("unknown scheme '" + std::string(name) + "'");
}

namespace {

QuadratureGrid<double> sigmoid_grid(const MixtureWeightLaw& law, int n, SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::quantile_midpoint: {
      QuantileFunction<double> q{[&law](double p) { return law.quantile(p); },
                                 Support::bounded(0.0, 1.0)};
      return quantile_midpoint_bounded(q, n);
    }
    case SchemeKind::sqrt_quantile:
      return sqrt_quantile_midpoint<double>([&law](double z) { return law.density(z); },
                                            Support::bounded(0.0, 1.0), n);
    case SchemeKind::hermite_pushforward: {
      if (!law.component.is_standard_normal) {
        throw UnsupportedError("hermite scheme requires a standard normal component law");
      }
      const auto f = chain<double>({affine<double>(law.sigma * law.pi[0], law.sigma),
                                    sigmoid_map<double>()});
      return gauss_hermite_pushforward(n, f);
    }
    case SchemeKind::cubature:
      throw UnsupportedError("cubature scheme requires softmax mode");
  }
  throw UnsupportedError("unknown scheme");
}

}  // namespace

QuadratureGrid<double> mixture_weight_grid(const MixtureWeightLaw& law, int n, SchemeKind scheme) {
  law.validate();
  if (law.mode == WeightMode::sigmoid) return sigmoid_grid(law, n, scheme);

  if (scheme == SchemeKind::cubature) {
    return cubature_constant_probability<double>(n, law.m(), law.component.quantile,
                                                 law.weight_map());
  }
  if (scheme == SchemeKind::sqrt_quantile) {
    throw UnsupportedError("sqrt-quantile scheme is defined on bounded intervals only");
  }
  if (law.m() != 1) {
    throw UnsupportedError("softmax mode with M > 1 supports the cubature scheme only");
  }
  MixtureWeightLaw scalar = law;
  scalar.mode = WeightMode::sigmoid;
  const auto g = sigmoid_grid(scalar, n, scheme);
  QuadratureGrid<double> out;
  out.dim = 2;
  out.reparameterizable = g.reparameterizable;
  out.weights = g.weights;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.coords.push_back(g.z(i));
    out.coords.push_back(1.0 - g.z(i));
  }
  return out;
}

double prob_component_larger(const MixtureWeightLaw& law, int i, int j) {
  law.validate();
  const int last = law.m();
  if (i == j) throw DomainError("prob_component_larger: indices must differ");
  if (i < 0 || j < 0 || i > last || j > last) {
    throw DomainError("prob_component_larger: index out of range");
  }
  const auto& g = law.component;
  if (j == last) return g.cdf(law.pi[i]);          // P[U > -π^i]
  if (i == last) return 1.0 - g.cdf(law.pi[j]);    // P[U < -π^j]
  // P[U1 + U2 > t] with t = π^j - π^i, as ∫ g(u) G(u - t) du.
  const double t = law.pi[j] - law.pi[i];
  const double lo = g.quantile(1e-15);
  const double hi = g.quantile(1.0 - 1e-15);
  const auto integrand = [&](double u) { return g.pdf(u) * g.cdf(u - t); };
  return adaptive_simpson(integrand, lo, hi, 1e-12, 64);
}

// ---------------------------------------------------------------------------

BaseDensity standard_normal_base(int dim) {
  if (dim < 1) throw DomainError("standard_normal_base: dim must be positive");
  BaseDensity b;
  b.dim = dim;
  b.log_density = [dim](const Eigen::VectorXd& v) {
    return -0.5 * v.squaredNorm() - dim * kLogSqrt2Pi;
  };
  b.sample = [dim](Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = nd(rng);
    return v;
  };
  b.is_standard_normal = true;
  return b;
}

VectorDiffeomixture::VectorDiffeomixture(QuadratureGrid<double> weights_grid,
                                         std::vector<LocationScale> components, BaseDensity base)
    : grid_(std::move(weights_grid)),
      components_(std::move(components)),
      base_(std::move(base)),
      dim_(base_.dim),
      index_(grid_.weights) {
  validate_grid(grid_, 1e-9);
  if (!base_.log_density || !base_.sample) {
    throw DomainError("VectorDiffeomixture: base density needs log-density and sampler");
  }
  const std::size_t count = components_.size();
  if (grid_.dim == 1) {
    if (count != 2) {
      throw DomainError("VectorDiffeomixture: a scalar weight grid needs exactly two components");
    }
  } else if (static_cast<std::size_t>(grid_.dim) != count) {
    std::ostringstream os;
    os << "VectorDiffeomixture: grid has " << grid_.dim << " weights per point but "
       << count << " components were given";
    throw DomainError(os.str());
  }
  for (const auto& c : components_) {
    if (c.loc.size() != dim_ || c.scale.rows() != dim_ || c.scale.cols() != dim_) {
      throw DomainError("VectorDiffeomixture: inconsistent component dimensions");
    }
    const Eigen::MatrixXd sym = 0.5 * (c.scale + c.scale.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success) {
      throw DomainError("VectorDiffeomixture: component scale is not positive definite");
    }
  }

  const std::size_t n = grid_.size();
  z_.resize(n);
  loc_.reserve(n);
  scale_.reserve(n);
  lu_.reserve(n);
  log_abs_det_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (grid_.dim == 1) {
      const double z = grid_.z(i);
      z_[i] = {z, 1.0 - z};
    } else {
      const auto p = grid_.point(i);
      z_[i].assign(p.begin(), p.end());
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim_);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(dim_, dim_);
    for (std::size_t m = 0; m < count; ++m) {
      mu += z_[i][m] * components_[m].loc;
      l += z_[i][m] * components_[m].scale;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(l);
    double lad = 0.0;
    const auto& packed = lu.matrixLU();
    for (int k = 0; k < dim_; ++k) lad += std::log(std::abs(packed(k, k)));
    loc_.push_back(std::move(mu));
    scale_.push_back(std::move(l));
    lu_.push_back(std::move(lu));
    log_abs_det_.push_back(lad);
  }
}

double VectorDiffeomixture::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw DomainError("VectorDiffeomixture: point has wrong dimension");
  std::vector<double> terms;
  terms.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (grid_.weights[i] <= 0.0) continue;
    const Eigen::VectorXd v = lu_[i].solve(x - loc_[i]);
    terms.push_back(std::log(grid_.weights[i]) - log_abs_det_[i] + base_.log_density(v));
  }
  return log_sum_exp(terms);
}

Eigen::VectorXd VectorDiffeomixture::transform(std::size_t n, const Eigen::VectorXd& v) const {
  return loc_[n] + scale_[n] * v;
}

Eigen::VectorXd VectorDiffeomixture::sample(Rng& rng) const {
  const std::size_t n = index_.sample(rng);
  return transform(n, base_.sample(rng));
}

}  // namespace qcd
