#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>

namespace qcd::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != static_cast<int>(v)) throw UsageError("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

std::int64_t idx(std::size_t i) { return static_cast<std::int64_t>(i); }

}  // namespace

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    if (!item.empty()) out.push_back(to_double(item));
  }
  return out;
}

// ---------------------------------------------------------------------------

OutputTable cmd_points(const PointsOptions& o) {
  if (o.n < 1) throw UsageError("--n must be positive");
  const SchemeKind scheme = parse_scheme(o.scheme);
  QuadratureGrid<double> g;
  if (o.dist == "uniform") {
    if (!(o.hi > o.lo)) throw UsageError("uniform needs lo < hi");
    const double lo = o.lo, hi = o.hi;
    const Support s = Support::bounded(lo, hi);
    if (scheme == SchemeKind::quantile_midpoint) {
      g = quantile_midpoint_bounded<double>({[=](double p) { return lo + (hi - lo) * p; }, s}, o.n);
    } else if (scheme == SchemeKind::sqrt_quantile) {
      g = sqrt_quantile_midpoint<double>([=](double) { return 1.0 / (hi - lo); }, s, o.n);
    } else {
      throw UnsupportedError("uniform supports quant-midpoint and sqrt-quantile");
    }
  } else if (o.dist == "std-normal") {
    if (scheme == SchemeKind::hermite_pushforward) {
      g = hermite_grid(o.n);
    } else if (scheme == SchemeKind::cubature) {
      g = cubature_constant_probability<double>(o.n, 1, std_normal_quantile, identity<double>(1));
    } else {
      throw UnsupportedError("std-normal has unbounded support; use hermite or cubature");
    }
  } else if (o.dist == "lognormal") {
    if (!(o.sigma > 0.0)) throw UsageError("--sigma must be positive");
    if (scheme != SchemeKind::quantile_midpoint) {
      throw UnsupportedError("lognormal supports quant-midpoint only");
    }
    const double mu = o.mu, sigma = o.sigma;
    g = quantile_midpoint_halfline<double>(
        {[=](double p) { return lognormal_quantile(p, mu, sigma); }, Support::half_line()}, o.n);
  } else if (o.dist == "sigmoid-normal" || o.dist == "softmax-normal") {
    MixtureWeightLaw law;
    law.pi = o.pi;
    law.sigma = o.sigma;
    law.mode = o.dist == "sigmoid-normal" ? WeightMode::sigmoid : WeightMode::softmax;
    g = mixture_weight_grid(law, o.n, scheme);
  } else {
    throw UsageError("unknown distribution '" + o.dist + "'");
  }

  OutputTable t;
  t.header.push_back("index");
  if (g.dim == 1) {
    t.header.push_back("z");
  } else {
    for (int j = 1; j <= g.dim; ++j) t.header.push_back("z" + std::to_string(j));
  }
  t.header.push_back("w");
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<Cell> row{idx(i + 1)};
    for (double z : g.point(i)) row.emplace_back(z);
    row.emplace_back(g.weights[i]);
    t.add(std::move(row));
  }
  return t;
}

OutputTable cmd_pmf(const PmfOptions& o) {
  if (!(o.sigma > 0.0)) throw UsageError("--sigma must be positive");
  if (o.xmax < 0) throw UsageError("--xmax must be nonnegative");
  const PoissonLogNormalQC<Dual> by_mu(Dual::variable(o.mu), Dual(o.sigma), o.n);
  const PoissonLogNormalQC<Dual> by_sigma(Dual(o.mu), Dual::variable(o.sigma), o.n);
  OutputTable t;
  t.header = {"x", "q", "dq_dmu", "dq_dsigma"};
  for (long x = 0; x <= o.xmax; ++x) {
    const Dual a = by_mu.pmf(x);
    const Dual b = by_sigma.pmf(x);
    t.add({static_cast<std::int64_t>(x), a.value, a.derivative, b.derivative});
  }
  return t;
}

VectorDiffeomixture build_vdm(const VdmOptions& o) {
  if (o.locs.size() < 2) throw UsageError("need at least two components (--loc)");
  const auto d = o.locs.front().size();
  if (d == 0) throw UsageError("empty component location");
  for (const auto& l : o.locs) {
    if (l.size() != d) throw UsageError("component locations have different dimensions");
  }
  if (!o.scales.empty() && o.scales.size() != o.locs.size()) {
    throw UsageError("--scale must be given once per component or not at all");
  }
  std::vector<LocationScale> comps;
  for (std::size_t m = 0; m < o.locs.size(); ++m) {
    const double s = o.scales.empty() ? 1.0 : o.scales[m];
    comps.push_back({Eigen::Map<const Eigen::VectorXd>(o.locs[m].data(), static_cast<long>(d)),
                     s * Eigen::MatrixXd::Identity(static_cast<long>(d), static_cast<long>(d))});
  }

  QuadratureGrid<double> grid;
  if (!o.grid_z.empty()) {
    if (o.grid_w.size() != o.grid_z.size()) throw UsageError("--grid-z and --grid-w differ in length");
    grid.dim = 1;
    grid.coords = o.grid_z;
    grid.weights = o.grid_w;
    validate_grid(grid, 1e-9);
  } else {
    MixtureWeightLaw law;
    law.pi = o.pi;
    law.sigma = o.sigma;
    law.mode = o.pi.size() == 1 ? WeightMode::sigmoid : WeightMode::softmax;
    if (law.weight_count() != static_cast<int>(comps.size())) {
      throw UsageError("component count must be one more than the number of --pi values");
    }
    grid = mixture_weight_grid(law, o.n, parse_scheme(o.scheme));
  }
  return VectorDiffeomixture(std::move(grid), std::move(comps),
                             standard_normal_base(static_cast<int>(d)));
}

OutputTable cmd_vdm_density(const VdmOptions& o) {
  if (o.points < 2) throw UsageError("--points must be at least 2");
  if (!(o.xmax > o.xmin)) throw UsageError("need xmin < xmax");
  const auto vdm = build_vdm(o);
  if (vdm.dim() != 1) throw UsageError("density mode needs one-dimensional components");
  OutputTable t;
  t.header = {"x", "q"};
  Eigen::VectorXd x(1);
  for (int i = 0; i < o.points; ++i) {
    x[0] = o.xmin + (o.xmax - o.xmin) * i / (o.points - 1);
    t.add({x[0], vdm.density(x)});
  }
  return t;
}

OutputTable cmd_vdm_sample(const VdmOptions& o) {
  if (o.k < 1) throw UsageError("--k must be positive");
  const auto vdm = build_vdm(o);
  OutputTable t;
  t.header.push_back("k");
  for (int j = 1; j <= vdm.dim(); ++j) t.header.push_back("x" + std::to_string(j));
  Rng rng = make_stream(o.seed, "vdm-sample");
  for (long i = 1; i <= o.k; ++i) {
    const Eigen::VectorXd x = vdm.sample(rng);
    std::vector<Cell> row{static_cast<std::int64_t>(i)};
    for (int j = 0; j < x.size(); ++j) row.emplace_back(x[j]);
    t.add(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig cfg = SweepConfig::standard();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "pi") {
      cfg.pis = parse_list(value);
    } else if (key == "sigma") {
      cfg.sigmas = parse_list(value);
    } else if (key == "mu") {
      cfg.mus = parse_list(value);
    } else if (key == "n") {
      cfg.ns.clear();
      for (const auto& s : split(value, ',')) cfg.ns.push_back(to_int(s));
    } else if (key == "scheme") {
      cfg.schemes.clear();
      for (const auto& s : split(value, ',')) cfg.schemes.push_back(parse_scheme(s));
    } else if (key == "dim") {
      cfg.dim = to_int(value);
    } else if (key == "reference_n") {
      cfg.reference_n = to_int(value);
    } else if (key == "tol") {
      cfg.tol = to_double(value);
    } else {
      throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

SweepOutput cmd_sweep(const SweepConfig& cfg, bool check_references) {
  const SweepResult res = run_sweep(cfg, check_references);
  SweepOutput out;
  out.reference_check = res.reference_check;
  out.rows.header = {"pi", "sigma", "n", "mu", "scheme", "kl_q_p", "kl_p_q", "tv", "error"};
  for (const auto& r : res.rows) {
    std::vector<Cell> row{r.pi, r.sigma, static_cast<std::int64_t>(r.n), r.mu,
                          std::string(scheme_name(r.scheme))};
    if (r.error) {
      out.any_row_error = true;
      row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{}, *r.error});
    } else {
      row.insert(row.end(), {r.kl_q_p, r.kl_p_q, r.tv, std::string()});
    }
    out.rows.add(std::move(row));
  }

  out.summary.header = {"group", "scheme", "n", "kl_q_p", "kl_p_q", "tv", "rows"};
  for (const auto& s : summarize_by_scheme(cfg, res.rows)) {
    out.summary.add({std::string("scheme"), std::string(scheme_name(s.scheme)), std::monostate{},
                     s.kl_q_p, s.kl_p_q, s.tv, static_cast<std::int64_t>(s.rows)});
  }
  for (const auto& s : summarize_by_n(cfg, res.rows)) {
    out.summary.add({std::string("n"), std::string(scheme_name(s.scheme)),
                     static_cast<std::int64_t>(s.n), std::monostate{}, std::monostate{}, s.tv,
                     static_cast<std::int64_t>(s.rows)});
  }
  return out;
}

GradcheckOutput cmd_gradcheck(const std::vector<std::string>& cases, long k, std::uint64_t seed,
                              std::optional<double> lambda) {
  if (k < 2) throw UsageError("--k must be at least 2");
  const auto& known = gradcheck_case_names();
  GradcheckOutput out;
  out.table.header = {"case", "value_mean", "grad_mean", "true_grad", "stderr_grad", "pass",
                      "known_biased"};
  for (const auto& name : cases) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw UsageError("unknown gradcheck case '" + name + "'");
    }
    const GradCheck gc = gradcheck_case(name, k, split_seed(seed, name), lambda);
    out.all_pass = out.all_pass && gc.pass;
    out.table.add({name, gc.estimate.value_mean, gc.estimate.grad_mean, gc.true_grad,
                   gc.estimate.stderr_grad, static_cast<std::int64_t>(gc.pass),
                   static_cast<std::int64_t>(gc.known_biased)});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string gnuplot_script(const std::string& kind, const OutputTable& t,
                           const std::string& data_path) {
  std::ostringstream s;
  const std::string data = "'" + data_path + "'";
  const auto has = [&t](const char* c) {
    return std::find(t.header.begin(), t.header.end(), c) != t.header.end();
  };
  s << "set datafile separator ','\n";
  s << "set key autotitle columnhead\n";
  if (kind == "points") {
    if (has("z")) {
      s << "set xlabel 'z'\nset ylabel 'w'\n";
      s << "plot " << data << " using 'z':'w' with impulses lw 2\n";
    } else {
      s << "set xlabel 'z1'\nset ylabel 'z2'\n";
      s << "plot " << data << " using 'z1':'z2':(sqrt(column('w'))*20) with points pt 7 ps variable\n";
    }
  } else if (kind == "pmf") {
    s << "set xlabel 'x'\nset style fill solid 0.5\n";
    s << "plot " << data << " using 'x':'q' with boxes\n";
  } else if (kind == "vdm-density") {
    s << "set xlabel 'x'\n";
    s << "plot " << data << " using 'x':'q' with lines\n";
  } else if (kind == "vdm-sample") {
    if (has("x2")) {
      s << "plot " << data << " using 'x1':'x2' with dots\n";
    } else {
      s << "plot " << data << " using 'x1':(1) smooth kdensity\n";
    }
  } else if (kind == "sweep") {
    s << "set logscale x\nset xlabel 'N'\nset ylabel 'TV'\n";
    s << "plot " << data << " using 'n':'tv' with points\n";
  } else if (kind == "gradcheck") {
    s << "set style data points\n";
    s << "plot " << data << " using 0:'grad_mean':xtic(1), '' using 0:'true_grad'\n";
  } else {
    s << "plot " << data << " using 1:2 with lines\n";
  }
  return s.str();
}

}  // namespace qcd::cli
