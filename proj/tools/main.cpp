// qcd: grids, pmfs, diffeomixture densities and samples, scheme sweeps and
// gradient checks as CSV.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace qcd;
using namespace qcd::cli;

namespace {

struct Common {
  std::string out;
  std::string gnuplot;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output file (default: standard output)");
  sub->add_option("--gnuplot", c.gnuplot, "Also write a gnuplot script to this path");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}));
  sub->add_option("--seed", c.seed, "64-bit seed");
}

void finish(const Common& c, const std::string& kind, const OutputTable& t) {
  emit(c.out, to_csv(t));
  if (!c.gnuplot.empty()) {
    const std::string data = c.out.empty() || c.out == "-" ? "data.csv" : c.out;
    write_file_atomic(c.gnuplot, gnuplot_script(kind, t, data));
  }
}

std::vector<double> list_or(const std::string& s, std::vector<double> fallback) {
  return s.empty() ? fallback : parse_list(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature-compound distributions: grids, densities, sweeps, gradient checks"};
  app.require_subcommand(1);
  Common common;

  // points
  PointsOptions po;
  std::string points_pi;
  auto* points = app.add_subcommand("points", "Quadrature points and weights");
  add_common(points, common);
  points->add_option("--scheme", po.scheme, "quant-midpoint | sqrt-quantile | hermite | cubature")
      ->capture_default_str();
  points->add_option("--dist", po.dist,
                     "uniform | std-normal | lognormal | sigmoid-normal | softmax-normal")
      ->capture_default_str();
  points->add_option("--n", po.n, "Number of points (per-axis count for cubature)")
      ->capture_default_str();
  points->add_option("--lo", po.lo, "Uniform lower end")->capture_default_str();
  points->add_option("--hi", po.hi, "Uniform upper end")->capture_default_str();
  points->add_option("--mu", po.mu, "LogNormal mu")->capture_default_str();
  points->add_option("--sigma", po.sigma, "Scale sigma")->capture_default_str();
  points->add_option("--pi", points_pi, "Logit location(s), comma separated");

  // pmf
  PmfOptions pm;
  auto* pmf = app.add_subcommand("pmf", "Poisson-LogNormal quadrature compound pmf and gradients");
  add_common(pmf, common);
  pmf->add_option("--mu", pm.mu)->capture_default_str();
  pmf->add_option("--sigma", pm.sigma)->capture_default_str();
  pmf->add_option("--n", pm.n, "Grid size")->capture_default_str();
  pmf->add_option("--xmax", pm.xmax, "Largest count")->capture_default_str();

  // vdm density | sample
  VdmOptions vo;
  std::string vdm_pi, grid_z, grid_w;
  std::vector<std::string> locs;
  auto* vdm = app.add_subcommand("vdm", "Vector diffeomixture");
  vdm->require_subcommand(1);
  auto* vdm_density = vdm->add_subcommand("density", "Density on a uniform x grid (d = 1)");
  auto* vdm_sample = vdm->add_subcommand("sample", "Reparameterized draws");
  for (auto* sub : {vdm_density, vdm_sample}) {
    add_common(sub, common);
    sub->add_option("--pi", vdm_pi, "Logit location(s), comma separated (default 0)");
    sub->add_option("--sigma", vo.sigma)->capture_default_str();
    sub->add_option("--scheme", vo.scheme)->capture_default_str();
    sub->add_option("--n", vo.n, "Grid size")->capture_default_str();
    sub->add_option("--loc", locs, "Component location, comma separated; repeat per component")
        ->required();
    sub->add_option("--scale", vo.scales, "Component scale multiple; repeat per component");
    sub->add_option("--grid-z", grid_z, "Explicit grid points z (weights (z, 1-z))");
    sub->add_option("--grid-w", grid_w, "Explicit grid weights");
  }
  vdm_density->add_option("--xmin", vo.xmin)->capture_default_str();
  vdm_density->add_option("--xmax", vo.xmax)->capture_default_str();
  vdm_density->add_option("--points", vo.points)->capture_default_str();
  vdm_sample->add_option("--k", vo.k, "Number of draws")->capture_default_str();

  // sweep
  bool standard = false;
  bool no_ref_check = false;
  std::string config_path, summary_path, sw_pi, sw_sigma, sw_n, sw_mu, sw_scheme;
  int sw_dim = 0, sw_ref = 0;
  auto* sweep = app.add_subcommand("sweep", "Divergences of schemes against a reference grid");
  add_common(sweep, common);
  sweep->add_flag("--paper", standard, "Use the original comparison's sweep sets");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--summary", summary_path, "Summary CSV path (default: standard error)");
  sweep->add_option("--pi", sw_pi, "Logit biases");
  sweep->add_option("--sigma", sw_sigma);
  sweep->add_option("--n", sw_n);
  sweep->add_option("--mu", sw_mu);
  sweep->add_option("--scheme", sw_scheme);
  sweep->add_option("--dim", sw_dim);
  sweep->add_option("--reference-n", sw_ref);
  sweep->add_flag("--no-reference-check", no_ref_check);

  // gradcheck
  std::vector<std::string> cases;
  long gk = 100000;
  std::optional<double> lambda;
  auto* grad = app.add_subcommand("gradcheck", "Reparameterized gradient estimator checks");
  add_common(grad, common);
  grad->add_option("--case", cases, "linear | quadratic | sigmoid-smooth | abs | step (repeatable)");
  grad->add_option("--k", gk, "Draws")->capture_default_str();
  grad->add_option("--lambda", lambda, "Parameter value (default per case)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (points->parsed()) {
      po.pi = list_or(points_pi, {0.0});
      finish(common, "points", cmd_points(po));
      return 0;
    }
    if (pmf->parsed()) {
      finish(common, "pmf", cmd_pmf(pm));
      return 0;
    }
    if (vdm->parsed()) {
      vo.pi = list_or(vdm_pi, {0.0});
      vo.grid_z = list_or(grid_z, {});
      vo.grid_w = list_or(grid_w, {});
      vo.seed = common.seed;
      for (const auto& l : locs) vo.locs.push_back(parse_list(l));
      if (vdm_density->parsed()) {
        finish(common, "vdm-density", cmd_vdm_density(vo));
      } else {
        finish(common, "vdm-sample", cmd_vdm_sample(vo));
      }
      return 0;
    }
    if (sweep->parsed()) {
      SweepConfig cfg = SweepConfig::standard();
      if (!config_path.empty()) {
        if (standard) throw UsageError("--paper and --config are exclusive");
        std::ifstream in(config_path);
        if (!in) throw UsageError("cannot read config '" + config_path + "'");
        cfg = parse_sweep_config(in);
      }
      const bool overrides = !sw_pi.empty() || !sw_sigma.empty() || !sw_n.empty() ||
                             !sw_mu.empty() || !sw_scheme.empty() || sw_dim || sw_ref;
      if (standard && overrides) throw UsageError("--paper takes no sweep-set overrides");
      if (!sw_pi.empty()) cfg.pis = parse_list(sw_pi);
      if (!sw_sigma.empty()) cfg.sigmas = parse_list(sw_sigma);
      if (!sw_mu.empty()) cfg.mus = parse_list(sw_mu);
      if (!sw_n.empty()) {
        std::istringstream text("n = " + sw_n);
        cfg.ns = parse_sweep_config(text).ns;
      }
      if (!sw_scheme.empty()) {
        std::istringstream text("scheme = " + sw_scheme);
        cfg.schemes = parse_sweep_config(text).schemes;
      }
      if (sw_dim) cfg.dim = sw_dim;
      if (sw_ref) cfg.reference_n = sw_ref;

      const SweepOutput res = cmd_sweep(cfg, !no_ref_check);
      finish(common, "sweep", res.rows);
      if (summary_path.empty()) {
        std::cerr << to_csv(res.summary);
      } else {
        emit(summary_path, to_csv(res.summary));
      }
      bool ok = !res.any_row_error;
      if (!no_ref_check) {
        const auto& rc = res.reference_check;
        std::cerr << "reference check: quantile schemes max TV " << rc.max_tv_quantile_schemes
                  << ", hermite max TV " << rc.max_tv_hermite << " (diagnostic)\n";
        if (!(rc.max_tv_quantile_schemes < 1e-3)) {
          std::cerr << "qcd: reference grids disagree (TV >= 1e-3)\n";
          ok = false;
        }
      }
      if (res.any_row_error) std::cerr << "qcd: some sweep rows failed; see the error column\n";
      return ok ? 0 : 1;
    }
    if (grad->parsed()) {
      if (cases.empty()) cases = gradcheck_case_names();
      const GradcheckOutput res = cmd_gradcheck(cases, gk, common.seed, lambda);
      finish(common, "gradcheck", res.table);
      return res.all_pass ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "qcd: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {  // DomainError, UnsupportedError
    std::cerr << "qcd: error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "qcd: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qcd: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
