#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"

using namespace qcd;
using namespace qcd::cli;
using doctest::Approx;

namespace {

double num(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<std::int64_t>(c));
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("csv formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(quote_field("plain") == "plain");
  CHECK(quote_field("a,b") == "\"a,b\"");
  CHECK(quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(quote_field("two\nlines") == "\"two\nlines\"");

  OutputTable t;
  t.header = {"a", "b", "c"};
  t.add({std::int64_t{1}, 2.5, std::string("x,y")});
  t.add({std::monostate{}, INFINITY, std::string()});
  CHECK(to_csv(t) == "a,b,c\n1,2.5,\"x,y\"\n,inf,\n");
  CHECK_THROWS_AS(t.add({1.0}), std::invalid_argument);
}

TEST_CASE("atomic file output") {
  const auto dir = std::filesystem::temp_directory_path() / "qcd_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomic(path, "old\n");
  write_file_atomic(path, "a,b\n1,2\n");
  CHECK(slurp(path) == "a,b\n1,2\n");
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
  }
  CHECK_THROWS(write_file_atomic((dir / "missing" / "x.csv").string(), "x"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("points command") {
  PointsOptions o;
  o.n = 2;
  auto t = cmd_points(o);
  CHECK(to_csv(t) == "index,z,w\n1,0.25,0.5\n2,0.75,0.5\n");

  o.scheme = "hermite";
  o.dist = "std-normal";
  o.n = 3;
  t = cmd_points(o);
  CHECK(num(t.rows[0][1]) == Approx(-1.7320508).epsilon(1e-7));
  CHECK(num(t.rows[1][1]) == 0.0);
  CHECK(num(t.rows[2][2]) == Approx(0.1666667).epsilon(1e-6));
  CHECK(num(t.rows[1][2]) == Approx(0.6666667).epsilon(1e-6));

  o.scheme = "quant-midpoint";
  o.dist = "sigmoid-normal";
  o.pi = {0.0};
  o.sigma = 1.0;
  o.n = 4;
  t = cmd_points(o);
  const double z[] = {0.1687, 0.4187, 0.5813, 0.8313};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(num(t.rows[i][1]) - z[i]) < 1e-4);

  o.dist = "softmax-normal";
  o.scheme = "cubature";
  o.pi = {0.0, 1.0};
  o.n = 3;
  t = cmd_points(o);
  CHECK(t.header == std::vector<std::string>{"index", "z1", "z2", "z3", "w"});
  CHECK(t.rows.size() == 9);

  o.dist = "std-normal";
  o.scheme = "quant-midpoint";
  CHECK_THROWS_AS(cmd_points(o), UnsupportedError);
  o.dist = "triangle";
  CHECK_THROWS_AS(cmd_points(o), UsageError);
  o.dist = "uniform";
  o.scheme = "nope";
  CHECK_THROWS_AS(cmd_points(o), UnsupportedError);
}

TEST_CASE("pmf command") {
  PmfOptions o;
  o.n = 2;
  o.xmax = 3;
  auto t = cmd_pmf(o);
  CHECK(t.header == std::vector<std::string>{"x", "q", "dq_dmu", "dq_dsigma"});
  CHECK(num(t.rows[0][1]) == Approx(0.41483).epsilon(1e-4));

  o.mu = 0.0;
  o.sigma = 0.5;
  o.n = 20;
  o.xmax = 200;
  t = cmd_pmf(o);
  double total = 0.0;
  for (const auto& r : t.rows) total += num(r[1]);
  CHECK(std::abs(total - 1.0) < 1e-6);

  o.sigma = 1.0;
  o.xmax = 10;
  const double h = 1e-5;
  PmfOptions up = o, dn = o;
  up.mu += h;
  dn.mu -= h;
  const auto a = cmd_pmf(o), b = cmd_pmf(up), c = cmd_pmf(dn);
  for (std::size_t x = 0; x < a.rows.size(); ++x) {
    const double fd = (num(b.rows[x][1]) - num(c.rows[x][1])) / (2 * h);
    CHECK(std::abs(num(a.rows[x][2]) - fd) < 1e-4);
  }

  o.sigma = 0.0;
  CHECK_THROWS_AS(cmd_pmf(o), UsageError);
  o.sigma = 1.0;
  o.xmax = -1;
  CHECK_THROWS_AS(cmd_pmf(o), UsageError);
}

TEST_CASE("vdm commands") {
  VdmOptions o;
  o.locs = {{3.0}, {-3.0}};
  o.grid_z = {0.25, 0.75};
  o.grid_w = {0.5, 0.5};
  o.xmin = -1.0;
  o.xmax = 1.0;
  o.points = 3;
  auto t = cmd_vdm_density(o);
  CHECK(num(t.rows[1][1]) == Approx(0.12952).epsilon(1e-4));

  // Identical components give the component density.
  VdmOptions same;
  same.locs = {{0.5}, {0.5}};
  same.pi = {0.7};
  same.sigma = 3.0;
  same.points = 11;
  t = cmd_vdm_density(same);
  for (const auto& r : t.rows) {
    CHECK(num(r[1]) == Approx(std_normal_pdf(num(r[0]) - 0.5)).epsilon(1e-12));
  }

  VdmOptions fig;
  fig.locs = {{3.0}, {-3.0}};
  fig.pi = {0.5};
  fig.sigma = 2.0;
  fig.xmin = -12.0;
  fig.xmax = 12.0;
  fig.points = 2401;
  t = cmd_vdm_density(fig);
  double area = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    area += 0.5 * (num(t.rows[i][1]) + num(t.rows[i - 1][1])) *
            (num(t.rows[i][0]) - num(t.rows[i - 1][0]));
  }
  CHECK(std::abs(area - 1.0) < 1e-3);

  VdmOptions s;
  s.locs = {{1.0, 1.0}, {-1.0, -1.0}};
  s.k = 50;
  s.seed = 99;
  const auto first = cmd_vdm_sample(s), second = cmd_vdm_sample(s);
  CHECK(first.header == std::vector<std::string>{"k", "x1", "x2"});
  CHECK(to_csv(first) == to_csv(second));
  s.seed = 100;
  CHECK(to_csv(first) != to_csv(cmd_vdm_sample(s)));
  CHECK_THROWS_AS(cmd_vdm_density(s), UsageError);  // d = 2

  VdmOptions bad;
  bad.locs = {{1.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(cmd_vdm_sample(bad), UsageError);
  bad.locs = {{1.0}, {2.0}, {3.0}};
  CHECK_THROWS_AS(cmd_vdm_sample(bad), UsageError);
}

TEST_CASE("sweep config and command") {
  std::istringstream text(
      "# small sweep\n"
      "pi = 0.5\n"
      "sigma = 2\n"
      "n = 5, 10\n"
      "mu = 2\n"
      "scheme = sqrt-quantile, quant-midpoint\n"
      "reference_n = 150\n");
  const SweepConfig cfg = parse_sweep_config(text);
  CHECK(cfg.pis == std::vector<double>{0.5});
  CHECK(cfg.ns == std::vector<int>{5, 10});
  CHECK(cfg.schemes.size() == 2);
  CHECK(cfg.dim == 10);

  const auto out = cmd_sweep(cfg, true);
  CHECK(out.rows.header == std::vector<std::string>{"pi", "sigma", "n", "mu", "scheme", "kl_q_p",
                                                    "kl_p_q", "tv", "error"});
  CHECK(out.rows.rows.size() == 4);
  CHECK_FALSE(out.any_row_error);
  CHECK(out.reference_check.max_tv_quantile_schemes < 1e-3);
  CHECK(out.summary.rows.size() == 2 + 4);
  CHECK(to_csv(out.rows) == to_csv(cmd_sweep(cfg, true).rows));

  std::istringstream bad("pi 0.5\n");
  CHECK_THROWS_AS(parse_sweep_config(bad), UsageError);
  std::istringstream unknown("colour = red\n");
  CHECK_THROWS_AS(parse_sweep_config(unknown), UsageError);
  std::istringstream junk("n = 5, x\n");
  CHECK_THROWS_AS(parse_sweep_config(junk), UsageError);
}

TEST_CASE("gradcheck command") {
  const auto out = cmd_gradcheck({"linear", "quadratic", "step"}, 100000, 0);
  CHECK(out.table.header.front() == "case");
  CHECK(out.table.rows.size() == 3);
  CHECK(num(out.table.rows[0][2]) == 1.0);
  CHECK(num(out.table.rows[2][2]) == 0.0);
  CHECK(num(out.table.rows[2][6]) == 1.0);
  CHECK(out.all_pass);
  CHECK_THROWS_AS(cmd_gradcheck({"cubic"}, 100, 0), UsageError);
}

TEST_CASE("gnuplot scripts reference the data file") {
  PointsOptions o;
  const auto t = cmd_points(o);
  const auto s = gnuplot_script("points", t, "grid.csv");
  CHECK(s.find("'grid.csv'") != std::string::npos);
  CHECK(s.find("separator ','") != std::string::npos);
}
