#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcd/analysis.hpp"
#include "table.hpp"

namespace qcd::cli {

/// Usage-level failure: bad flag values or combinations.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PointsOptions {
  std::string scheme = "quant-midpoint";
  std::string dist = "uniform";
  int n = 10;
  double lo = 0.0;  // uniform
  double hi = 1.0;
  double mu = 0.0;  // lognormal
  double sigma = 1.0;
  std::vector<double> pi{0.0};  // sigmoid-normal, softmax-normal
};

/// "index,z,w", or "index,z1..z{M+1},w" for softmax-normal.
OutputTable cmd_points(const PointsOptions& o);

struct PmfOptions {
  double mu = 0.0;
  double sigma = 1.0;
  int n = 20;
  long xmax = 50;
};

/// "x,q,dq_dmu,dq_dsigma" for x = 0..xmax.
OutputTable cmd_pmf(const PmfOptions& o);

struct VdmOptions {
  std::vector<double> pi{0.0};
  double sigma = 1.0;
  std::string scheme = "quant-midpoint";
  int n = 20;
  /// One location per component; all of the same length d.
  std::vector<std::vector<double>> locs;
  /// Per-component multiples of the identity; empty means all ones.
  std::vector<double> scales;
  /// Explicit scalar grid (z, 1 - z) overriding the scheme.
  std::vector<double> grid_z;
  std::vector<double> grid_w;
  double xmin = -10.0;
  double xmax = 10.0;
  int points = 401;
  long k = 1000;
  std::uint64_t seed = 0;
};

VectorDiffeomixture build_vdm(const VdmOptions& o);
/// "x,q" on a uniform grid; d = 1 only.
OutputTable cmd_vdm_density(const VdmOptions& o);
/// "k,x1..xd".
OutputTable cmd_vdm_sample(const VdmOptions& o);

/// Flat `key = value` text, comma-separated lists, '#' comments. Keys: pi,
/// sigma, n, mu, scheme, dim, reference_n, tol. Missing keys keep the standard
/// sweep's values.
SweepConfig parse_sweep_config(std::istream& in);

struct SweepOutput {
  OutputTable rows;
  OutputTable summary;
  ReferenceCheck reference_check;
  bool any_row_error = false;
};

SweepOutput cmd_sweep(const SweepConfig& cfg, bool check_references);

struct GradcheckOutput {
  OutputTable table;
  bool all_pass = true;
};

/// "case,value_mean,grad_mean,true_grad,stderr_grad,pass,known_biased".
GradcheckOutput cmd_gradcheck(const std::vector<std::string>& cases, long k, std::uint64_t seed,
                              std::optional<double> lambda = std::nullopt);

/// Companion gnuplot script for a table written to `data_path`.
std::string gnuplot_script(const std::string& kind, const OutputTable& t,
                           const std::string& data_path);

std::vector<double> parse_list(const std::string& s);

}  // namespace qcd::cli
