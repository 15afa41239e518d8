#include "qcd/transforms.hpp"

namespace qcd {

double pushforward_density_at(const PushforwardDensity& pd, std::span<const double> y) {
  if (!pd.map.image_contains(y)) return 0.0;
  const auto x = pd.map.inverse(y);
  const double base = pd.base_density(std::span<const double>(x));
  if (base <= 0.0) return 0.0;
  return base * std::exp(pd.map.log_abs_det_jacobian_inverse(y));
}

double pushforward_density_at(const PushforwardDensity& pd, double y) {
  return pushforward_density_at(pd, std::span<const double>(&y, 1));
}

}  // namespace qcd
