#include "qcd/schemes.hpp"

namespace qcd {

QuadratureGrid<double> hermite_grid(int n) {
  const auto rule = hermite_rule(n);
  QuadratureGrid<double> g;
  g.dim = 1;
  g.reparameterizable = true;
  g.coords = rule.nodes;
  g.weights = rule.weights;
  return g;
}

}  // namespace qcd
