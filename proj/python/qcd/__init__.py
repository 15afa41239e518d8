"""Quadrature-compound distributions.

Thin wrapper over the C++ core: quadrature grids, the Poisson-LogNormal
compound, vector diffeomixtures, the scheme sweep and gradient checks.
"""

from ._qcd import (
    DomainError,
    PoissonLogNormal,
    UnsupportedError,
    gradcheck,
    hermite_rule,
    mixture_weight_grid,
    prob_component_larger,
    run_sweep,
    std_normal_cdf,
    std_normal_quantile,
    vdm_density,
    vdm_sample,
)

__all__ = [
    "DomainError",
    "PoissonLogNormal",
    "UnsupportedError",
    "gradcheck",
    "hermite_rule",
    "mixture_weight_grid",
    "prob_component_larger",
    "run_sweep",
    "std_normal_cdf",
    "std_normal_quantile",
    "vdm_density",
    "vdm_sample",
]
