"""Density partition functions of graphs.

Estimate ``ln den_m(G; gamma)``, the log-average of ``exp(gamma m sigma(S))``
over m-subsets ``S``, certify lower bounds on the densest m-subset, extract
dense subsets, and study complex zeros of the underlying polynomials.
"""

from .errors import BudgetExceededError, GraphParseError, RootFindingError, ZeroFreeUnavailableError
from .graph import (
    Graph,
    SubsetDensity,
    WeightMatrix,
    alpha_to_gamma,
    density,
    gamma_alpha_convert,
    gamma_to_alpha,
    parse_edge_list,
    random_gnp,
    weights_from_alpha,
    weights_from_gamma,
)
from .moments import ConnectedSums, MomentVector, connected_sums, h_derivatives_closed, h_derivatives_enumerated
from .oracle import den_exact, h_coeffs_exact, pm_exact, poly_roots
from .pipeline import ApproxConfig, ApproxResult, approx_direct, approx_rigorous, certified_density, extract_subset
from .series import (
    PhiPolynomial,
    TruncatedSeries,
    build_phi,
    choose_r,
    log_from_derivatives,
    taylor_eval,
    truncated_compose,
)
from .zerofree import ZeroFreeParams, in_domain, rho_for, solve_params

__version__ = "0.1.0"

__all__ = [
    "alpha_to_gamma",
    "approx_direct",
    "approx_rigorous",
    "ApproxConfig",
    "ApproxResult",
    "BudgetExceededError",
    "build_phi",
    "certified_density",
    "choose_r",
    "connected_sums",
    "ConnectedSums",
    "den_exact",
    "density",
    "extract_subset",
    "gamma_alpha_convert",
    "gamma_to_alpha",
    "Graph",
    "GraphParseError",
    "h_coeffs_exact",
    "h_derivatives_closed",
    "h_derivatives_enumerated",
    "in_domain",
    "log_from_derivatives",
    "MomentVector",
    "parse_edge_list",
    "PhiPolynomial",
    "pm_exact",
    "poly_roots",
    "random_gnp",
    "rho_for",
    "RootFindingError",
    "solve_params",
    "SubsetDensity",
    "taylor_eval",
    "truncated_compose",
    "TruncatedSeries",
    "WeightMatrix",
    "weights_from_alpha",
    "weights_from_gamma",
    "ZeroFreeParams",
    "ZeroFreeUnavailableError",
]
