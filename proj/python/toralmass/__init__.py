"""Planck-scale mass statistics of toral Laplace eigenfunctions.

Thin wrapper over the compiled extension; everything substantive lives in
the C++ core.
"""

from ._core import (
    BudgetError,
    CoefficientVector,
    ValidationError,
    angular_discrepancy,
    arc_vector,
    bessel_j,
    bourgain_vector,
    bv_density_vector,
    coefficients_from_config,
    count_correlations,
    count_quasi_correlations,
    eigenfunction_value,
    expectation,
    explicit_vector,
    flatness,
    g_kernel,
    h_kernel,
    is_sum_of_squares,
    lattice_points,
    mass,
    moment_exact,
    monte_carlo,
    pair_distance_uniform3,
    pair_distance_weighted,
    predict_variance,
    restricted_moment,
    spherical_cap_discrepancy,
    variance_exact,
    variance_spectral,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CoefficientVector",
    "ValidationError",
    "angular_discrepancy",
    "arc_vector",
    "bessel_j",
    "bourgain_vector",
    "bv_density_vector",
    "coefficients_from_config",
    "count_correlations",
    "count_quasi_correlations",
    "eigenfunction_value",
    "expectation",
    "explicit_vector",
    "flatness",
    "g_kernel",
    "h_kernel",
    "is_sum_of_squares",
    "lattice_points",
    "mass",
    "moment_exact",
    "monte_carlo",
    "pair_distance_uniform3",
    "pair_distance_weighted",
    "predict_variance",
    "restricted_moment",
    "spherical_cap_discrepancy",
    "variance_exact",
    "variance_spectral",
]
