"""Stiffly accurate stochastic Runge-Kutta methods for index-1 SDAEs.

Thin python layer over the compiled core: construct the published
coefficient families, verify strong order conditions, integrate the test
problems and analyse mean-square stability.
"""

from ._core import (
    Tableau,
    a_stability_probe,
    class_v_solve,
    closed_form_gain,
    default_params,
    effective_order,
    family_names,
    gaussian_moment,
    make_tableau,
    ms_gain,
    order_residuals,
    region_grid,
    response_coefficients,
    sde_ms_stable,
    simulate,
    strong_order,
    tableau_from_json,
    validate_structure,
    __version__,
)

__all__ = [
    "Tableau",
    "a_stability_probe",
    "class_v_solve",
    "closed_form_gain",
    "default_params",
    "effective_order",
    "family_names",
    "gaussian_moment",
    "make_tableau",
    "ms_gain",
    "order_residuals",
    "region_grid",
    "response_coefficients",
    "sde_ms_stable",
    "simulate",
    "strong_order",
    "tableau_from_json",
    "validate_structure",
    "__version__",
]
