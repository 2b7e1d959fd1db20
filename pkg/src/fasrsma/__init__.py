"""Outage and capacity analysis for fluid-antenna RSMA downlinks.

The package mirrors the analysis pipeline: special functions and quadrature
(`specfun`), spatial covariance and block-correlation fitting (`correlation`),
RSMA power/SINR algebra (`rsma`), closed-form outage and capacity formulas
(`analytic`), the Monte Carlo ground-truth simulator (`montecarlo`) and the
experiment runner (`experiments`).
"""

from .specfun import QuadratureSpec, bessel_j0, bessel_i0_scaled, marcum_q1, chebyshev_nodes

__all__ = [
    "QuadratureSpec",
    "bessel_j0",
    "bessel_i0_scaled",
    "marcum_q1",
    "chebyshev_nodes",
]

__version__ = "0.1.0"
