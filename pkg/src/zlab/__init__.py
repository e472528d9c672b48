"""Numerical laboratory for an integral equation satisfied by |zeta(s)|^2.

Submodules:

    numerics            precision context, oracles, compensated summation
    zeta_expansion      explicit expansions of zeta and |zeta|^2, chi
    gamma_asymptotics   Stirling factors, gamma ratios, Hankel integrals
    integral_engine     the integral equation and its residual
    stationary_phase    stationary-point and boundary asymptotics of J1..J6
    sums                index sets, exact identities, Dirichlet-type sums
    variant             the log-weighted double sum over N
    cli                 the ``zlab`` command
"""

from .errors import (
    BoundaryStationaryWarning,
    ConvergenceError,
    DivergenceError,
    DomainError,
    EmptySetError,
    PoleError,
    ZlabError,
)
from .integral_engine import SplitParams
from .numerics import DEFAULT_CONTEXT, PrecisionContext
from .quadrature import QuadratureSpec

__all__ = [
    "BoundaryStationaryWarning",
    "ConvergenceError",
    "DEFAULT_CONTEXT",
    "DivergenceError",
    "DomainError",
    "EmptySetError",
    "PoleError",
    "PrecisionContext",
    "QuadratureSpec",
    "SplitParams",
    "ZlabError",
]

__version__ = "0.1.0"
