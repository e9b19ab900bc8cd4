"""Reduced Rayleigh quotients, Monte Carlo quotients and change-of-variables checks."""

from .montecarlo import (
    McEstimate,
    McQuotientSpec,
    McReport,
    ProductBump,
    ZeroFunction,
    mc_quotient_two_point,
    smoke_test_inequality,
)
from .reduced import (
    KINDS,
    T_MAX,
    RadialGrid,
    RayleighResult,
    ReducedFunctional,
    minim_profile_t,
    minimize_reduced,
    quotient_of_profile,
)
from .transport import TransportReport, hyperbolic_consistency, rain111_consistency

__all__ = [
    "KINDS",
    "T_MAX",
    "RadialGrid",
    "RayleighResult",
    "ReducedFunctional",
    "minim_profile_t",
    "minimize_reduced",
    "quotient_of_profile",
    "McEstimate",
    "McQuotientSpec",
    "McReport",
    "ProductBump",
    "ZeroFunction",
    "mc_quotient_two_point",
    "smoke_test_inequality",
    "TransportReport",
    "hyperbolic_consistency",
    "rain111_consistency",
]
