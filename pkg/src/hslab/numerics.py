"""Shared numerical kernels: adaptive quadrature, bracketed roots, ODE oracle.

The adaptive work is delegated to QUADPACK (``scipy.integrate.quad``),
Brent's method and the DOP853 Runge-Kutta pair; this module owns the
endpoint substitutions, the tolerance contract and the error types.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from .errors import BadBracket, DomainError, NonConvergence, StepFailure

__all__ = [
    "Transform",
    "QuadratureSpec",
    "RootBracket",
    "OdeProblem",
    "integrate",
    "find_root",
    "integrate_ode",
    "fixed_gauss",
    "DEFAULT_QUAD",
    "PROFILE_QUAD",
]


class Transform(enum.Enum):
    NONE = "none"
    LOG_LEFT = "log_left"
    POWER_LEFT = "power_left"
    EXP_RIGHT = "exp_right"
    ALGEBRAIC_RIGHT = "algebraic_right"


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    endpoint_transform: Transform = Transform.NONE
    exponent: float = 0.0  # only read by POWER_LEFT

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.endpoint_transform is Transform.POWER_LEFT and not (-1.0 < self.exponent <= 0.0):
            raise DomainError("power_left exponent must lie in (-1, 0]")

    def with_transform(self, transform: Transform, exponent: float = 0.0) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol, self.rel_tol, self.max_subdivisions, transform, exponent)


DEFAULT_QUAD = QuadratureSpec()
PROFILE_QUAD = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-8)


def _mapped_integrand(f, a, b, spec):
    """Return (g, lo, hi) such that int_a^b f = int_lo^hi g."""
    kind = spec.endpoint_transform
    if kind is Transform.NONE:
        return f, a, b
    if kind is Transform.LOG_LEFT:
        width = b - a

        def g(u):
            w = math.exp(1.0 - 1.0 / u)
            if w == 0.0:
                return 0.0
            return f(a + width * w) * width * w / (u * u)

        return g, 0.0, 1.0
    if kind is Transform.POWER_LEFT:
        width = b - a
        q = 1.0 / (1.0 + spec.exponent)

        def g(u):
            return f(a + width * u**q) * width * q * u ** (q - 1.0)

        return g, 0.0, 1.0
    if kind is Transform.EXP_RIGHT:

        def g(u):
            return f(a - math.log(u)) / u

        return g, 0.0, 1.0
    if kind is Transform.ALGEBRAIC_RIGHT:

        def g(u):
            return f(a + (1.0 - u) / u) / (u * u)

        return g, 0.0, 1.0
    raise DomainError(f"unknown transform {kind!r}")


def integrate(f: Callable[[float], float], a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integrate ``f`` over ``(a, b)``; ``b`` may be ``math.inf``.

    Raises NonConvergence when the QUADPACK error estimate exceeds
    ``max(abs_tol, rel_tol * |result|)``.
    """
    if not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    infinite = math.isinf(b)
    right = spec.endpoint_transform in (Transform.EXP_RIGHT, Transform.ALGEBRAIC_RIGHT)
    if infinite != right:
        raise DomainError("semi-infinite intervals need exp_right or algebraic_right, and only they")
    g, lo, hi = _mapped_integrand(f, a, b, spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        value, err = _spi.quad(g, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions)
    if not math.isfinite(value) or err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise NonConvergence(f"quadrature error {err:.3e} above tolerance (value {value!r})")
    return float(value)


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadBracket(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo_sign == self.f_hi_sign:
            raise BadBracket("bracket endpoints carry the same sign")

    @classmethod
    def around(cls, f, lo, hi):
        s_lo, s_hi = int(np.sign(f(lo))), int(np.sign(f(hi)))
        if s_lo == s_hi and s_lo != 0:
            raise BadBracket(f"no sign change on [{lo}, {hi}]")
        return cls(lo, hi, s_lo if s_lo else -s_hi, s_hi if s_hi else -s_lo)


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-12) -> float:
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise BadBracket(f"f has the same sign at {lo} and {hi}")
    try:
        return float(_spo.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))
    except RuntimeError:
        pass
    # bisection always terminates on a valid bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OdeProblem:
    rhs: Callable[[float, np.ndarray], np.ndarray]
    t_start: float
    t_end: float
    initial_state: tuple[float, float]
    tol: float = 1e-12

    def __post_init__(self):
        if self.t_start == self.t_end:
            raise DomainError("t_start and t_end coincide")
        if not self.tol > 0:
            raise DomainError("tol must be positive")


def integrate_ode(problem: OdeProblem) -> Callable[[float], np.ndarray]:
    """Solve a 2-state first-order system; return the dense solution."""
    sol = _spi.solve_ivp(
        problem.rhs,
        (problem.t_start, problem.t_end),
        np.asarray(problem.initial_state, dtype=float),
        method="DOP853",
        rtol=problem.tol,
        atol=problem.tol * 1e-2,
        dense_output=True,
    )
    if not sol.success:
        raise StepFailure(sol.message)
    lo, hi = sorted((problem.t_start, problem.t_end))

    def solution(t):
        if not lo <= t <= hi:
            raise DomainError(f"t={t} outside the integrated interval [{lo}, {hi}]")
        return sol.sol(t)

    return solution


@lru_cache(maxsize=None)
def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def fixed_gauss(f, lo, hi, order: int = 8):
    """Fixed-order Gauss-Legendre over each panel ``[lo_i, hi_i]``.

    ``f`` must accept arrays; ``lo`` and ``hi`` broadcast together.
    Used where many short, smooth panels are integrated at once.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x, w = _gl_nodes(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[..., None] + half[..., None] * x
    vals = f(pts)
    return half * np.sum(vals * w, axis=-1)
