"""Closed-form sharp constants and their explicit minimizers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hyp2f1 import gamma
from .numerics import DEFAULT_QUAD, QuadratureSpec, Transform, integrate

__all__ = [
    "critical_exponent",
    "sphere_area",
    "s_n",
    "s_np",
    "s_3p_identify",
    "scaled_constant",
    "SharpConstant",
    "MinimizerProfile",
    "minimizer_eval",
    "radial_quotient_interior",
]


def critical_exponent(n: int) -> float:
    """2* = 2n/(n-2)."""
    return 2.0 * n / (n - 2)


def sphere_area(n: int) -> float:
    """|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)


def _check_np(n, p):
    if int(n) != n or n < 3:
        raise DomainError("n must be an integer >= 3")
    if not 2 < p <= critical_exponent(n) * (1 + 1e-15):
        raise DomainError(f"p={p} outside (2, {critical_exponent(n)}]")


def s_n(n: int) -> float:
    """Sobolev constant pi n (n-2) (Gamma(n/2)/Gamma(n))^{2/n}."""
    if int(n) != n or n < 3:
        raise DomainError("n must be an integer >= 3")
    return math.pi * n * (n - 2) * (gamma(n / 2) / gamma(n)) ** (2.0 / n)


def s_np(n: int, p: float) -> float:
    _check_np(n, p)
    q = p / (p - 2)
    # log form: Gamma(q) overflows once p is within ~0.012 of 2
    log_inner = math.log(2 * math.pi ** (n / 2) / (p - 2)) + 2 * math.lgamma(q) - math.lgamma(n / 2) - math.lgamma(2 * q)
    return 2 * p * ((n - 2) / 2) ** ((p + 2) / p) * math.exp((p - 2) / p * log_inner)


def s_3p_identify(p: float) -> float:
    """Three-dimensional closed form p 2^{-2/p} [4 pi Gamma^2(p/(p-2)) / ((p-2) Gamma(2p/(p-2)))]^{(p-2)/p}."""
    _check_np(3, p)
    q = p / (p - 2)
    log_inner = math.log(4 * math.pi / (p - 2)) + 2 * math.lgamma(q) - math.lgamma(2 * q)
    return p / 2 ** (2 / p) * math.exp((p - 2) / p * log_inner)


def scaled_constant(n: int, p: float, base: float, kind: str = "interior", gamma_: float = 0.0) -> float:
    """base (n-2)^{-(p+2)/p}, or base (n - 2 gamma)^{-(p+2)/p} for kind 'gamma'."""
    if not base > 0:
        raise DomainError("base constant must be positive")
    if kind in ("interior", "poincare"):
        d = n - 2
    elif kind == "gamma":
        d = n - 2 * gamma_
    else:
        raise DomainError(f"unknown kind {kind!r}")
    if not d > 0:
        raise DomainError("scaling factor must be positive")
    return base * d ** (-(p + 2) / p)


@dataclass(frozen=True)
class SharpConstant:
    name: str
    n: int
    p: float
    value: float

    @classmethod
    def of(cls, name: str, n: int, p: float | None = None) -> "SharpConstant":
        if name == "S_n":
            return cls(name, n, critical_exponent(n), s_n(n))
        if name == "S_np":
            return cls(name, n, p, s_np(n, p))
        if name == "S_bar_3p":
            if n != 3:
                raise DomainError("the closed hyperbolic constant is known for n = 3 only")
            return cls(name, 3, p, s_3p_identify(p))
        raise DomainError(f"unknown constant {name!r}")


@dataclass(frozen=True)
class MinimizerProfile:
    kind: str  # "interior_point" or "two_point"
    n: int
    p: float

    def __post_init__(self):
        if self.kind not in ("interior_point", "two_point"):
            raise DomainError(f"unknown minimizer kind {self.kind!r}")
        _check_np(self.n, self.p)

    @property
    def k(self) -> float:
        return (self.p - 2) * (self.n - 2) / 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DomainError(f"points must have {self.n} coordinates")
        expo = -2.0 / (self.p - 2)
        if self.kind == "interior_point":
            r = np.linalg.norm(x, axis=-1)
            return (1.0 + r**self.k) ** expo
        e = np.zeros(self.n)
        e[-1] = 1.0
        rp = np.linalg.norm(x + e, axis=-1)
        rm = np.linalg.norm(x - e, axis=-1)
        return (rp**self.k + rm**self.k) ** expo


def minimizer_eval(profile: MinimizerProfile, x):
    return profile(x)


def radial_quotient_interior(n: int, p: float, quad: QuadratureSpec = DEFAULT_QUAD, scale: float = 1.0) -> float:
    """Rayleigh quotient of (1 + |scale x|^k)^{-2/(p-2)} in the weighted Sobolev inequality.

    Both integrals are reduced to radial form; the sphere-area factor
    enters once as |S^{n-1}|^{1 - 2/p}.
    """
    _check_np(n, p)
    k = (p - 2) * (n - 2) / 2
    m = 2.0 / (p - 2)
    w = p * (n - 2) / 2 - n  # weight exponent
    # tail exponents: grad part ~ r^{1-n}, weighted L^p part ~ r^{-1 - p(n-2)/2}
    if not (n - 1 > 1 and p * (n - 2) / 2 > 0):
        raise DomainError("radial integrals do not converge")
    lam = float(scale)

    def num(r):
        s = lam * r
        du = -m * k * lam * s ** (k - 1) * (1 + s**k) ** (-m - 1)
        return du * du * r ** (n - 1)

    def den(r):
        s = lam * r
        return r ** (w + n - 1) * (1 + s**k) ** (-m * p)

    right = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions, Transform.ALGEBRAIC_RIGHT)
    left = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions)
    N = integrate(num, 0.0, 1.0, left) + integrate(num, 1.0, math.inf, right)
    D = integrate(den, 0.0, 1.0, left) + integrate(den, 1.0, math.inf, right)
    return sphere_area(n) ** (1 - 2 / p) * N / D ** (2 / p)
