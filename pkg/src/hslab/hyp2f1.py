"""Gauss hypergeometric function on the non-positive real ray.

Only three parameter families are needed (plus their contiguous shifts):

    F   = F(1/2, 1/2; 1; z)
    F1  = F((n-1)/2, (n-1)/2; n-1; z)
    F2  = F((n-1)/2, -(n-3)/2; 1; z)

All routines accept scalars or numpy arrays for ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentSeries, DomainError

__all__ = [
    "Hyp2F1Params",
    "F_PARAMS",
    "f1_params",
    "f2_params",
    "f21",
    "f21_series",
    "f21_pfaff",
    "f21_deriv",
    "log_deriv_q",
    "gamma",
]

_TERM_RTOL = 1e-17
_MAX_TERMS = 100_000


def _is_nonpos_int(x):
    return x <= 0 and float(x).is_integer()


@dataclass(frozen=True)
class Hyp2F1Params:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if _is_nonpos_int(self.c):
            raise DomainError(f"c={self.c} is a non-positive integer")

    @property
    def terminating(self) -> bool:
        return _is_nonpos_int(self.a) or _is_nonpos_int(self.b)

    def shifted(self) -> "Hyp2F1Params":
        """Parameters of the derivative series (a+1, b+1; c+1)."""
        return Hyp2F1Params(self.a + 1, self.b + 1, self.c + 1)


F_PARAMS = Hyp2F1Params(0.5, 0.5, 1.0)


def f1_params(n: int) -> Hyp2F1Params:
    return Hyp2F1Params((n - 1) / 2, (n - 1) / 2, n - 1.0)


def f2_params(n: int) -> Hyp2F1Params:
    return Hyp2F1Params((n - 1) / 2, -(n - 3) / 2, 1.0)


def gamma(x: float) -> float:
    # libm tgamma; accurate to a few ulp for the positive arguments used here
    return math.gamma(x)


def f21_series(params: Hyp2F1Params, z):
    """Plain power series, summed until the next term is negligible."""
    z = np.asarray(z, dtype=float)
    a, b, c = params.a, params.b, params.c
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(_MAX_TERMS):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        total = total + term
        if np.all(np.abs(term) <= _TERM_RTOL * np.abs(total)):
            return total if total.ndim else float(total)
        if not np.all(np.isfinite(total)):
            break
    raise DivergentSeries(f"series for {params} did not settle within {_MAX_TERMS} terms")


def f21_pfaff(params: Hyp2F1Params, z):
    """Pfaff form (1-z)^(-a) F(a, c-b; c; z/(z-1)), valid for z < 1."""
    z = np.asarray(z, dtype=float)
    a, b, c = params.a, params.b, params.c
    w = z / (z - 1.0)
    res = (1.0 - z) ** (-a) * f21_series(Hyp2F1Params(a, c - b, c), w)
    return res if np.ndim(res) else float(res)


def _check_ray(z):
    if np.any(np.asarray(z) > 0) or np.any(np.isnan(z)):
        raise DomainError("only z <= 0 is supported")


def f21(params: Hyp2F1Params, z):
    """F(a, b; c; z) for z <= 0.

    |z| <= 1/2 uses the series directly; further out the Pfaff transform
    maps the argument into [1/3, 1).  Terminating series (a or b a
    non-positive integer) are polynomials and are always summed directly.
    """
    _check_ray(z)
    if params.terminating:
        return f21_series(params, z)
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return f21_series(params, z) if z >= -0.5 else f21_pfaff(params, z)
    out = np.empty_like(z)
    near = z >= -0.5
    if near.any():
        out[near] = f21_series(params, z[near])
    if (~near).any():
        out[~near] = f21_pfaff(params, z[~near])
    return out


def f21_deriv(params: Hyp2F1Params, z):
    """dF/dz = (ab/c) F(a+1, b+1; c+1; z)."""
    scale = params.a * params.b / params.c
    if scale == 0.0:
        return 0.0 * np.asarray(z, dtype=float) if np.ndim(z) else 0.0
    return scale * f21(params.shifted(), z)


def log_deriv_q(n: int, w):
    """q(w) = F1'(w) / F1(w) for the family F1 of dimension ``n``."""
    if n < 4:
        raise DomainError("log_deriv_q needs n >= 4")
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr < -1.0) or np.any(w_arr > 0.0):
        raise DomainError("w must lie in [-1, 0]")
    p = f1_params(n)
    return f21_deriv(p, w) / f21(p, w)
