"""Radial profiles g(t), h(t) built from their hypergeometric closed forms.

g solves g'' + g/(4 sinh^2 t) = 0 with g(+inf) = 1, and for n >= 4
h solves h'' - (n-1)(n-3)/(4 sinh^2 t) h = 0 with h(+inf) = 1.  Both have
an outer form F(xi), xi = 1/(1 - e^{2t}), for t >= ln sqrt2 and an inner
form involving

    K_m(w) = int_{-1}^{w} ds / (s^m (s-1) G(s)^2),   -1 <= w < 0,

with (m, G) = (1, F) for g and (n-1, F1) for h.  K_m is evaluated from a
Chebyshev interpolant of the integrand on [-1, -1/4] and a termwise
integrated Taylor expansion of 1/((s-1) G^2) on (-1/4, 0), so each call
costs O(1) after construction.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

from . import hyp2f1 as hg
from .errors import DomainError, MatchFailure
from .numerics import OdeProblem, QuadratureSpec, integrate, integrate_ode

__all__ = [
    "BRANCH_POINT",
    "GProfile",
    "HProfile",
    "g_profile",
    "h_profile",
    "g_eval",
    "h_eval",
    "matching_constants",
    "asymptotic_B",
    "h_asymptotic_check",
    "g_asymptotic",
    "radial_factors",
    "ode_coefficient",
    "ode_residual",
    "oracle_ode_check",
]

BRANCH_POINT = 0.5 * math.log(2.0)
_SEAM = -0.25  # Chebyshev part on [-1, SEAM], Taylor part on (SEAM, 0)
_CHEB_DEG = 72
_TAYLOR_TERMS = 64


def _series_coeffs(p: hg.Hyp2F1Params, count: int) -> np.ndarray:
    out = np.empty(count)
    out[0] = 1.0
    for k in range(count - 1):
        out[k + 1] = out[k] * (p.a + k) * (p.b + k) / ((p.c + k) * (k + 1.0))
    return out


def _phi_taylor(p: hg.Hyp2F1Params, count: int) -> np.ndarray:
    """Taylor coefficients of 1/((s-1) G(s)^2) at s = 0."""
    g = _series_coeffs(p, count)
    g2 = np.convolve(g, g)[:count]
    r = np.empty(count)
    r[0] = 1.0
    for k in range(1, count):
        r[k] = -np.dot(g2[1 : k + 1], r[k - 1 :: -1])
    return -np.cumsum(r)


class _InnerIntegral:
    """K_m(w) for w in [-1, 0)."""

    def __init__(self, p: hg.Hyp2F1Params, m: int):
        self.p, self.m = p, m

        def integrand(s):
            return s ** (-float(m)) / ((s - 1.0) * hg.f21(p, s) ** 2)

        cheb = C.Chebyshev.interpolate(integrand, _CHEB_DEG, domain=[-1.0, _SEAM])
        self._anti = cheb.integ(lbnd=-1.0)
        self.at_seam = float(self._anti(_SEAM))
        self._coef = _phi_taylor(p, _TAYLOR_TERMS)

    def _taylor_part(self, w):
        # sum_j c_j int_SEAM^w s^(j-m) ds, powers of w built by repeated multiplication
        m = self.m
        wk = w ** float(1 - m)
        total = np.zeros_like(w)
        const = 0.0
        for j, c in enumerate(self._coef):
            k = j - m + 1
            if k == 0:
                total = total + c * np.log(w / _SEAM)
            else:
                total = total + (c / k) * wk
                const += c * _SEAM**k / k
            wk = wk * w
        return total - const

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.empty_like(w)
        left = w <= _SEAM
        out[left] = self._anti(w[left])
        right = ~left
        if right.any():
            out[right] = self.at_seam + self._taylor_part(w[right])
        return out

    def deriv(self, w):
        w = np.asarray(w, dtype=float)
        return w ** (-float(self.m)) / ((w - 1.0) * hg.f21(self.p, w) ** 2)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("profiles are defined for t > 0")
    return t


def _ret(x):
    return float(x) if np.ndim(x) == 0 else x


class _TwoBranchProfile:
    """Shared evaluation of  outer: G0(xi)  /  inner: x^p G(-x) (c1 + c2 K_m(-x))."""

    outer: hg.Hyp2F1Params
    inner: hg.Hyp2F1Params
    power: float
    c1: float
    c2: float
    _K: _InnerIntegral

    def _inner_value(self, x):
        return x**self.power * hg.f21(self.inner, -x) * (self.c1 + self.c2 * self._K(-x))

    def _inner_dx(self, x):
        G = hg.f21(self.inner, -x)
        L = self.c1 + self.c2 * self._K(-x)
        dG = hg.f21_deriv(self.inner, -x)
        dK = -self._K.deriv(-x)
        xp = x**self.power
        return self.power * x ** (self.power - 1.0) * G * L - xp * dG * L + xp * G * self.c2 * dK

    def value(self, t):
        t = _check_t(t)
        flat = np.atleast_1d(t)
        out = np.empty_like(flat)
        with np.errstate(over="ignore"):
            x = np.expm1(2.0 * flat)
        outer = flat >= BRANCH_POINT
        if outer.any():
            out[outer] = hg.f21(self.outer, -1.0 / x[outer])
        if (~outer).any():
            out[~outer] = self._inner_value(x[~outer])
        return _ret(out.reshape(t.shape))

    def deriv(self, t):
        """Exact first derivative in t."""
        t = _check_t(t)
        flat = np.atleast_1d(t)
        out = np.empty_like(flat)
        with np.errstate(over="ignore"):
            x = np.expm1(2.0 * flat)
        outer = flat >= BRANCH_POINT
        if outer.any():
            xo = x[outer]
            with np.errstate(over="ignore", invalid="ignore"):
                d = hg.f21_deriv(self.outer, -1.0 / xo) * 2.0 * (1.0 + xo) / xo**2
            out[outer] = np.where(np.isfinite(xo), d, 0.0)
        if (~outer).any():
            xi = x[~outer]
            out[~outer] = self._inner_dx(xi) * 2.0 * (1.0 + xi)
        return _ret(out.reshape(t.shape))

    def __call__(self, t):
        return self.value(t)

    def seam_mismatch(self) -> tuple[float, float]:
        """(value, derivative) jump between the two branches at ln sqrt2."""
        fo = hg.f21(self.outer, -1.0)
        do = hg.f21_deriv(self.outer, -1.0) * 4.0  # dxi/dt = 2(1+x)/x^2 = 4 at x = 1
        fi = float(self._inner_value(np.array([1.0]))[0])
        di = float(self._inner_dx(np.array([1.0]))[0]) * 4.0
        return abs(fi - fo), abs(di - do)


def _b_integrand_small(t, recip):
    # (1/F(-t)^2 - 1 - t) / (t (1 + t)) from the series of 1/F^2
    s = -t
    head = recip[1] + recip[2] * s + recip[3] * s * s + recip[4] * s**3
    return (-head - 1.0) / (1.0 + t)


class GProfile(_TwoBranchProfile):
    branch_point = BRANCH_POINT

    def __init__(self):
        self.outer = self.inner = hg.F_PARAMS
        self.power = 0.5
        self.c1 = 1.0
        F, dF = hg.f21(hg.F_PARAMS, -1.0), hg.f21_deriv(hg.F_PARAMS, -1.0)
        # differentiability at xi = -1; the closed value is -1/pi
        self.c2_star = F * (4.0 * dF - F)
        self.c2 = -self.c2_star  # the kernel is usually written 1/(s(1-s)F^2)
        self._K = _InnerIntegral(hg.F_PARAMS, 1)
        self.asymptotic_B = _compute_B()

    def asymptotic(self, t):
        """sqrt(2t) (-ln(2t)/pi + B)."""
        t = np.asarray(t, dtype=float)
        return _ret(np.sqrt(2 * t) * (-np.log(2 * t) / math.pi + self.asymptotic_B))


def _compute_B() -> float:
    p = hg.F_PARAMS
    g = _series_coeffs(p, 6)
    g2 = np.convolve(g, g)[:6]
    recip = np.empty(6)
    recip[0] = 1.0
    for k in range(1, 6):
        recip[k] = -np.dot(g2[1 : k + 1], recip[k - 1 :: -1])

    def integrand(t):
        if t < 1e-6:
            return _b_integrand_small(t, recip)
        F2 = hg.f21(p, -t) ** 2
        return (1.0 - (1.0 + t) * F2) / (t * (t + 1.0) * F2)

    val = integrate(integrand, 0.0, 1.0, QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12))
    return 1.0 + val / math.pi


class HProfile(_TwoBranchProfile):
    def __init__(self, n: int):
        if int(n) != n or n < 3:
            raise DomainError("h profile needs integer n >= 3")
        self.n = int(n)
        self.special_case_n3 = self.n == 3
        if self.special_case_n3:
            self.c1_sharp = 1.0
            self.c2_sharp = 0.0
            return
        self.outer = hg.f2_params(self.n)
        self.inner = hg.f1_params(self.n)
        self.power = (self.n - 1) / 2
        self.c1_sharp, self.c2_sharp = _sharp_constants(self.n)
        if abs(self.c2_sharp) <= 1e-10:
            raise MatchFailure(f"c2# vanishes for n={n}")
        self.c1, self.c2 = self.c1_sharp, self.c2_sharp
        self._K = _InnerIntegral(self.inner, self.n - 1)

    def value(self, t):
        if self.special_case_n3:
            t = _check_t(t)
            return _ret(np.ones_like(t))
        return super().value(t)

    def deriv(self, t):
        if self.special_case_n3:
            t = _check_t(t)
            return _ret(np.zeros_like(t))
        return super().deriv(t)

    def asymptotic(self, t):
        """Leading small-t form including the displayed correction."""
        n, c2 = self.n, self.c2_sharp
        t = np.asarray(t, dtype=float)
        if n == 3:
            return _ret(np.ones_like(t))
        if n == 4:
            lead = 0.5 * c2 * (2 * t) ** -0.5 * (1 - t * t * np.log(2 * t) / 8)
        else:
            corr = 1 + (n - 1) * (n - 3) / (24.0 * (n - 4)) * t * t
            lead = c2 * (-1) ** n / (n - 2) * (2 * t) ** (-(n - 3) / 2) * corr
        return _ret(lead)


def _sharp_constants(n: int) -> tuple[float, float]:
    p1, p2 = hg.f1_params(n), hg.f2_params(n)
    F1, F2 = hg.f21(p1, -1.0), hg.f21(p2, -1.0)
    q1 = hg.f21_deriv(p1, -1.0) / F1
    q2 = hg.f21_deriv(p2, -1.0) / F2
    c1 = F2 / F1
    c2 = 2.0 * (-1) ** (n - 1) * F1 * F2 * (q1 + q2 - (n - 1) / 2)
    return c1, c2


@lru_cache(maxsize=1)
def g_profile() -> GProfile:
    return GProfile()


@lru_cache(maxsize=None)
def h_profile(n: int) -> HProfile:
    return HProfile(n)


def g_eval(t):
    return g_profile().value(t)


def h_eval(n: int, t):
    return h_profile(n).value(t)


def asymptotic_B() -> float:
    return g_profile().asymptotic_B


def g_asymptotic(t):
    return g_profile().asymptotic(t)


def matching_constants(n: int, tol: float = 1e-8) -> tuple[float, float]:
    if n < 4:
        raise DomainError("matching constants exist for n >= 4")
    prof = h_profile(n)
    dv, dd = prof.seam_mismatch()
    if dv > tol * max(1.0, abs(prof.c1_sharp)) or dd > tol * max(1.0, abs(prof.c2_sharp)):
        raise MatchFailure(f"branches of h disagree at ln sqrt2 (n={n}): {dv:.2e}, {dd:.2e}")
    return prof.c1_sharp, prof.c2_sharp


def h_asymptotic_check(n: int, t: float) -> float:
    if n < 4:
        raise DomainError("h asymptotics are stated for n >= 4")
    if not 0 < t < 0.1:
        raise DomainError("h_asymptotic_check needs 0 < t < 0.1")
    prof = h_profile(n)
    return abs(prof.value(t) / prof.asymptotic(t) - 1.0)


def radial_factors(n: int, t):
    """(f, phi) = sinh(t)^{-(n-1)/2} * (g(t), h(t))."""
    t = _check_t(t)
    w = np.sinh(t) ** (-(n - 1) / 2)
    return _ret(w * g_eval(t)), _ret(w * h_eval(n, t))


# ---------------------------------------------------------------- ODE checks


def ode_coefficient(which: str, n: int | None = None):
    """c(t) with profile'' + c(t) profile = 0."""
    if which == "g":
        return lambda t: 0.25 / np.sinh(t) ** 2
    if which == "h":
        if n is None or n < 3:
            raise DomainError("h needs n >= 3")
        k = (n - 1) * (n - 3) / 4.0
        return lambda t: -k / np.sinh(t) ** 2
    raise DomainError(f"unknown profile {which!r}")


def _profile(which, n):
    return g_profile() if which == "g" else h_profile(n)


def ode_residual(which: str, n: int | None = None, points: int = 200, lo: float = 0.05, hi: float = 8.0) -> float:
    """max |f'' + c f| / max(1, |f''|) on log-spaced points, f'' by 5-point differences.

    The step is 0.01 t: small enough for the O(step^4) truncation, large
    enough that roundoff (eps / step^2) stays far below 1e-6.
    """
    prof = _profile(which, n)
    c = ode_coefficient(which, n)
    t = np.geomspace(lo, hi, points)
    h = 0.01 * t
    f = prof.value
    d2 = (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h)
    res = np.abs(d2 + c(t) * f(t)) / np.maximum(1.0, np.abs(d2))
    return float(res.max())


def oracle_ode_check(which: str, n: int | None = None, t_far: float = 8.0, t_near: float = 0.5) -> float:
    """Integrate the ODE backwards from t_far (closed-form data) and compare on [t_near, t_far]."""
    prof = _profile(which, n)
    c = ode_coefficient(which, n)

    def rhs(t, y):
        return np.array([y[1], -c(t) * y[0]])

    sol = integrate_ode(OdeProblem(rhs, t_far, t_near, (prof.value(t_far), prof.deriv(t_far)), tol=1e-13))
    ts = np.linspace(t_near, t_far, 200)
    return float(max(abs(sol(t)[0] - prof.value(t)) for t in ts))
