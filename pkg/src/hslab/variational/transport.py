"""Consistency of the reduced quotients under the changes of variables.

The same radial trial function is pushed through each substitution and
every presentation is evaluated by independent quadrature:

* Euclidean: u(r) in the radial form of the weighted Sobolev quotient
  against v(t) = u(t^{-1/(n-2)}) in the t-form, scaled by (n-2)^{(p+2)/p}.
* Hyperbolic: w(rho) supported in [a, b] gives u = phi w in the direct
  polar form (with the Poincare term), the h-weighted rho-form, and, via
  v(t) = w(rho(t)), the g/Y-weighted t-form both with u = f v (Hardy and
  Poincare terms present) and after the substitution.  For radial trials
  all of them coincide after the (n-2)^{(p+2)/p} rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import mappings, profiles
from ..errors import DomainError
from ..numerics import QuadratureSpec
from ..sharp_constants import radial_quotient_interior, sphere_area
from .reduced import ReducedFunctional, minim_profile_t, quotient_of_profile

__all__ = ["TransportReport", "rain111_consistency", "hyperbolic_consistency", "bump"]

_QUAD = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12, max_subdivisions=500)


@dataclass(frozen=True)
class TransportReport:
    values: dict
    reference: str

    @property
    def max_relative_spread(self) -> float:
        ref = self.values[self.reference]
        return max(abs(v / ref - 1.0) for v in self.values.values())


def bump(a: float, b: float, power: int = 4):
    """((s - a)(b - s))^power on [a, b] and its derivative (vectorized)."""
    if not b > a:
        raise DomainError("empty bump support")

    def w(s):
        s = np.asarray(s, dtype=float)
        q = np.where((s > a) & (s < b), (s - a) * (b - s), 0.0)
        out = q**power
        return float(out) if out.ndim == 0 else out

    def dw(s):
        s = np.asarray(s, dtype=float)
        q = np.where((s > a) & (s < b), (s - a) * (b - s), 0.0)
        out = power * q ** (power - 1) * (a + b - 2 * s)
        return float(out) if out.ndim == 0 else out

    return w, dw


def _gl_grid(lo, hi, count, order=16, log=False):
    """Composite Gauss-Legendre points and weights on [lo, hi] (in ln s when ``log``)."""
    x, wt = np.polynomial.legendre.leggauss(order)
    a, b = (math.log(lo), math.log(hi)) if log else (lo, hi)
    edges = np.linspace(a, b, count + 1)
    half = 0.5 * np.diff(edges)[:, None]
    pts = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half * x
    wts = half * wt
    if log:
        # t = e^s; the t-image of a rho-interval can start many decades below 1
        pts = np.exp(pts)
        wts = wts * pts
    return pts.ravel(), wts.ravel()


def rain111_consistency(n: int, p: float, lam: float = 1.0) -> TransportReport:
    """The minimizer in r against its image under t = r^{-(n-2)}."""
    direct = radial_quotient_interior(n, p, scale=lam ** (1.0 / (n - 2)))
    v, dv = minim_profile_t(n, p, lam)
    func = ReducedFunctional("rain111", n, p)
    reduced = quotient_of_profile(func, v, derivative=dv, support=(0.0, math.inf)) * (n - 2) ** ((p + 2) / p)
    return TransportReport({"euclid_radial": direct, "rain111": reduced}, "euclid_radial")


def hyperbolic_consistency(n: int, p: float, support: tuple[float, float] | None = None) -> TransportReport:
    if support is None:
        # for larger n, rho near 0 corresponds to t far below double range
        a = max(0.5, float(mappings.rho_map(n).rho_of_t(1e-10)))
        support = (a, a + 2.5)
    a, b = support
    if not 0 < a < b:
        raise DomainError("support must lie in (0, inf)")
    w, dw = bump(a, b)
    hp = profiles.h_profile(n)
    gp = profiles.g_profile()
    k = (n - 1) / 2
    ang = sphere_area(n) ** (1 - 2 / p)
    scale = (n - 2) ** ((p + 2) / p)

    # direct polar form, u = phi w
    r, wr = _gl_grid(a, b, 400)
    sr = np.sinh(r)
    h = hp.value(r)
    phi = sr**-k * h
    dphi = sr**-k * (hp.deriv(r) - k * h / np.tanh(r))
    u = phi * w(r)
    du = dphi * w(r) + phi * dw(r)
    num = np.sum(wr * sr ** (n - 1) * (du * du - k * k * u * u))
    den = np.sum(wr * sr ** (p * (n - 2) / 2 - 1) * np.abs(u) ** p)
    q_direct = float(ang * num / den ** (2 / p))

    # adaptive quadrature of the reduced rho-form
    q_rho = quotient_of_profile(ReducedFunctional("hyperbolic_rho", n, p), w, quad=_QUAD, derivative=dw, support=(a, b))

    # t-forms through v(t) = w(rho(t)), rho' = h(rho)^2 / g(t)^2
    rm = mappings.rho_map(n)
    ta, tb = float(rm.t_of_rho(a)), float(rm.t_of_rho(b))
    t, wt = _gl_grid(ta, tb, 800, log=True)
    rt = rm.rho_of_t(t)
    g = gp.value(t)
    v = w(rt)
    dv = dw(rt) * hp.value(rt) ** 2 / g**2
    y = rm.y_weight(t) ** ((p + 2) / 2)
    st = np.sinh(t)

    num = np.sum(wt * g * g * dv * dv)
    den = np.sum(wt * st ** (-(p + 2) / 2) * g**p * y * np.abs(v) ** p)
    q_y = float(ang * num / den ** (2 / p))

    # u = f v with the Hardy and Poincare terms still present
    f = st**-k * g
    df = st**-k * (gp.deriv(t) - k * g / np.tanh(t))
    u = f * v
    du = df * v + f * dv
    num = np.sum(wt * st ** (n - 1) * (du * du - k * k * u * u - ((n - 2) / 2) ** 2 * u * u / (st * st)))
    den = np.sum(wt * st ** (p * (n - 2) / 2 - 1) * y * np.abs(u) ** p)
    q_hardy = float(ang * num / den ** (2 / p))

    vals = {"direct_polar": q_direct, "hyperbolic_rho": q_rho, "t_form_hardy": scale * q_hardy, "y_form": scale * q_y}
    return TransportReport(vals, "hyperbolic_rho")
