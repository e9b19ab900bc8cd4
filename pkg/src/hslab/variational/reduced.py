"""Reduced one-dimensional Rayleigh quotients and their discrete minimization.

Every reduced functional here has the radial form

    pref * S_num * int a(t) v'(t)^2 dt / (S_den * int b(t) |v|^p dt)^{2/p}

where ``S_num`` and ``S_den`` are the angular integrals of the weights
(|S^{n-1}| for full-sphere kinds, int_{S^{n-1}_+} omega_n^2 and
int_{S^{n-1}_+} omega_n^p for the half-sphere kinds).  With
``sphere_factor_included`` the angular factors are part of the value, so
the result is directly comparable to the n-dimensional constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded, solveh_banded

from .. import mappings, profiles
from ..errors import DomainError, NonConvergence, SignError
from ..hyp2f1 import gamma
from ..numerics import QuadratureSpec, Transform, integrate
from ..sharp_constants import critical_exponent, s_np, sphere_area

__all__ = [
    "KINDS",
    "RadialGrid",
    "ReducedFunctional",
    "RayleighResult",
    "hemisphere_moment",
    "minimize_reduced",
    "quotient_of_profile",
    "minim_profile_t",
]

KINDS = ("rain111", "cp", "hyperbolic_rho", "eq116", "kal5", "s1234561")
T_MAX = 1e6


def hemisphere_moment(n: int, q: float) -> float:
    """int over the upper half of S^{n-1} of omega_n^q."""
    return math.pi ** ((n - 1) / 2) * gamma((q + 1) / 2) / gamma((q + n) / 2)


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray
    scheme: str = "uniform_log"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 65:
            raise DomainError("a radial grid needs at least 64 intervals")
        if not np.all(nodes > 0) or not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes must be positive and strictly increasing")

    @classmethod
    def log(cls, t_min: float, t_max: float, intervals: int) -> "RadialGrid":
        return cls(np.geomspace(t_min, t_max, intervals + 1), "uniform_log")

    @property
    def intervals(self) -> int:
        return len(self.nodes) - 1

    def refine(self) -> "RadialGrid":
        """Insert the geometric midpoint of every interval (nested grid)."""
        t = self.nodes
        mid = np.sqrt(t[:-1] * t[1:])
        out = np.empty(2 * len(t) - 1)
        out[0::2] = t
        out[1::2] = mid
        return RadialGrid(out, self.scheme)


@dataclass(frozen=True)
class ReducedFunctional:
    kind: str
    n: int
    p: float
    params: dict = field(default_factory=dict)
    sphere_factor_included: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown reduced functional {self.kind!r}")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("n must be an integer >= 3")
        if not 2 < self.p <= critical_exponent(self.n) * (1 + 1e-15):
            raise DomainError("p outside (2, 2*]")
        if self.kind == "cp":
            theta = self.params.get("theta", 0.0)
            if not 0 <= theta < 0.5:
                raise DomainError("cp needs 0 <= theta < 1/2")

    # -- weights
    @property
    def hyperbolic(self) -> bool:
        return self.kind in ("hyperbolic_rho", "eq116")

    def a(self, t):
        if self.hyperbolic:
            return profiles.h_eval(self.n, t) ** 2
        return np.ones_like(np.asarray(t, dtype=float))

    def b(self, t):
        t = np.asarray(t, dtype=float)
        e = -(self.p + 2) / 2
        if self.hyperbolic:
            # sinh^{-(p+2)/2} without overflow: (2 e^{-t} / (1 - e^{-2t}))^{(p+2)/2}
            s = (2.0 * np.exp(-t) / -np.expm1(-2.0 * t)) ** (-e)
            return s * profiles.h_eval(self.n, t) ** self.p
        return t**e

    # -- constants
    def prefactor(self) -> float:
        p, n = self.p, self.n
        if self.kind == "cp":
            return (1 - 2 * self.params.get("theta", 0.0)) ** ((p + 2) / p)
        if self.kind == "eq116":
            return (n - 2) ** (-(p + 2) / p)
        return 1.0

    def angular(self) -> tuple[float, float]:
        """(numerator, denominator) angular integrals."""
        if self.kind in ("kal5", "s1234561"):
            return hemisphere_moment(self.n, 2.0), hemisphere_moment(self.n, self.p)
        w = sphere_area(self.n)
        return w, w

    def scale(self) -> float:
        """Constant multiplying int a v'^2 / (int b |v|^p)^{2/p}."""
        c = self.prefactor()
        if self.sphere_factor_included:
            sn, sd = self.angular()
            c *= sn / sd ** (2 / self.p)
        return c

    def t_min(self) -> float:
        """Left end of the t-domain (the image of the domain boundary)."""
        kind, P = self.kind, self.params
        if kind == "cp":
            alpha = P.get("alpha", mappings.alpha_euclid(self.n))
            return mappings.x_raw(alpha) ** (2 * P.get("theta", 0.0) - 1)
        if kind == "kal5":
            g = P.get("gamma", 0.0)
            rho = P.get("rho", 1.0)
            return rho ** (2 * g - self.n) / (self.n - 2 * g)
        if kind == "s1234561":
            alpha = P.get("alpha", mappings.alpha_n_gamma(self.n, P.get("gamma", 0.0)))
            return 1.0 / mappings.x_raw(alpha)
        # rain111 (R = 1e6^{1/(n-2)}) and the hyperbolic kinds start near 0
        return P.get("t_min", 1e-6)

    def target(self):
        """Closed-form infimum when one is known, else None."""
        n, p = self.n, self.p
        if not self.sphere_factor_included:
            return None
        if self.kind == "rain111":
            return (n - 2) ** (-(p + 2) / p) * s_np(n, p)
        if self.kind == "cp":
            theta = self.params.get("theta", 0.0)
            return ((1 - 2 * theta) / (n - 2)) ** ((p + 2) / p) * s_np(n, p)
        if self.kind == "hyperbolic_rho" and n == 3:
            return s_np(3, p)
        if self.kind == "eq116" and n == 3:
            return s_np(3, p)
        return None


@dataclass(frozen=True)
class RayleighResult:
    estimate: float
    target: float | None
    relative_gap: float | None
    iterations: int
    converged: bool
    profile: np.ndarray | None = None


# ---------------------------------------------------------------- discretization

_GL = 8


class _Discretization:
    def __init__(self, func: ReducedFunctional, grid: RadialGrid):
        t = grid.nodes
        self.func, self.t = func, t
        self.h = np.diff(t)
        x, w = np.polynomial.legendre.leggauss(_GL)
        self.lam = 0.5 * (x + 1.0)  # local coordinate of each Gauss point in [0, 1]
        self.w = 0.5 * w
        pts = t[:-1, None] + self.h[:, None] * self.lam
        with np.errstate(over="ignore", under="ignore"):
            self.bq = func.b(pts) * (self.h[:, None] * self.w)  # weights times b at Gauss points
        if func.hyperbolic:
            stiff = np.sum(func.a(pts) * self.w, axis=1) / self.h
        else:
            stiff = 1.0 / self.h
        self.stiff = stiff
        m = len(t) - 2  # interior unknowns
        ab = np.zeros((2, m))
        ab[1] = stiff[:-1] + stiff[1:]
        ab[0, 1:] = -stiff[1:-1]
        self.banded = ab

    def full(self, v_in):
        v = np.zeros(len(self.t))
        v[1:-1] = v_in
        return v

    def energy(self, v_in) -> float:
        v = self.full(v_in)
        return float(np.sum(self.stiff * np.diff(v) ** 2))

    def _vals(self, v_in):
        v = self.full(v_in)
        return v[:-1, None] * (1 - self.lam) + v[1:, None] * self.lam

    def pnorm(self, v_in) -> float:
        return float(np.sum(self.bq * np.abs(self._vals(v_in)) ** self.func.p))

    def pgrad(self, v_in):
        """(1/p) d/dv of pnorm: int b |v|^{p-2} v phi_i."""
        vals = self._vals(v_in)
        f = self.bq * np.abs(vals) ** (self.func.p - 2) * vals
        g = np.zeros(len(self.t))
        g[:-1] += np.sum(f * (1 - self.lam), axis=1)
        g[1:] += np.sum(f * self.lam, axis=1)
        return g[1:-1]

    def quotient(self, v_in) -> float:
        return self.func.scale() * self.energy(v_in) / self.pnorm(v_in) ** (2 / self.func.p)

    def solve(self, rhs):
        return solveh_banded(self.banded, rhs, lower=False)

    def newton_matrix(self, v_in):
        """Banded form of K - (p-1) M_v, M_v the |v|^{p-2} b-weighted mass matrix."""
        p = self.func.p
        vals = self._vals(v_in)
        wq = self.bq * (p - 1) * np.abs(vals) ** (p - 2)
        l0, l1 = 1 - self.lam, self.lam
        m00 = np.sum(wq * l0 * l0, axis=1)  # per element
        m01 = np.sum(wq * l0 * l1, axis=1)
        m11 = np.sum(wq * l1 * l1, axis=1)
        diag = np.zeros(len(self.t))
        diag[:-1] += self.stiff - m00
        diag[1:] += self.stiff - m11
        off = -self.stiff - m01  # coupling between node e and e+1
        m = len(self.t) - 2
        ab = np.zeros((3, m))
        ab[0, 1:] = off[1:-1]
        ab[1] = diag[1:-1]
        ab[2, :-1] = off[1:-1]
        return ab

    def residual(self, v_in):
        v = self.full(v_in)
        kv = np.zeros(len(self.t))
        dv = np.diff(v) * self.stiff
        kv[:-1] -= dv
        kv[1:] += dv
        return kv[1:-1] - self.pgrad(v_in)


def minimize_reduced(
    func: ReducedFunctional,
    grid: RadialGrid | None = None,
    tol: float = 1e-12,
    max_iter: int = 5000,
    initial=None,
    newton_steps: int = 4,
) -> RayleighResult:
    """Minimize the discretized quotient over P1 profiles vanishing at both ends.

    Normalized nonlinear inverse iteration v <- K^{-1} (b |v|^{p-2} v) until
    the quotient settles, then a few Newton steps on K v = b |v|^{p-2} v.
    Every iterate is an admissible trial function; the returned estimate is
    the exact quotient of the final piecewise-linear iterate, hence an upper
    bound up to quadrature error in the denominator.
    """
    if grid is None:
        grid = RadialGrid.log(func.t_min(), T_MAX, 2048)
    disc = _Discretization(func, grid)
    t = grid.nodes
    p = func.p
    if initial is None:
        # sqrt(t) sin(pi s) puts the bump of v / sqrt(t) in the middle of the
        # log-domain; scale-invariant problems only drift there very slowly
        s = (np.log(t) - math.log(t[0])) / (math.log(t[-1]) - math.log(t[0]))
        v = np.sin(math.pi * s[1:-1]) * np.sqrt(t[1:-1] / t[len(t) // 2])
    else:
        v = np.asarray(initial, dtype=float)[1:-1]
    v = v / np.max(np.abs(v))
    q_old = disc.quotient(v)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = disc.solve(disc.pgrad(v))
        if np.any(~(w > 0)):
            raise SignError(f"iterate lost positivity at step {it}")
        v = w / np.max(w)
        q = disc.quotient(v)
        if abs(q - q_old) <= tol * abs(q):
            converged = True
            break
        q_old = q
    if not converged:
        raise NonConvergence(f"inverse iteration did not settle in {max_iter} steps")
    # Newton polish on K v = G(v); kept only while it does not raise the quotient
    v = v * (disc.energy(v) / disc.pnorm(v)) ** (1 / (p - 2))
    for _ in range(newton_steps):
        step = solve_banded((1, 1), disc.newton_matrix(v), -disc.residual(v))
        cand = v + step
        if np.any(~(cand > 0)):
            break
        q_cand = disc.quotient(cand)
        if q_cand > q * (1 + 1e-14):
            break
        v, q = cand, q_cand
        if np.max(np.abs(step)) <= 1e-12 * np.max(v):
            break
    target = func.target()
    gap = None if target is None else (q - target) / target
    return RayleighResult(q, target, gap, it, converged, disc.full(v))


# ---------------------------------------------------------------- fixed profiles


def _central_diff(f, t):
    # Richardson-extrapolated central difference
    h = 1e-3 * max(abs(t), 1e-12)
    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (f(t + h / 2) - f(t - h / 2)) / h
    return (4 * d2 - d1) / 3


def _split_integral(f, lo, hi, quad):
    """int_lo^hi f, split at geometric points so every piece is well scaled."""
    if math.isinf(hi):
        mid = max(1.0, 2 * lo)
        spec = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions, Transform.ALGEBRAIC_RIGHT)
        return _split_integral(f, lo, mid, quad) + integrate(f, mid, math.inf, spec)
    plain = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions)
    if lo <= 0:
        first = min(hi, 1e-8 if hi > 1e-8 else hi)
        total = integrate(f, 0.0, first, plain) if first > 0 else 0.0
        lo = first
        if lo >= hi:
            return total
    else:
        total = 0.0
    pieces = max(1, int(math.ceil(math.log10(hi / lo))))
    edges = np.geomspace(lo, hi, pieces + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate(f, float(a), float(b), plain)
    return total


def quotient_of_profile(
    func: ReducedFunctional,
    profile,
    quad: QuadratureSpec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-11, max_subdivisions=500),
    derivative=None,
    support: tuple[float, float] | None = None,
) -> float:
    """Quotient of a given profile by adaptive quadrature (no discretization)."""
    lo, hi = support if support is not None else (func.t_min(), math.inf)
    dv = derivative if derivative is not None else (lambda s: _central_diff(profile, s))
    p = func.p

    def num(s):
        return float(func.a(s)) * dv(s) ** 2

    def den(s):
        with np.errstate(over="ignore", under="ignore"):
            return float(func.b(s)) * abs(profile(s)) ** p

    N = _split_integral(num, lo, hi, quad)
    D = _split_integral(den, lo, hi, quad)
    return func.scale() * N / D ** (2 / p)


def minim_profile_t(n: int, p: float, lam: float = 1.0):
    """The interior minimizer written in t = r^{-(n-2)}: v(t) = (1 + (t/lam)^{-(p-2)/2})^{-2/(p-2)}.

    Returns (v, v') as callables.
    """
    c = (p - 2) / 2
    m = 2 / (p - 2)

    def v(t):
        s = (t / lam) ** (-c)
        return (1 + s) ** (-m)

    def dv(t):
        s = (t / lam) ** (-c)
        return m * c * s / t * (1 + s) ** (-m - 1)

    return v, dv
