"""Weights X and B(r), threshold constants, the map rho(t) and the weight Y(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import profiles
from .errors import CacheRange, DomainError, MatchFailure, NoPositiveAlpha
from .numerics import QuadratureSpec, RootBracket, fixed_gauss, find_root, integrate

__all__ = [
    "x_weight",
    "x_raw",
    "LogWeight",
    "BetaWeight",
    "beta_weight",
    "beta_weight_integral",
    "lemma_alpha",
    "lemma_beta",
    "alpha_euclid",
    "alpha_n_gamma",
    "r_power",
    "alpha_threshold_theta",
    "r_n_gamma",
    "r_power_euclid",
    "alpha_n_theta",
    "Thresholds",
    "RhoMap",
    "rho_map",
    "rho_of_t",
    "y_weight",
    "threshold_search",
    "default_threshold_grid",
]

_QUAD = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12)


# ---------------------------------------------------------------- X weight


def x_raw(t):
    """1/(1 - ln t) on (0, e); used where the argument may exceed 1."""
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(t >= math.e):
        raise DomainError("X is finite and positive only on (0, e)")
    out = 1.0 / (1.0 - np.log(t))
    return float(out) if out.ndim == 0 else out


def x_weight(t):
    """X(t) = 1/(1 - ln t) on its stated domain (0, 1]."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)) or np.any(t_arr > 1):
        raise DomainError("x_weight expects t in (0, 1]")
    return x_raw(t)


@dataclass(frozen=True)
class LogWeight:
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= math.e:
            raise DomainError("alpha must lie in (0, e]")

    def __call__(self, t):
        return x_raw(self.alpha * np.asarray(t, dtype=float))


# ---------------------------------------------------------------- B(r) weight


def _check_theta_R(theta, R):
    if not 0 < theta < 2:
        raise DomainError("theta must lie in (0, 2)")
    if not R > 1:
        raise DomainError("R must exceed 1")


def beta_weight(r, theta: float, R: float):
    """Closed form of B(r) on (0, 1]."""
    _check_theta_R(theta, R)
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)) or np.any(r > 1):
        raise DomainError("beta_weight expects r in (0, 1]")
    a = R**theta
    rho = r**theta
    bracket = (
        theta * a * a
        - math.log(a - 1.0)
        + a / (a - 1.0)
        - np.log(rho / (a - rho))
        - a / (a - rho)
    )
    out = theta * a * a / (bracket * (a - rho) ** 2)
    return float(out) if out.ndim == 0 else out


def beta_weight_integral(r: float, theta: float, R: float) -> float:
    """First line of the definition of B(r), by quadrature."""
    _check_theta_R(theta, R)
    if not 0 < r <= 1:
        raise DomainError("beta_weight_integral expects r in (0, 1]")
    a = R**theta
    tail = 0.0 if r == 1 else integrate(lambda s: 1.0 / (s * (a - s**theta) ** 2), r, 1.0, _QUAD)
    return 1.0 / ((a - r**theta) ** 2 * (1.0 + tail))


def _alpha_integral_closed(a: float, theta: float) -> float:
    # int_0^1 s^(theta-1) (2a - s^theta) / (a - s^theta)^2 ds with u = s^theta
    return (math.log(a / (a - 1.0)) + 1.0 / (a - 1.0)) / theta


def _alpha_integral_quad(a: float, theta: float) -> float:
    def f(s):
        u = s**theta
        return s ** (theta - 1.0) * (2 * a - u) / (a - u) ** 2

    spec = _QUAD
    if theta < 1:
        spec = spec.with_transform(spec.endpoint_transform.POWER_LEFT, theta - 1.0)
    return integrate(f, 0.0, 1.0, spec)


def lemma_alpha(theta: float, R: float, check: bool = True) -> float:
    """alpha with -ln alpha = R^{2 theta} - 1 + int_0^1 ... (closed form)."""
    _check_theta_R(theta, R)
    a = R**theta
    closed = _alpha_integral_closed(a, theta)
    if check:
        quad = _alpha_integral_quad(a, theta)
        if abs(quad - closed) > 1e-10 * max(1.0, abs(closed)):
            raise MatchFailure(f"alpha integral: closed {closed!r} vs quadrature {quad!r}")
    return math.exp(-(a * a - 1.0 + closed))


def lemma_beta(theta: float, R: float) -> float:
    _check_theta_R(theta, R)
    a = R**theta
    return math.exp(-((a - 1.0) ** 2 - 1.0))


@dataclass(frozen=True)
class BetaWeight:
    theta: float
    R: float
    alpha_lower: float = field(init=False)
    beta_upper: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha_lower", lemma_alpha(self.theta, self.R))
        object.__setattr__(self, "beta_upper", lemma_beta(self.theta, self.R))

    def __call__(self, r):
        return beta_weight(r, self.theta, self.R)

    def sandwich_margins(self, r):
        """(B - X(alpha r), X(beta r) - B); both nonnegative on (0, 1)."""
        b = self(r)
        return b - x_raw(self.alpha_lower * np.asarray(r)), x_raw(self.beta_upper * np.asarray(r)) - b


# ---------------------------------------------------------------- thresholds


def _check_n_gamma(n, gamma):
    if int(n) != n or n < 3:
        raise DomainError("n must be an integer >= 3")
    if not 0 <= gamma < n / 2:
        raise DomainError("gamma must lie in [0, n/2)")


def alpha_euclid(n: int) -> float:
    """e^{(n-3)/(n-2)}; the Euclidean threshold (not the hyperbolic one)."""
    _check_n_gamma(n, 0.0)
    return math.exp((n - 3) / (n - 2))


def alpha_n_gamma(n: int, gamma: float) -> float:
    _check_n_gamma(n, gamma)
    return math.exp((n - 1 - 2 * gamma) / (n - 2 * gamma))


def r_power(n: int, gamma: float, theta: float) -> float:
    """R with R^theta = 1 + 1/sqrt(n - 2 gamma)."""
    _check_n_gamma(n, gamma)
    if not 0 < theta < 2:
        raise DomainError("theta must lie in (0, 2)")
    return (1.0 + 1.0 / math.sqrt(n - 2 * gamma)) ** (1.0 / theta)


def alpha_threshold_theta(n: int, gamma: float, theta: float) -> float:
    return lemma_alpha(theta, r_power(n, gamma, theta))


def r_power_euclid(n: int, theta: float) -> float:
    """R with R^theta = 1 + 1/sqrt(n - 2) (the ball inequality; gamma = 1 in r_power)."""
    return r_power(n, 1.0, theta)


def alpha_n_theta(n: int, theta: float) -> float:
    return lemma_alpha(theta, r_power_euclid(n, theta))


def r_n_gamma(n: int, gamma: float) -> float:
    """1/(n sqrt(75 R)) with R taken at theta = 1/2."""
    return 1.0 / (n * math.sqrt(75.0 * r_power(n, gamma, 0.5)))


@dataclass(frozen=True)
class Thresholds:
    n: int
    gamma: float = 0.0
    theta: float = 0.5
    values: dict = field(init=False)

    def __post_init__(self):
        n, g, th = self.n, self.gamma, self.theta
        vals = {
            "alpha_n": alpha_euclid(n),
            "alpha_n_theta": alpha_n_theta(n, th),
            "alpha_n_gamma": alpha_n_gamma(n, g),
            "alpha_n_gamma_theta": alpha_threshold_theta(n, g, th),
            "R_theta_gamma": r_power(n, g, th),
            "r_n_gamma": r_n_gamma(n, g),
        }
        object.__setattr__(self, "values", vals)


# ---------------------------------------------------------------- rho(t)

_GL_ORDER = 16
_T_LO, _T_HI = 1e-8, 60.0
_R_HI = 80.0
_TAIL_START = 1e-60


def _log_panels(f, lo, hi):
    """int_lo^hi f(s) ds over each panel, integrating in u = ln s."""
    ul, uh = np.log(lo), np.log(hi)

    def fu(u):
        s = np.exp(u)
        return f(s) * s

    return fixed_gauss(fu, ul, uh, _GL_ORDER)


def _inv_g2(s):
    return 1.0 / profiles.g_eval(s) ** 2


class RhoMap:
    """Tabulated G(t) = int_0^t ds/g^2 and H(rho) = int_0^rho dr/h^2, and rho = H^{-1}(G(t))."""

    def __init__(self, n: int, nodes: int = 2048):
        if int(n) != n or n < 3:
            raise DomainError("RhoMap needs integer n >= 3")
        self.n = int(n)
        self._h = profiles.h_profile(self.n)
        self.t_nodes = np.geomspace(_T_LO, _T_HI, nodes)
        self.g_integral_cache = self._tabulate_g()
        # G below the main table, one log-panel per e-fold down to the tail start
        self._low_nodes = np.geomspace(_TAIL_START, _T_LO, 256)
        low = _log_panels(_inv_g2, self._low_nodes[:-1], self._low_nodes[1:])
        self._low_cache = self._g_tail(_TAIL_START) + np.concatenate([[0.0], np.cumsum(low)])
        self.rho_nodes = np.geomspace(_T_LO, _R_HI, nodes)
        self.h_integral_cache = self._tabulate_h()

    # -- G
    @staticmethod
    def _g_tail(t):
        # int_0^t ds/g^2 for tiny t from g ~ sqrt(2t)(B - ln(2t)/pi)
        B = profiles.asymptotic_B()
        return math.pi**2 / (2.0 * (math.pi * B - math.log(2.0 * t)))

    @classmethod
    def _g_small(cls, t):
        """G(t) for t <= first node, from a 1e-60 start with the asymptotic tail."""
        if t <= _TAIL_START:
            return cls._g_tail(t)
        edges = np.geomspace(_TAIL_START, t, max(2, int(math.log(t / _TAIL_START)) + 2))
        return cls._g_tail(_TAIL_START) + float(np.sum(_log_panels(_inv_g2, edges[:-1], edges[1:])))

    def _tabulate_g(self):
        nodes = self.t_nodes
        pieces = _log_panels(_inv_g2, nodes[:-1], nodes[1:])
        return self._g_small(nodes[0]) + np.concatenate([[0.0], np.cumsum(pieces)])

    def g_integral(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(~(t > 0)):
            raise DomainError("t must be positive")
        flat = np.atleast_1d(t).ravel()
        out = np.empty_like(flat)
        nodes, cache = self.t_nodes, self.g_integral_cache
        mid = (flat >= nodes[0]) & (flat <= nodes[-1])
        if mid.any():
            tm = flat[mid]
            i = np.clip(np.searchsorted(nodes, tm, side="right") - 1, 0, len(nodes) - 1)
            lo = nodes[i]
            part = np.where(tm > lo, _log_panels(_inv_g2, lo, np.maximum(tm, lo)), 0.0)
            out[mid] = cache[i] + part
        low = (flat < nodes[0]) & (flat > _TAIL_START)
        if low.any():
            tl, ln = flat[low], self._low_nodes
            i = np.clip(np.searchsorted(ln, tl, side="right") - 1, 0, len(ln) - 2)
            part = np.where(tl > ln[i], _log_panels(_inv_g2, ln[i], np.maximum(tl, ln[i])), 0.0)
            out[low] = self._low_cache[i] + part
        for k in np.flatnonzero(flat <= _TAIL_START):
            out[k] = self._g_tail(flat[k])
        big = flat > nodes[-1]
        if big.any():
            # 1/g^2 - 1 = O(e^{-2t}) is below double precision past the last node
            out[big] = cache[-1] + (flat[big] - nodes[-1])
        return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)

    # -- H
    def _inv_h2(self, r):
        return 1.0 / self._h.value(r) ** 2

    def _h_direct(self, rho):
        # integrand ~ r^{n-3}: smooth enough for a few Gauss panels from 0
        edges = np.linspace(0.0, rho, 5)
        return float(np.sum(fixed_gauss(self._inv_h2, edges[:-1], edges[1:], _GL_ORDER)))

    def _tabulate_h(self):
        nodes = self.rho_nodes
        if self.n == 3:
            return nodes.copy()
        pieces = _log_panels(self._inv_h2, nodes[:-1], nodes[1:])
        return self._h_direct(nodes[0]) + np.concatenate([[0.0], np.cumsum(pieces)])

    def h_integral(self, rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(~(rho > 0)):
            raise DomainError("rho must be positive")
        if self.n == 3:
            return float(rho) if rho.ndim == 0 else rho.copy()
        flat = np.atleast_1d(rho).ravel()
        out = np.empty_like(flat)
        nodes, cache = self.rho_nodes, self.h_integral_cache
        mid = (flat >= nodes[0]) & (flat <= nodes[-1])
        if mid.any():
            rm = flat[mid]
            i = np.clip(np.searchsorted(nodes, rm, side="right") - 1, 0, len(nodes) - 1)
            lo = nodes[i]
            part = np.where(rm > lo, _log_panels(self._inv_h2, lo, np.maximum(rm, lo)), 0.0)
            out[mid] = cache[i] + part
        for k in np.flatnonzero(flat < nodes[0]):
            out[k] = self._h_direct(flat[k])
        big = flat > nodes[-1]
        if big.any():
            out[big] = cache[-1] + (flat[big] - nodes[-1])
        return float(out[0]) if rho.ndim == 0 else out.reshape(rho.shape)

    # -- inversion
    def _invert(self, target, table, nodes, forward, slope_inv, hi_limit):
        """Solve forward(x) = target on the tabulated monotone map (vectorized Newton)."""
        target = np.atleast_1d(np.asarray(target, dtype=float))
        if np.any(target < table[0]):
            raise CacheRange("target below the first tabulated node")
        out = np.empty_like(target)
        beyond = target > table[-1]
        out[beyond] = nodes[-1] + (target[beyond] - table[-1])
        inside = ~beyond
        if inside.any():
            tg = target[inside]
            j = np.clip(np.searchsorted(table, tg, side="right") - 1, 0, len(nodes) - 2)
            lo, hi = nodes[j].copy(), nodes[j + 1].copy()
            w = (tg - table[j]) / (table[j + 1] - table[j])
            x = lo + w * (hi - lo)
            act = np.arange(len(x))  # only unconverged points are re-evaluated
            for _ in range(40):
                xa = x[act]
                fx = forward(xa) - tg[act]
                la = np.where(fx < 0, xa, lo[act])
                ha = np.where(fx > 0, xa, hi[act])
                x_new = xa - fx * slope_inv(xa)
                bad = (x_new <= la) | (x_new >= ha) | ~np.isfinite(x_new)
                x_new = np.where(bad, 0.5 * (la + ha), x_new)
                done = np.abs(x_new - xa) <= 1e-15 * np.maximum(1.0, np.abs(xa))
                x[act], lo[act], hi[act] = x_new, la, ha
                act = act[~done]
                if not len(act):
                    break
            out[inside] = x
        return out

    def rho_of_t(self, t):
        t = np.asarray(t, dtype=float)
        G = self.g_integral(t)
        if self.n == 3:
            return G
        res = self._invert(
            G, self.h_integral_cache, self.rho_nodes, self.h_integral, lambda r: self._h.value(r) ** 2, _R_HI
        )
        return float(res[0]) if t.ndim == 0 else res.reshape(t.shape)

    def rho_of_t_scalar(self, t: float) -> float:
        """Same as rho_of_t, through a bracketed root finder (slower, used as a cross-check)."""
        G = self.g_integral(t)
        if self.n == 3:
            return G
        if G > self.h_integral_cache[-1]:
            return self.rho_nodes[-1] + (G - self.h_integral_cache[-1])
        j = int(np.searchsorted(self.h_integral_cache, G, side="right")) - 1
        j = min(max(j, 0), len(self.rho_nodes) - 2)
        lo, hi = self.rho_nodes[j], self.rho_nodes[j + 1]
        br = RootBracket(lo, hi, -1, 1)
        return find_root(lambda r: self.h_integral(r) - G, br, tol=1e-14)

    def t_of_rho(self, rho):
        rho = np.asarray(rho, dtype=float)
        H = np.atleast_1d(self.h_integral(rho)).ravel()
        res = np.empty_like(H)
        small = H < self.g_integral_cache[0]
        if (~small).any():
            res[~small] = self._invert(
                H[~small], self.g_integral_cache, self.t_nodes, self.g_integral, lambda s: profiles.g_eval(s) ** 2, _T_HI
            )
        for k in np.flatnonzero(small):
            res[k] = self._t_below_nodes(H[k])
        return float(res[0]) if rho.ndim == 0 else res.reshape(rho.shape)

    def _t_below_nodes(self, target: float) -> float:
        # invert the tail formula, then Newton in ln t (G' = 1/g^2)
        B = profiles.asymptotic_B()
        log_t = math.pi * B - math.pi**2 / (2.0 * target) - math.log(2.0)
        for _ in range(60):
            t = math.exp(log_t)
            step = (self._g_small(t) - target) * profiles.g_eval(t) ** 2 / t
            log_t -= step
            if abs(step) < 1e-15 * max(1.0, abs(log_t)):
                break
        return math.exp(log_t)

    def y_weight(self, t):
        t = np.asarray(t, dtype=float)
        rho = self.rho_of_t(t)
        g2 = profiles.g_eval(t) ** 2
        h2 = self._h.value(rho) ** 2
        # sinh t / sinh rho without overflow
        ratio = np.exp(t - rho) * np.expm1(-2.0 * t) / np.expm1(-2.0 * rho)
        return (self.n - 2) * h2 * ratio / g2


@lru_cache(maxsize=None)
def rho_map(n: int) -> RhoMap:
    return RhoMap(n)


def rho_of_t(map_: RhoMap, t):
    return map_.rho_of_t(t)


def y_weight(map_: RhoMap, t):
    return map_.y_weight(t)


def default_threshold_grid(points: int = 10_000) -> np.ndarray:
    return np.geomspace(1e-8, 50.0, points)


def threshold_search(n: int, grid=None, resolution: float = 1e-4) -> float:
    """Largest alpha in (0, e) with Y(t) >= X(alpha tanh(t/2)) on the grid.

    Grid-empirical and non-certified.  On each grid point the condition
    reads alpha <= exp(1 - 1/Y(t)) / tanh(t/2), so the supremum over the
    grid is a minimum; the result is rounded down to ``resolution``.
    """
    grid = default_threshold_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.min() > 1e-8 * (1 + 1e-12) or grid.max() < 50.0 * (1 - 1e-12):
        raise DomainError("threshold grid must span [1e-8, 50]")
    Y = rho_map(n).y_weight(grid)
    if np.any(~(Y > 0)):
        raise NoPositiveAlpha("Y is not positive on the grid")
    bound = np.exp(1.0 - 1.0 / Y) / np.tanh(grid / 2)
    sup = min(float(bound.min()), math.e)
    alpha = round(math.floor(sup / resolution) * resolution, 12)
    if alpha >= math.e:
        alpha -= resolution
    if not alpha > 0:
        raise NoPositiveAlpha(f"no positive alpha at resolution {resolution} (grid sup {sup!r})")
    return alpha


def yx_margin(n: int, alpha: float, grid) -> np.ndarray:
    """Y(t) - X(alpha tanh(t/2)) on the grid."""
    grid = np.asarray(grid, dtype=float)
    return rho_map(n).y_weight(grid) - x_raw(alpha * np.tanh(grid / 2))
