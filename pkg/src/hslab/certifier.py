"""Grid certification of the pointwise inequalities behind the main proofs.

Each registered case evaluates LHS - RHS on an initial grid (in mapped
coordinates, so that degenerate endpoints are resolved), then repeatedly
halves the spacing around the smallest margins.  This is empirical
evidence, not a proof: no directed rounding is used.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import hyp2f1 as hg
from . import mappings, profiles
from .errors import DomainError, MarginViolation
from .numerics import QuadratureSpec, Transform, integrate

__all__ = [
    "ZERO_TOL",
    "InequalityCase",
    "CertReport",
    "catalog",
    "case_names",
    "get_case",
    "certify",
    "certify_all",
    "heat_kernel_q_inverse",
    "heat_kernel_closed_form",
    "newton_kernel",
    "gef_radius",
    "make_gef_case",
]

ZERO_TOL = 1e-12
INITIAL_POINTS = 10_000
_KEEP = 10  # minima refined per round


# ---------------------------------------------------------------- coordinate maps
# every 1-D domain is parametrized by u in [0, 1]


def _linear(lo, hi):
    return lambda u: lo + (hi - lo) * u


def _log(lo, hi):
    return lambda u: lo * (hi / lo) ** u


def _two_sided(lo, hi, depth=1e-9):
    # logistic: clusters points at both ends, reaching ~depth of the width
    L = math.log((1 - depth) / depth)
    return lambda u: lo + (hi - lo) / (1.0 + np.exp(-L * (2 * u - 1)))


def _toward_zero_from_left(depth=1e-9):
    # u -> -depth^u maps [0, 1] onto [-1, -depth]
    return lambda u: -np.exp(math.log(depth) * u)


@dataclass(frozen=True)
class InequalityCase:
    name: str
    parameter_set: tuple  # tuple of dicts
    domain: tuple  # ((lo, hi), ...) in original coordinates, for reporting
    lhs_minus_rhs: object  # callable(points, **params) -> margins
    refinement_depth: int = 6
    coord_map: object = None  # u in [0,1]^d -> points
    dim: int = 1
    extra_points: tuple = ()  # original-coordinate points always evaluated
    notes: tuple = ()


@dataclass(frozen=True)
class CertReport:
    case: str
    grid_size: int
    min_margin: float
    witness: dict
    passed: bool
    refinements: int
    history: tuple = ()
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "grid_size": self.grid_size,
            "min_margin": self.min_margin,
            "witness": self.witness,
            "passed": self.passed,
            "refinements": self.refinements,
            "history": list(self.history),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- margin functions


def _log_ratio(t):
    return np.log1p(t) - np.log1p(-t)


def _m_log_2t(t):
    return _log_ratio(t) - 2 * t


def _m_bracket(t, n):
    L = _log_ratio(t)
    a = (1 - t * t) / 2
    brace = a * a + n / (n - 2) * t**4 + 2 * n / (n - 2) * a * t * t
    return L * L * brace - t * t


def _m_sandwich(r, n, theta):
    bw = mappings.BetaWeight(theta, mappings.r_power_euclid(n, theta))
    lo, hi = bw.sandwich_margins(r)
    return np.minimum(lo, hi)


def _t_of_r(r, theta, R):
    """t(r) = 1 + int_r^1 ds / (s (R^theta - s^theta)^2), closed form."""
    a = R**theta
    rho = np.asarray(r, dtype=float) ** theta

    def prim(u):
        return (np.log(u / (a - u)) + a / (a - u)) / (theta * a * a)

    return 1.0 + prim(1.0) - prim(rho)


def _m_xatz(r, n, theta):
    R = mappings.r_power_euclid(n, theta)
    t = _t_of_r(r, theta, R)
    return (R**theta - r**theta) ** 2 * (n - 2) * t - 1.0


def _m_q_lower(r, n, gamma, theta):
    R = mappings.r_power(n, gamma, theta)
    t = _t_of_r(r, theta, R)
    return (R**theta - r**theta) ** 4 - 1.0 / ((n - 2 * gamma) ** 2 * t * t)


def _sinh_ratio(t, rho):
    # sinh t / sinh rho without overflow
    return np.exp(t - rho) * np.expm1(-2.0 * t) / np.expm1(-2.0 * rho)


def _m_gh(t, n):
    # both sides blow up like t^-2 at 0; compared as LHS/RHS - 1
    rm = mappings.rho_map(n)
    rho = rm.rho_of_t(t)
    g = profiles.g_eval(t)
    h = profiles.h_eval(n, rho)
    return (g / h) ** 4 / _sinh_ratio(t, rho) ** 2 - 1.0


def _m_par(t, n):
    rho = mappings.rho_map(n).rho_of_t(t)
    return t / rho - _sinh_ratio(t, rho)


@lru_cache(maxsize=None)
def _alpha_hat(n):
    return mappings.threshold_search(n)


def _m_yx(t, n):
    return mappings.yx_margin(n, _alpha_hat(n), t)


def _m_com(w, n):
    return (n - 1) / 4 - hg.log_deriv_q(n, w)


def _m_aux1(xi):
    F = hg.f21(hg.F_PARAMS, xi)
    return (1 - xi) * F * F - 1.0


def _m_aux2(xi):
    F = hg.f21(hg.F_PARAMS, xi)
    return 1.0 - (1 - xi * xi) * F * F


def _m_B(_):
    B = profiles.asymptotic_B()
    return np.full(np.shape(_), min(B - (1 - 1 / math.pi), 1 - B))


def _m_x_vs_sinh(rho, n):
    c = ((n - 2) / 2) ** 2
    # 1/sinh^2 - 1/rho^2 loses everything to cancellation at small rho; use the series there
    small = rho < 1e-3
    r2 = rho * rho
    diff_series = -1.0 / 3 + r2 / 15 - 2 * r2 * r2 / 189
    with np.errstate(over="ignore"):
        diff = np.where(small, diff_series, 1.0 / np.sinh(np.where(small, 1.0, rho)) ** 2 - 1.0 / r2)
    return c * diff + n * (n - 2) / 4


# gef lives on (s, u) = (|x - e_n|, |x + e_n|); u-coords (a, b) in [0,1]^2
GEF_SAMPLES = 1_000_000


def gef_radius(n: int, gamma: float, rule: str = "stated") -> float:
    """Cap radius: 1/(n sqrt(75 R)) as stated, or 1/(n^2 sqrt(75 R)) as the derivation needs."""
    R = mappings.r_power(n, gamma, 0.5)
    if rule == "stated":
        return mappings.r_n_gamma(n, gamma)
    if rule == "n_squared":
        return 1.0 / (n * n * math.sqrt(75.0 * R))
    raise DomainError(f"unknown radius rule {rule!r}")


def _gef_map(n, gamma, rule="stated"):
    r = gef_radius(n, gamma, rule)

    def cmap(uv):
        uv = np.asarray(uv, dtype=float)
        s = r * np.exp(math.log(1e-9) * (1 - uv[..., 0]))  # s in [1e-9 r, r]
        lo = np.sqrt(4 - s * s)  # exterior-ball constraint |x| >= 1
        return np.stack([s, lo + (2 + s - lo) * uv[..., 1]], axis=-1)

    return cmap


def _m_gef(pts, n, gamma, rule="stated"):
    # s^{1/2} >= (n^2/4) (R r)^{1/2} u^{5/2} (1 - 4/u^2): the form equivalent to the
    # Hardy-term comparison it comes from (the commonly quoted version drops the 1/4)
    R = mappings.r_power(n, gamma, 0.5)
    r = gef_radius(n, gamma, rule)
    s, u = pts[..., 0], pts[..., 1]
    return np.sqrt(s) - 0.25 * n * n * math.sqrt(R * r) * u**2.5 * (1 - 4 / (u * u))


def _gef_sampler(n, gamma, rule="stated", seed=20240601):
    r = gef_radius(n, gamma, rule)

    def sample(count):
        # rejection over the bipolar box (s, u) in (0, r] x [2 - r, 2 + r]
        rng = np.random.Generator(np.random.Philox(seed))
        out = []
        have = 0
        while have < count:
            s = r * rng.random(count)
            u = 2 - r + 2 * r * rng.random(count)
            ok = (u >= np.sqrt(4 - s * s)) & (u <= 2 + s) & (s > 0)
            out.append(np.stack([s[ok], u[ok]], axis=-1))
            have += int(ok.sum())
        pts = np.concatenate(out)[:count]
        # back to the unit-square coordinates used for refinement
        a = 1 - np.log(pts[:, 0] / r) / math.log(1e-9)
        lo = np.sqrt(4 - pts[:, 0] ** 2)
        b = (pts[:, 1] - lo) / (2 + pts[:, 0] - lo)
        return np.clip(np.stack([a, b], axis=-1), 0.0, 1.0)

    return sample


# ---------------------------------------------------------------- catalog


def _params(**grid):
    keys = list(grid)
    return tuple(dict(zip(keys, vals)) for vals in product(*(grid[k] for k in keys)))


@lru_cache(maxsize=None)
def catalog() -> dict:
    cases = [
        InequalityCase("log_2t", ({},), ((0.0, 1.0),), lambda t: _m_log_2t(t), coord_map=_two_sided(0.0, 1.0)),
        InequalityCase(
            "bracket_thm31",
            _params(n=range(3, 9)),
            ((0.0, 1.0),),
            _m_bracket,
            coord_map=_two_sided(0.0, 1.0),
        ),
        InequalityCase(
            "sandwich",
            _params(n=(3, 4, 5), theta=(0.5,)),
            ((0.0, 1.0),),
            _m_sandwich,
            coord_map=_two_sided(0.0, 1.0),
        ),
        InequalityCase(
            "xatz",
            _params(n=(3, 4, 5, 6), theta=(0.5, 1.0, 1.5)),
            ((0.0, 1.0),),
            _m_xatz,
            coord_map=_two_sided(0.0, 1.0),
            notes=("margin -> 0 as r -> 1 (t = 1 endpoint)",),
        ),
        InequalityCase(
            "Q_lower",
            _params(n=(3, 4, 5), gamma=(0.0, 0.5, 1.0), theta=(0.5, 1.0)),
            ((0.0, 1.0),),
            _m_q_lower,
            coord_map=_two_sided(0.0, 1.0),
            notes=("parametrized by r in (0,1); t(r) from the substitution, t >= 1",),
        ),
        InequalityCase(
            "gh",
            _params(n=(3, 4, 5)),
            ((1e-6, 30.0),),
            _m_gh,
            coord_map=_log(1e-6, 30.0),
            notes=("margin reported as LHS/RHS - 1",),
        ),
        InequalityCase("par", _params(n=(3, 4, 5)), ((1e-6, 30.0),), _m_par, coord_map=_log(1e-6, 30.0)),
        InequalityCase(
            "yx",
            _params(n=(3, 4, 5)),
            ((1e-8, 50.0),),
            _m_yx,
            coord_map=_log(1e-8, 50.0),
            notes=("non-certified: alpha is the grid-empirical threshold, internal consistency only",),
        ),
        InequalityCase(
            "com",
            _params(n=range(4, 9)),
            ((-1.0, 0.0),),
            _m_com,
            coord_map=_toward_zero_from_left(),
            extra_points=(-1.0, 0.0),
        ),
        InequalityCase("asympt_aux1", ({},), ((-1.0, 0.0),), _m_aux1, coord_map=_toward_zero_from_left()),
        InequalityCase("asympt_aux2", ({},), ((-1.0, 0.0),), _m_aux2, coord_map=_toward_zero_from_left()),
        InequalityCase(
            "B_bracket",
            ({},),
            ((0.0, 0.0),),
            _m_B,
            refinement_depth=0,
            coord_map=lambda u: u,
            notes=("single number: min(B - (1 - 1/pi), 1 - B)",),
        ),
        InequalityCase(
            "gef",
            _params(n=(3, 4, 5), gamma=(0.0, 0.5, 1.0)),
            ((0.0, None), (None, None)),
            _m_gef,
            dim=2,
            notes=(
                "(s, u) = (|x - e_n|, |x + e_n|) with s <= r_{n,gamma} and |x| >= 1",
                "factor 1/4 restored from the preceding comparison",
            ),
        ),
        InequalityCase(
            "x_vs_sinh",
            _params(n=range(3, 9)),
            ((0.0, 30.0),),
            _m_x_vs_sinh,
            coord_map=_log(1e-8, 30.0),
        ),
    ]
    return {c.name: c for c in cases}


def make_gef_case(n_values, gamma_values=(0.0,), rule: str = "stated") -> InequalityCase:
    """The gef case for other dimensions or cap-radius rules."""
    base = catalog()["gef"]
    return InequalityCase(
        "gef", _params(n=tuple(n_values), gamma=tuple(gamma_values), rule=(rule,)), base.domain, _m_gef, dim=2, notes=base.notes
    )


def case_names() -> list:
    return sorted(catalog())


def get_case(name: str) -> InequalityCase:
    try:
        return catalog()[name]
    except KeyError:
        raise DomainError(f"unknown certification case {name!r}") from None


# ---------------------------------------------------------------- certification


def _refine_1d(u_all, m_all, depth):
    """New u-points halving the gaps next to the smallest margins."""
    order = np.argsort(u_all)
    u = u_all[order]
    m = m_all[order]
    worst = np.argsort(m, kind="stable")[:_KEEP]
    new = []
    for i in worst:
        if i > 0:
            new.append(0.5 * (u[i - 1] + u[i]))
        if i < len(u) - 1:
            new.append(0.5 * (u[i] + u[i + 1]))
    return np.unique(np.array(new)) if new else np.empty(0)


def _refine_2d(u_all, m_all, spacing):
    worst = np.argsort(m_all, kind="stable")[:_KEEP]
    offs = np.array([[dx, dy] for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy], dtype=float)
    new = (u_all[worst][:, None, :] + spacing * offs[None, :, :]).reshape(-1, 2)
    return np.clip(new, 0.0, 1.0)


def _run_params(case: InequalityCase, params: dict, initial: int):
    f = lambda pts: np.asarray(case.lhs_minus_rhs(pts, **params), dtype=float)  # noqa: E731
    if case.name == "B_bracket":
        pts = np.zeros(1)
        m = f(pts)
        return pts, m, [float(m.min())]
    if case.dim == 1:
        u = np.linspace(0.0, 1.0, initial)
        cmap = case.coord_map
        pts = cmap(u)
        ok = np.isfinite(pts)
        if case.extra_points:
            extra = np.asarray(case.extra_points, dtype=float)
        else:
            extra = np.empty(0)
        # drop endpoints that fall on an open boundary
        lo, hi = case.domain[0]
        keep = ok & (pts > lo) & (pts < hi)
        u, pts = u[keep], pts[keep]
        m = f(pts)
        if extra.size:
            m_extra = f(extra)
        else:
            m_extra = np.empty(0)
        history = [float(min(m.min(), m_extra.min() if m_extra.size else np.inf))]
        for _ in range(case.refinement_depth):
            new_u = _refine_1d(u, m, 0)
            new_u = np.setdiff1d(new_u, u)
            new_pts = cmap(new_u)
            keep = (new_pts > lo) & (new_pts < hi)
            new_u, new_pts = new_u[keep], new_pts[keep]
            if new_u.size:
                u = np.concatenate([u, new_u])
                pts = np.concatenate([pts, new_pts])
                m = np.concatenate([m, f(new_pts)])
            history.append(float(min(m.min(), m_extra.min() if m_extra.size else np.inf)))
        all_pts = np.concatenate([pts, extra])
        all_m = np.concatenate([m, m_extra])
        return all_pts, all_m, history
    # two-dimensional
    cmap = _gef_map(**params)
    sampler = _gef_sampler(**params)
    side = int(math.sqrt(initial))
    g = (np.arange(side) + 0.5) / side
    grid_u = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    u = np.concatenate([grid_u, sampler(GEF_SAMPLES)])
    pts = cmap(u)
    m = f(pts)
    history = [float(m.min())]
    spacing = 0.5 / side
    for _ in range(case.refinement_depth):
        new_u = _refine_2d(u, m, spacing)
        u = np.concatenate([u, new_u])
        new_pts = cmap(new_u)
        pts = np.concatenate([pts, new_pts])
        m = np.concatenate([m, f(new_pts)])
        spacing *= 0.5
        history.append(float(m.min()))
    return pts, m, history


def certify(case: InequalityCase | str, strict: bool = True, initial_points: int = INITIAL_POINTS) -> CertReport:
    """Minimum margin of a catalog case after adaptive refinement.

    ``strict`` raises MarginViolation (carrying the witness) when the
    minimum falls below -ZERO_TOL; otherwise the failing report is returned.
    """
    if isinstance(case, str):
        case = get_case(case)
    best = (math.inf, None, None)
    total = 0
    histories = []
    for params in case.parameter_set:
        pts, m, hist = _run_params(case, params, initial_points)
        if np.any(np.isnan(m)):
            k = int(np.flatnonzero(np.isnan(m))[0])
            raise MarginViolation(case.name, float("nan"), {"point": np.asarray(pts[k]).tolist(), **params})
        total += len(m)
        histories.append(hist)
        k = int(np.argmin(m))
        if m[k] < best[0]:
            best = (float(m[k]), np.asarray(pts[k]).tolist(), params)
    # history across parameter sets: running global minimum per refinement level
    depth = max(len(h) for h in histories)
    hist = tuple(float(min(h[min(i, len(h) - 1)] for h in histories)) for i in range(depth))
    margin, point, params = best
    witness = {"point": point, **{k: (float(v) if isinstance(v, float) else v) for k, v in params.items()}}
    passed = bool(margin >= -ZERO_TOL)
    report = CertReport(case.name, total, margin, witness, passed, case.refinement_depth, hist, case.notes)
    if strict and not passed:
        raise MarginViolation(case.name, margin, witness)
    return report


def _worker_count() -> int:
    from .variational.montecarlo import worker_count

    return worker_count()


def certify_all(names=None, strict: bool = False) -> list:
    names = case_names() if names is None else sorted(names)
    workers = min(_worker_count(), len(names))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda nm: certify(nm, strict=strict), names))
    else:
        reports = [certify(nm, strict=strict) for nm in names]
    return sorted(reports, key=lambda r: r.case)


# ---------------------------------------------------------------- heat kernel (n = 3)

_KERNEL_QUAD = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-11, max_subdivisions=400)


def _phi_integral(z: float) -> float:
    """int_0^{2pi} exp(z (cos phi - 1)) dphi by the periodic trapezoid rule."""
    m = int(64 + 40 * math.sqrt(max(z, 0.0)))
    phi = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
    return float(np.sum(np.exp(z * (np.cos(phi) - 1.0))) * (2 * math.pi / m))


def _check_half_space(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (3,) or y.shape != (3,):
        raise DomainError("points must have three coordinates")
    if x[2] <= 0 or y[2] <= 0:
        raise DomainError("points must lie in the open upper half-space")
    if np.allclose(x, y, rtol=0, atol=0):
        raise DomainError("x and y must differ")
    return x, y


def heat_kernel_q_inverse(x, y, quad: QuadratureSpec = _KERNEL_QUAD) -> float:
    """Q^{-1}(x, y) = int_0^inf G(x' - y', x_3, y_3, t) dt.

    With s = 1/t the time integral becomes
    (4 pi)^{-2} sqrt(x3 y3) int_0^inf exp(-|x - y|^2 s / 4) Phi(x3 y3 s / 2) ds,
    Phi(z) = int_0^{2 pi} exp(z (cos phi - 1)) dphi, both by quadrature.
    """
    x, y = _check_half_space(x, y)
    d2 = float(np.sum((x - y) ** 2))
    b = x[2] * y[2]

    scale = 4.0 / d2  # s = scale * sigma makes the exponential factor e^{-sigma}

    def integrand(sigma):
        return math.exp(-sigma) * _phi_integral(b * scale * sigma / 2.0)

    plain = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions)
    tail = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions, Transform.EXP_RIGHT)
    val = scale * (integrate(integrand, 0.0, 1.0, plain) + integrate(integrand, 1.0, math.inf, tail))
    return math.sqrt(b) * val / (4 * math.pi) ** 2


def heat_kernel_closed_form(x, y) -> float:
    """Closed form sqrt(x3 y3) / (2 pi sqrt(A^2 - B^2)), A = |x'-y'|^2 + x3^2 + y3^2, B = 2 x3 y3."""
    x, y = _check_half_space(x, y)
    lat = float(np.sum((x[:2] - y[:2]) ** 2))
    d2 = lat + (x[2] - y[2]) ** 2
    s2 = lat + (x[2] + y[2]) ** 2
    return math.sqrt(x[2] * y[2]) / (2 * math.pi * math.sqrt(d2 * s2))


def newton_kernel(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 1.0 / (4 * math.pi * float(np.linalg.norm(x - y)))
