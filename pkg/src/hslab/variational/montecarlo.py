"""Monte Carlo evaluation of three-dimensional Rayleigh quotients and inequality margins.

Samples are generated in fixed-size chunks; chunk ``i`` draws from its own
Philox stream keyed by ``(seed, i)`` and the per-chunk sums are merged in
chunk order, so results do not depend on how many workers ran the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import mappings
from ..errors import DomainError, InconclusiveMC, VarianceBlowup
from ..sharp_constants import s_np

__all__ = [
    "McQuotientSpec",
    "McEstimate",
    "ProductBump",
    "ZeroFunction",
    "McReport",
    "worker_count",
    "mc_quotient_two_point",
    "smoke_test_inequality",
    "default_test_function",
]

CHUNK = 1 << 17  # samples per chunk (pairs are split evenly)
E3 = np.array([0.0, 0.0, 1.0])


def worker_count() -> int:
    env = os.environ.get("HSLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class McQuotientSpec:
    n: int = 3
    sample_count: int = 10_000_000
    seed: int = 42
    region: str = "full_space"  # full_space, half_space, exterior_ball_cap
    cap_radius: float | None = None
    antithetic: bool = True

    def __post_init__(self):
        if self.sample_count < 10_000:
            raise DomainError("at least 10^4 samples are required")
        if self.region not in ("full_space", "half_space", "exterior_ball_cap"):
            raise DomainError(f"unknown region {self.region!r}")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    samples: int
    components: dict = field(default_factory=dict)


def _rng(seed: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def _chunks(total: int):
    sizes = []
    left = total
    while left > 0:
        c = min(CHUNK, left)
        c -= c % 2
        if c == 0:
            break
        sizes.append(c)
        left -= c
    return sizes


def _run_chunks(kernel, spec: McQuotientSpec, dim: int):
    """Run ``kernel(rng, pairs) -> (pairs, dim)`` values for every chunk; return all pair means."""
    sizes = _chunks(spec.sample_count)

    def job(i):
        return kernel(_rng(spec.seed, i), sizes[i] // 2)

    workers = min(worker_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    vals = np.concatenate(parts, axis=0)
    if vals.shape[1] != dim:
        raise AssertionError("kernel returned the wrong number of components")
    return vals


def _unit_vectors(rng, m):
    v = rng.standard_normal((m, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------- two-point quotient


def _two_point_parts(x, p):
    """(|grad u|^2, W |u|^p) for the two-point minimizer in R^3."""
    k = (p - 2) / 2
    m = 2 / (p - 2)
    xp = x + E3
    xm = x - E3
    rp = np.linalg.norm(xp, axis=-1)
    rm = np.linalg.norm(xm, axis=-1)
    A = rp**k + rm**k
    u = A ** (-m)
    coef = -m * k * A ** (-m - 1)
    grad = coef[..., None] * ((rp ** (k - 2))[..., None] * xp + (rm ** (k - 2))[..., None] * xm)
    g2 = np.sum(grad * grad, axis=-1)
    W = (rp * rm / 2) ** (p / 2 - 3)
    return g2, W * u**p


def _cloud_density(x):
    """Mixture of two radial clouds 1/(4 pi r^2 (1+r)^2) centred at +e3 and -e3."""
    out = 0.0
    for c in (E3, -E3):
        r = np.linalg.norm(x - c, axis=-1)
        out = out + 0.5 / (4 * math.pi * r * r * (1 + r) ** 2)
    return out


def mc_quotient_two_point(n: int = 3, p: float = 4.0, spec: McQuotientSpec | None = None) -> McEstimate:
    """Quotient int |grad u|^2 / (int W |u|^p)^{2/p} of the two-point minimizer.

    Importance sampling from the two-cloud mixture, antithetic pairs
    reflected through the chosen cloud centre; delta-method standard error.
    """
    if n != 3:
        raise DomainError("the Monte Carlo quotient is implemented for n = 3")
    if not 2 < p <= 6:
        raise DomainError("p must lie in (2, 6]")
    spec = spec or McQuotientSpec()

    def kernel(rng, pairs):
        centre = np.where(rng.random(pairs) < 0.5, 1.0, -1.0)[:, None] * E3
        u = rng.random(pairs)
        r = u / (1 - u)
        y = r[:, None] * _unit_vectors(rng, pairs)
        out = np.zeros((pairs, 2))
        for sign in (1.0, -1.0):
            x = centre + sign * y
            q = _cloud_density(x)
            g2, wu = _two_point_parts(x, p)
            out[:, 0] += 0.5 * g2 / q
            out[:, 1] += 0.5 * wu / q
        return out

    vals = _run_chunks(kernel, spec, 2)
    N, D = vals.mean(axis=0)
    Q = N / D ** (2 / p)
    infl = vals[:, 0] / N - (2 / p) * vals[:, 1] / D
    se = Q * infl.std(ddof=1) / math.sqrt(len(vals))
    if se > 0.05 * abs(Q):
        raise VarianceBlowup(f"standard error {se:.3g} exceeds 5% of {Q:.6g}")
    return McEstimate(float(Q), float(se), 2 * len(vals), {"numerator": float(N), "denominator": float(D)})


# ---------------------------------------------------------------- inequality smoke tests


@dataclass(frozen=True)
class ProductBump:
    """prod_i (1 - ((x_i - c_i)/w_i)^2)^3 on the box |x_i - c_i| < w_i (scaled by amplitude)."""

    center: tuple
    half_widths: tuple
    amplitude: float = 1.0

    def value_grad(self, x):
        c = np.asarray(self.center)
        w = np.asarray(self.half_widths)
        s = (x - c) / w
        inside = np.all(np.abs(s) < 1, axis=-1)
        f = np.clip(1 - s * s, 0.0, None)
        fac = f**3
        dfac = -6 * s * f * f / w
        val = self.amplitude * np.prod(fac, axis=-1)
        grad = np.empty_like(x)
        for i in range(x.shape[-1]):
            others = np.prod(np.delete(fac, i, axis=-1), axis=-1)
            grad[..., i] = self.amplitude * dfac[..., i] * others
        return np.where(inside, val, 0.0), np.where(inside[..., None], grad, 0.0)

    def box(self):
        c = np.asarray(self.center, dtype=float)
        w = np.asarray(self.half_widths, dtype=float)
        return c, w


@dataclass(frozen=True)
class ZeroFunction:
    center: tuple = (0.0, 0.0, 2.0)
    half_widths: tuple = (0.5, 0.5, 0.5)

    def value_grad(self, x):
        return np.zeros(x.shape[:-1]), np.zeros_like(x)

    def box(self):
        return np.asarray(self.center, dtype=float), np.asarray(self.half_widths, dtype=float)


@dataclass(frozen=True)
class McReport:
    name: str
    margins: tuple
    std_errors: tuple
    passed: bool
    heuristic: bool
    note: str = ""


def _inequality_setup(name: str, p: float, gamma: float):
    """Return (hardy, weight, constant, heuristic, note) for the named inequality (n = 3)."""
    n = 3
    if name == "half_space":
        e = p * (n - 2) / 2 - n

        def hardy(x):
            return 0.25 / x[..., 2] ** 2

        def weight(x):
            rp = np.linalg.norm(x + E3, axis=-1)
            rm = np.linalg.norm(x - E3, axis=-1)
            return (rp * rm / 2) ** e

        return hardy, weight, s_np(3, p), False, "constant S_bar_{3,p} = S_{3,p}"
    if name == "exterior_ball":
        from .reduced import RadialGrid, ReducedFunctional, minimize_reduced

        r = mappings.r_n_gamma(n, gamma)
        alpha_star = mappings.alpha_threshold_theta(n, gamma, 0.5) / (3 * r)
        e = p * (n - 2) / 2 - n
        func = ReducedFunctional("kal5", n, p, {"gamma": gamma})
        est = minimize_reduced(func, RadialGrid.log(func.t_min(), 1e6, 1024)).estimate
        # est bounds (n - 2 gamma)^{-(p+2)/p} S*, which is exactly the constant needed
        const = est

        def hardy(x):
            d = np.linalg.norm(x - E3, axis=-1)
            return n * n / 4 / d**2

        def weight(x):
            d = np.linalg.norm(x - E3, axis=-1)
            dp = np.linalg.norm(x + E3, axis=-1)
            return d**e * (dp / 2) ** e * mappings.x_raw(alpha_star * d) ** ((p + 2) / 2)

        return hardy, weight, const, True, "heuristic: constant replaced by upper bound"
    raise DomainError(f"unknown inequality {name!r}")


def default_test_function(name: str, gamma: float = 0.0):
    if name == "half_space":
        return ProductBump((0.3, 0.2, 2.0), (0.5, 0.5, 0.5))
    if name == "exterior_ball":
        r = mappings.r_n_gamma(3, gamma)
        return ProductBump((0.0, 0.0, 1.0 + r / 2), (r / 5, r / 5, r / 5))
    raise DomainError(f"unknown inequality {name!r}")


def _check_support(name, fn, gamma):
    c, w = fn.box()
    corners = c + w * np.array([[i, j, k] for i in (-1, 1) for j in (-1, 1) for k in (-1, 1)])
    if name == "half_space":
        ok = np.all(corners[:, 2] > 0)
    else:
        r = mappings.r_n_gamma(3, gamma)
        # the box must sit inside B_r(e3) and outside the closed unit ball
        ok = np.all(np.linalg.norm(corners - E3, axis=1) < r) and (c[2] - w[2]) > 1 + np.linalg.norm(w[:2])
    if not ok:
        raise DomainError(f"test function support leaves the region of {name}")


def smoke_test_inequality(
    name: str, test_functions=None, spec: McQuotientSpec | None = None, p: float = 4.0, gamma: float = 0.0
) -> McReport:
    """LHS - RHS of the named inequality for each test function, by Monte Carlo.

    Supported names: "half_space" (half-space form) and "exterior_ball" (translated
    exterior-ball form, gamma given).  Raises InconclusiveMC when a nonzero
    margin is within three standard errors of zero.
    """
    spec = spec or McQuotientSpec(sample_count=200_000)
    if test_functions is None:
        test_functions = [default_test_function(name, gamma)]
    hardy, weight, const, heuristic, note = _inequality_setup(name, p, gamma)
    margins, ses = [], []
    passed = True
    for j, fn in enumerate(test_functions):
        _check_support(name, fn, gamma)
        c, w = fn.box()
        vol = float(np.prod(2 * w))

        def kernel(rng, pairs, fn=fn, c=c, w=w):
            y = (2 * rng.random((pairs, 3)) - 1) * w
            out = np.zeros((pairs, 3))
            for sign in (1.0, -1.0):
                x = c + sign * y
                u, g = fn.value_grad(x)
                out[:, 0] += 0.5 * vol * np.sum(g * g, axis=-1)
                out[:, 1] += 0.5 * vol * hardy(x) * u * u
                out[:, 2] += 0.5 * vol * weight(x) * np.abs(u) ** p
            return out

        sub = McQuotientSpec(spec.n, spec.sample_count, spec.seed + j, spec.region)
        vals = _run_chunks(kernel, sub, 3)
        G, H, D = vals.mean(axis=0)
        margin = G - H - const * D ** (2 / p)
        if D > 0:
            infl = vals[:, 0] - vals[:, 1] - const * (2 / p) * D ** (2 / p - 1) * vals[:, 2]
        else:
            infl = vals[:, 0] - vals[:, 1]
        se = float(infl.std(ddof=1) / math.sqrt(len(vals)))
        if margin != 0.0 and abs(margin) < 3 * se:
            raise InconclusiveMC(f"{name}: margin {margin:.3g} within 3 SE ({se:.3g})")
        margins.append(float(margin))
        ses.append(se)
        passed = passed and bool(margin >= 0)
    return McReport(name, tuple(margins), tuple(ses), passed, heuristic, note)
