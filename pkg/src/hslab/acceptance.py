"""The acceptance criteria as callable checks.

Criteria 1-11 are independent numerical checks; criterion 12 (byte-identical
output of the ``all`` command) is checked by running the CLI twice and is
kept separate because it wraps the others.  Every result is plain data so
it serializes deterministically; wall-clock figures are reduced to pass/fail
flags for the same reason.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import certifier, mappings, profiles
from .hyp2f1 import F_PARAMS, f21, f21_deriv
from .sharp_constants import radial_quotient_interior, s_3p_identify, s_n, s_np
from .variational import (
    T_MAX,
    McQuotientSpec,
    RadialGrid,
    ReducedFunctional,
    hyperbolic_consistency,
    mc_quotient_two_point,
    minimize_reduced,
    rain111_consistency,
)

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_criteria", "heat_kernel_pairs"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    provenance: str
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "provenance": self.provenance,
            "details": self.details,
        }


def _rel(a, b):
    return abs(a / b - 1.0)


def c1_closed_forms(seed: int = 42) -> CriterionResult:
    exact = 3 * (math.pi / 2) ** (4 / 3)
    errs = {"s_np(3,6)": _rel(s_np(3, 6.0), exact), "s_n(3)": _rel(s_n(3), exact)}
    crit = {f"n={n}": _rel(s_np(n, 2 * n / (n - 2)), s_n(n)) for n in range(3, 9)}
    ok = max(errs.values()) <= 1e-12 and max(crit.values()) <= 1e-10
    return CriterionResult(1, "closed-form constants", ok, "paper", {"exact": exact, **errs, **crit})


def c2_identify(seed: int = 42) -> CriterionResult:
    ps = np.linspace(2.0, 6.0, 51)[1:]
    worst = max(_rel(s_3p_identify(float(p)), s_np(3, float(p))) for p in ps)
    return CriterionResult(2, "three-dimensional identification", worst <= 1e-12, "paper", {"max_rel_err": worst, "count": 50})


def c3_minimizer(seed: int = 42) -> CriterionResult:
    errs = {f"({n},{p})": _rel(radial_quotient_interior(n, p), s_np(n, p)) for n, p in ((3, 4.0), (3, 6.0), (4, 3.0), (5, 2.5))}
    return CriterionResult(3, "minimizer attains the constant", max(errs.values()) <= 1e-6, "paper", errs)


def c4_two_point(seed: int = 42) -> CriterionResult:
    det = {}
    ok = True
    for p in (4.0, 6.0):
        start = time.perf_counter()
        est = mc_quotient_two_point(3, p, McQuotientSpec(sample_count=10_000_000, seed=seed))
        fast = time.perf_counter() - start < 60.0
        target = s_np(3, p)
        rel = _rel(est.estimate, target)
        good = rel <= 0.01 and fast
        ok = ok and good
        det[f"p={p:g}"] = {
            "estimate": est.estimate,
            "target": target,
            "rel_err": rel,
            "std_error": est.std_error,
            "z": (est.estimate - target) / est.std_error,
            "under_60s": fast,
        }
    return CriterionResult(4, "two-point minimizer quotient (Monte Carlo)", ok, "derived", det)


def c5_profiles(seed: int = 42) -> CriterionResult:
    det = {"g_residual": profiles.ode_residual("g"), "g_oracle": profiles.oracle_ode_check("g")}
    seams = [profiles.g_profile().seam_mismatch()]
    for n in range(3, 9):
        det[f"h{n}_residual"] = profiles.ode_residual("h", n)
        det[f"h{n}_oracle"] = profiles.oracle_ode_check("h", n)
        if n >= 4:
            seams.append(profiles.h_profile(n).seam_mismatch())
    det["seam_max"] = max(max(s) for s in seams)
    c2 = profiles.g_profile().c2_star
    det["c2_star_err"] = abs(c2 + 1 / math.pi)
    F, dF = f21(F_PARAMS, -1.0), f21_deriv(F_PARAMS, -1.0)
    det["c2_star_identity"] = abs(F * (4 * dF - F) + 1 / math.pi)
    c2s = {n: profiles.matching_constants(n)[1] for n in range(4, 9)}
    det["c2_sharp_min_abs"] = min(abs(v) for v in c2s.values())
    ok = (
        max(v for k, v in det.items() if k.endswith("_residual")) <= 1e-6
        and max(v for k, v in det.items() if k.endswith("_oracle")) <= 1e-7
        and det["seam_max"] <= 1e-10
        and det["c2_star_err"] <= 1e-10
        and det["c2_star_identity"] <= 1e-10
        and det["c2_sharp_min_abs"] > 1e-10
    )
    return CriterionResult(5, "profile correctness", ok, "derived", det)


def c6_asymptotics(seed: int = 42) -> CriterionResult:
    B = profiles.asymptotic_B()
    ts = (1e-3, 1e-4, 1e-5, 1e-6)
    g_err = [abs(profiles.g_eval(t) / profiles.g_asymptotic(t) - 1.0) for t in ts]
    det = {"B": B, "g_err": dict(zip(map(str, ts), g_err))}
    ok = 1 - 1 / math.pi < B < 1 and g_err[2] < 1e-3 and all(a > b for a, b in zip(g_err, g_err[1:]))
    for n in (4, 5, 6):
        errs = [profiles.h_asymptotic_check(n, t) for t in (1e-2, 1e-3, 1e-4)]
        det[f"h{n}_err"] = errs
        ok = ok and all(a >= 5 * b for a, b in zip(errs, errs[1:]))
    return CriterionResult(6, "small-t asymptotics", bool(ok), "paper", det)


def c7_y_limit(seed: int = 42) -> CriterionResult:
    det = {}
    ok = True
    for n in (3, 4, 5):
        rm = mappings.rho_map(n)
        e4 = abs(-rm.y_weight(1e-4) * math.log(1e-4) - 1)
        e8 = abs(-rm.y_weight(1e-8) * math.log(1e-8) - 1)
        det[f"n={n}"] = {"t=1e-4": float(e4), "t=1e-8": float(e8)}
        ok = ok and math.isfinite(e4) and math.isfinite(e8) and e8 < e4
    return CriterionResult(7, "limit of -Y(t) ln t", bool(ok), "paper", det)


def c8_certifier(seed: int = 42) -> CriterionResult:
    reports = certifier.certify_all(strict=False)
    det = {r.case: {"min_margin": r.min_margin, "passed": r.passed, "witness": r.witness} for r in reports}
    ok = len(reports) == 14 and all(r.passed for r in reports)
    return CriterionResult(8, "certifier catalog (14 cases)", ok, "derived", det)


def c9_upper_bounds(seed: int = 42) -> CriterionResult:
    det = {}
    ok = True
    for n, p in ((3, 4.0), (4, 3.0)):
        func = ReducedFunctional("rain111", n, p)
        ests = []
        for N in (512, 1024, 2048):
            res = minimize_reduced(func, RadialGrid.log(func.t_min(), T_MAX, N))
            ests.append(res.estimate)
        target = func.target()
        gap = ests[-1] / target - 1
        mono = all(b <= a + 1e-12 for a, b in zip(ests, ests[1:]))
        above = all(e >= target - 1e-9 for e in ests)
        det[f"({n},{p:g})"] = {"estimates": ests, "target": target, "gap_2048": gap, "monotone": mono}
        ok = ok and mono and above and gap <= 0.02
    return CriterionResult(9, "variational upper bounds", ok, "derived", det)


def heat_kernel_pairs(seed: int = 42, count: int = 100):
    rng = np.random.Generator(np.random.Philox(seed))
    pts = []
    for _ in range(count):
        x = np.r_[rng.uniform(-2, 2, 2), rng.uniform(0.05, 4.0)]
        y = np.r_[rng.uniform(-2, 2, 2), rng.uniform(0.05, 4.0)]
        pts.append((x, y))
    return pts


def c10_heat_kernel(seed: int = 42) -> CriterionResult:
    ratios = [
        certifier.heat_kernel_q_inverse(x, y) / certifier.newton_kernel(x, y) for x, y in heat_kernel_pairs(seed)
    ]
    worst = max(ratios)
    return CriterionResult(
        10, "heat-kernel comparison", worst <= 1 + 1e-6 and min(ratios) > 0, "paper", {"max_ratio": worst, "min_ratio": min(ratios)}
    )


def c11_change_of_variables(seed: int = 42) -> CriterionResult:
    det = {}
    for n, p in ((3, 4.0), (4, 3.0), (5, 2.5)):
        det[f"rain111 ({n},{p:g})"] = rain111_consistency(n, p).max_relative_spread
    for n, p in ((3, 4.0), (4, 3.0), (5, 3.0)):
        det[f"hyperbolic ({n},{p:g})"] = hyperbolic_consistency(n, p).max_relative_spread
    return CriterionResult(11, "change-of-variables consistency", max(det.values()) <= 1e-6, "derived", det)


CRITERIA = {
    1: c1_closed_forms,
    2: c2_identify,
    3: c3_minimizer,
    4: c4_two_point,
    5: c5_profiles,
    6: c6_asymptotics,
    7: c7_y_limit,
    8: c8_certifier,
    9: c9_upper_bounds,
    10: c10_heat_kernel,
    11: c11_change_of_variables,
}


def run_criterion(number: int, seed: int = 42) -> CriterionResult:
    try:
        return CRITERIA[number](seed)
    except KeyError:
        raise ValueError(f"no criterion {number}") from None


def run_criteria(numbers=None, seed: int = 42) -> list:
    numbers = sorted(CRITERIA) if numbers is None else sorted(numbers)
    return [run_criterion(k, seed) for k in numbers]
