"""Reduced 1-D functionals, change-of-variables consistency and Monte Carlo quotients."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hslab.errors import DomainError, NonConvergence
from hslab.sharp_constants import s_np
from hslab.variational import (
    KINDS,
    T_MAX,
    McQuotientSpec,
    RadialGrid,
    ReducedFunctional,
    hyperbolic_consistency,
    mc_quotient_two_point,
    minim_profile_t,
    minimize_reduced,
    quotient_of_profile,
    rain111_consistency,
)
from hslab.variational.montecarlo import ProductBump, ZeroFunction, smoke_test_inequality
from hslab.variational.transport import bump


def _grid(func, N):
    return RadialGrid.log(func.t_min(), T_MAX, N)


# ---------------------------------------------------------------- grids and functionals


def test_grid_contract_and_nesting():
    with pytest.raises(DomainError):
        RadialGrid.log(1e-6, 1e6, 32)
    with pytest.raises(DomainError):
        RadialGrid(np.r_[1.0, np.linspace(0.5, 2.0, 100)])
    g = RadialGrid.log(1e-6, 1e6, 64)
    fine = g.refine()
    assert fine.intervals == 128 and np.all(fine.nodes[::2] == g.nodes)


@pytest.mark.parametrize("kind", KINDS)
def test_weights_positive(kind):
    func = ReducedFunctional(kind, 4, 3.0)
    t = _grid(func, 256).nodes[1:-1]
    a, b = func.a(t), func.b(t)
    # sinh^{-(p+2)/2} underflows to 0 far out in the hyperbolic kinds
    assert np.all(a > 0) and np.all(b >= 0) and np.all(b[t < 200] > 0)
    assert func.scale() > 0


def test_functional_contract():
    with pytest.raises(DomainError):
        ReducedFunctional("bogus", 3, 4.0)
    with pytest.raises(DomainError):
        ReducedFunctional("rain111", 3, 7.0)
    with pytest.raises(DomainError):
        ReducedFunctional("cp", 3, 4.0, {"theta": 0.5})


# ---------------------------------------------------------------- minimization


@pytest.mark.parametrize("n,p", [(3, 4.0), (4, 3.0)])
def test_rain111_upper_bound(n, p):
    """[DERIVED] within 2% above (n-2)^{-(p+2)/p} S_{n,p} at N = 2048."""
    func = ReducedFunctional("rain111", n, p)
    res = minimize_reduced(func, _grid(func, 2048))
    target = (n - 2) ** (-(p + 2) / p) * s_np(n, p)
    assert res.target == pytest.approx(target, rel=1e-15)
    assert target - 1e-9 <= res.estimate <= 1.02 * target
    assert res.converged


def test_refinement_monotone():
    """[TRIVIAL] nested trial spaces give non-increasing estimates."""
    func = ReducedFunctional("rain111", 3, 4.0)
    g = _grid(func, 256)
    ests = []
    for _ in range(3):
        ests.append(minimize_reduced(func, g).estimate)
        g = g.refine()
    assert all(b <= a + 1e-12 for a, b in zip(ests, ests[1:]))


@pytest.mark.parametrize(
    "kind,n,p,params",
    [("cp", 3, 4.0, {"theta": 0.25}), ("cp", 4, 3.0, {"theta": 0.0}), ("hyperbolic_rho", 3, 4.0, {}), ("eq116", 3, 5.0, {})],
)
def test_other_targets_are_lower_bounds(kind, n, p, params):
    """[PAPER] every estimate sits above its closed-form infimum."""
    func = ReducedFunctional(kind, n, p, params)
    res = minimize_reduced(func, _grid(func, 1024))
    assert res.target is not None
    assert res.estimate >= res.target - 1e-9
    assert res.relative_gap < 0.05


def test_hyperbolic_higher_n_reports_nonconvergence():
    """[DERIVED] for n >= 4 the hyperbolic infimum is not attained; iteration drifts and says so."""
    func = ReducedFunctional("hyperbolic_rho", 4, 3.0)
    with pytest.raises(NonConvergence):
        minimize_reduced(func, _grid(func, 256), max_iter=300)


# ---------------------------------------------------------------- quotient of a profile


def test_minimizer_image_reproduces_radial_quotient():
    """[DERIVED] two independent computations of the same number."""
    for n, p in ((3, 4.0), (4, 3.0), (5, 2.5)):
        assert rain111_consistency(n, p).max_relative_spread <= 1e-6


@given(lam=st.floats(0.05, 20.0))
def test_minimizer_scale_invariance(lam):
    """[TRIVIAL] the t-space minimizer family v(t/lam) gives the same quotient."""
    assert rain111_consistency(3, 4.0, lam).max_relative_spread <= 1e-6


def test_bump_above_minimum_and_homogeneous():
    """[TRIVIAL] any admissible profile is above the infimum; amplitude does not matter."""
    func = ReducedFunctional("rain111", 3, 4.0)
    w, dw = bump(0.01, 100.0)
    q1 = quotient_of_profile(func, w, derivative=dw, support=(0.01, 100.0))
    q3 = quotient_of_profile(func, lambda s: 3 * w(s), derivative=lambda s: 3 * dw(s), support=(0.01, 100.0))
    assert q3 == pytest.approx(q1, rel=1e-10)
    assert q1 >= minimize_reduced(func, _grid(func, 1024)).estimate


@pytest.mark.parametrize("n,p", [(3, 4.0), (4, 3.0), (5, 3.0), (6, 2.5)])
def test_hyperbolic_presentations_agree(n, p):
    """[DERIVED] direct, rho-form, t-form with Hardy/Poincare terms and Y-form for one trial function."""
    rep = hyperbolic_consistency(n, p)
    assert set(rep.values) == {"direct_polar", "hyperbolic_rho", "t_form_hardy", "y_form"}
    assert rep.max_relative_spread <= 1e-6


def test_minim_profile_limits():
    v, dv = minim_profile_t(3, 4.0)
    assert v(1e-12) < 1e-5 and abs(v(1e12) - 1) < 1e-5 and dv(1.0) > 0


# ---------------------------------------------------------------- Monte Carlo


def test_mc_spec_contract():
    with pytest.raises(DomainError):
        McQuotientSpec(sample_count=100)
    with pytest.raises(DomainError):
        McQuotientSpec(region="moon")
    with pytest.raises(DomainError):
        mc_quotient_two_point(4, 3.0, McQuotientSpec(sample_count=10_000))


@pytest.mark.parametrize("p", [4.0, 6.0])
def test_mc_two_point_quotient(p):
    """[DERIVED] MC quotient of the two-point minimizer within 5 standard errors of S_{3,p} at 10^6 samples."""
    est = mc_quotient_two_point(3, p, McQuotientSpec(sample_count=1_000_000, seed=3))
    assert abs(est.estimate - s_np(3, p)) <= 5 * est.std_error
    assert est.std_error < 0.01 * est.estimate


def test_mc_rate():
    """[TRIVIAL] doubling the sample count shrinks the standard error by about 1/sqrt 2 (five seeds)."""
    ratios = []
    for seed in range(5):
        a = mc_quotient_two_point(3, 4.0, McQuotientSpec(sample_count=200_000, seed=seed)).std_error
        b = mc_quotient_two_point(3, 4.0, McQuotientSpec(sample_count=400_000, seed=seed)).std_error
        ratios.append(b / a)
    assert abs(np.mean(ratios) - 1 / math.sqrt(2)) < 0.1


def test_mc_deterministic_across_thread_counts(monkeypatch):
    """[TRIVIAL] chunk streams are merged in order, so the worker count does not matter."""
    spec = McQuotientSpec(sample_count=300_000, seed=11)
    monkeypatch.setenv("HSLAB_THREADS", "1")
    a = mc_quotient_two_point(3, 4.0, spec)
    monkeypatch.setenv("HSLAB_THREADS", "3")
    b = mc_quotient_two_point(3, 4.0, spec)
    assert a == b


def test_smoke_half_space():
    """[DERIVED] half-space inequality holds for a product bump."""
    rep = smoke_test_inequality("half_space", p=4.0)
    assert rep.passed and rep.margins[0] > 3 * rep.std_errors[0] and not rep.heuristic


def test_smoke_exterior_ball():
    """[DERIVED] exterior-ball inequality holds for a bump inside the cap (constant flagged heuristic)."""
    rep = smoke_test_inequality("exterior_ball", p=4.0, gamma=0.0)
    assert rep.passed and rep.margins[0] > 0 and rep.heuristic


def test_smoke_zero_function():
    """[TRIVIAL] the zero function gives exactly zero."""
    rep = smoke_test_inequality("half_space", [ZeroFunction()])
    assert rep.margins == (0.0,) and rep.passed


def test_smoke_homogeneity():
    """[TRIVIAL] u -> lam u scales the margin by lam^2 on the same samples."""
    spec = McQuotientSpec(sample_count=50_000, seed=5)
    f1 = ProductBump((0.3, 0.2, 2.0), (0.5, 0.5, 0.5))
    f2 = ProductBump((0.3, 0.2, 2.0), (0.5, 0.5, 0.5), amplitude=2.5)
    m1 = smoke_test_inequality("half_space", [f1], spec).margins[0]
    m2 = smoke_test_inequality("half_space", [f2], spec).margins[0]
    assert m2 == pytest.approx(6.25 * m1, rel=1e-12)


def test_smoke_support_checked():
    with pytest.raises(DomainError):
        smoke_test_inequality("half_space", [ProductBump((0.0, 0.0, 0.2), (0.5, 0.5, 0.5))])
    with pytest.raises(DomainError):
        smoke_test_inequality("exterior_ball", [ProductBump((0.0, 0.0, 2.0), (0.5, 0.5, 0.5))])
    with pytest.raises(DomainError):
        smoke_test_inequality("nope")
