"""Quadrature, root finding and the ODE oracle."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hslab.errors import BadBracket, DomainError, NonConvergence
from hslab.numerics import (
    OdeProblem,
    QuadratureSpec,
    RootBracket,
    Transform,
    find_root,
    fixed_gauss,
    integrate,
    integrate_ode,
)


def test_integrate_constant():
    """[TRIVIAL] constant integrand."""
    assert integrate(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_integrate_power_left_singularity():
    """[TRIVIAL] x^{-1/2} on (0,1) is 2."""
    spec = QuadratureSpec().with_transform(Transform.POWER_LEFT, -0.5)
    assert integrate(lambda x: x**-0.5, 0.0, 1.0, spec) == pytest.approx(2.0, rel=1e-12)


def test_integrate_log_antiderivative():
    """[DERIVED] int_t^1 ds/(s(s+1)) = ln((1+t)/(2t)) at t = 1/4."""
    val = integrate(lambda s: 1.0 / (s * (s + 1.0)), 0.25, 1.0)
    assert val == pytest.approx(math.log(2.5), rel=1e-12)


def test_integrate_semi_infinite():
    """[TRIVIAL] int_0^inf e^{-x} = 1 (exp_right) and int_1^inf x^{-2} = 1 (algebraic_right)."""
    exp_spec = QuadratureSpec().with_transform(Transform.EXP_RIGHT)
    alg_spec = QuadratureSpec().with_transform(Transform.ALGEBRAIC_RIGHT)
    assert integrate(lambda x: math.exp(-x), 0.0, math.inf, exp_spec) == pytest.approx(1.0, rel=1e-10)
    assert integrate(lambda x: x**-2, 1.0, math.inf, alg_spec) == pytest.approx(1.0, rel=1e-10)


def test_integrate_log_left():
    """[TRIVIAL] int_0^1 ln x dx = -1."""
    spec = QuadratureSpec().with_transform(Transform.LOG_LEFT)
    assert integrate(lambda x: math.log(x), 0.0, 1.0, spec) == pytest.approx(-1.0, rel=1e-10)


def test_integrate_contract_errors():
    with pytest.raises(DomainError):
        integrate(lambda x: 1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate(lambda x: 1.0, 0.0, math.inf)
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(NonConvergence):
        integrate(lambda x: math.sin(1e4 * x) ** 2 / x**0.99, 0.0, 1.0, QuadratureSpec(max_subdivisions=3))


@given(
    k=st.integers(0, 6),
    a=st.floats(-2.0, 2.0),
    width=st.floats(0.01, 3.0),
)
def test_integrate_monomials(k, a, width):
    """[TRIVIAL] polynomial antiderivative."""
    b = a + width
    exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert integrate(lambda x: x**k, a, b) == pytest.approx(exact, rel=1e-10, abs=1e-12)


def test_fixed_gauss_panels():
    """[TRIVIAL] 8-point Gauss is exact for degree 15 per panel."""
    lo = np.array([0.0, 1.0])
    hi = np.array([1.0, 3.0])
    got = fixed_gauss(lambda x: x**15, lo, hi)
    assert np.allclose(got, (hi**16 - lo**16) / 16, rtol=1e-13)


def test_find_root_examples():
    """[TRIVIAL] linear root, sqrt 2, and the identity map for n = 3 (h = 1)."""
    assert find_root(lambda x: x - 1, RootBracket.around(lambda x: x - 1, 0.0, 2.0)) == pytest.approx(1.0, abs=1e-12)
    f = lambda x: x * x - 2
    assert find_root(f, RootBracket.around(f, 1.0, 2.0), tol=1e-12) == pytest.approx(math.sqrt(2), abs=1e-12)
    g = lambda rho: integrate(lambda r: 1.0, 0.0, rho) - 0.7 if rho > 0 else -0.7
    assert find_root(g, RootBracket.around(g, 0.0, 2.0)) == pytest.approx(0.7, abs=1e-12)


def test_bad_brackets():
    with pytest.raises(BadBracket):
        RootBracket(1.0, 0.0, -1, 1)
    with pytest.raises(BadBracket):
        RootBracket(0.0, 1.0, 1, 1)
    with pytest.raises(BadBracket):
        RootBracket.around(lambda x: x * x + 1, -1.0, 1.0)


@given(c=st.floats(-5.0, 5.0), width=st.floats(0.1, 4.0))
def test_find_root_brackets_any_linear_root(c, width):
    """[TRIVIAL] the root of x - c inside any bracket containing it."""
    f = lambda x: x - c
    assert find_root(f, RootBracket.around(f, c - width, c + 2 * width)) == pytest.approx(c, abs=1e-11)


def test_ode_linear_motion():
    """[TRIVIAL] y' = v, v' = 0."""
    sol = integrate_ode(OdeProblem(lambda t, y: np.array([y[1], 0.0]), 0.0, 1.0, (0.0, 1.0)))
    assert np.allclose(sol(1.0), [1.0, 1.0], atol=1e-12)


def test_ode_exponential():
    """[TRIVIAL] y'' = y from (1, 1) gives e^t."""
    sol = integrate_ode(OdeProblem(lambda t, y: np.array([y[1], y[0]]), 0.0, 1.0, (1.0, 1.0), tol=1e-12))
    assert sol(1.0)[0] == pytest.approx(math.e, rel=1e-10)
    with pytest.raises(DomainError):
        sol(1.5)


def test_ode_contract():
    with pytest.raises(DomainError):
        OdeProblem(lambda t, y: y, 1.0, 1.0, (0.0, 0.0))
    with pytest.raises(DomainError):
        OdeProblem(lambda t, y: y, 0.0, 1.0, (0.0, 0.0), tol=0.0)
