"""Gauss hypergeometric function on z <= 0."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hslab.errors import DomainError
from hslab.hyp2f1 import (
    F_PARAMS,
    Hyp2F1Params,
    f1_params,
    f2_params,
    f21,
    f21_deriv,
    f21_pfaff,
    f21_series,
    log_deriv_q,
)

TRIPLES = [F_PARAMS, f1_params(4), f1_params(5), f2_params(4), f2_params(6)]


def _agm(a, b):
    while abs(a - b) > 1e-16 * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


@pytest.mark.parametrize("params", TRIPLES)
def test_value_at_zero(params):
    """[TRIVIAL] series head."""
    assert f21(params, 0.0) == 1.0


def test_value_at_minus_one_agm_oracle():
    """[DERIVED] F(1/2,1/2;1;-1) = 1/AGM(1, sqrt 2) = Gamma(1/4)^2 / (2 sqrt2 pi^{3/2})."""
    oracle = 1.0 / _agm(1.0, math.sqrt(2.0))
    closed = math.gamma(0.25) ** 2 / (2 * math.sqrt(2) * math.pi**1.5)
    assert oracle == pytest.approx(closed, rel=1e-14)
    assert f21(F_PARAMS, -1.0) == pytest.approx(oracle, rel=1e-13)
    assert f21(F_PARAMS, -1.0) == pytest.approx(0.8346268, abs=1e-7)


def test_fifty_term_rational_series():
    """[DERIVED] (3/2, -1/2; 1; -1/2) against exact rational summation of 50 terms."""
    a, b, c, z = Fraction(3, 2), Fraction(-1, 2), Fraction(1), Fraction(-1, 2)
    term, total = Fraction(1), Fraction(1)
    for k in range(50):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    assert f21(Hyp2F1Params(1.5, -0.5, 1.0), -0.5) == pytest.approx(float(total), rel=1e-14)


def test_terminating_series():
    """[DERIVED] F(2,-1;1;z) = 1 - 2z, so F_2(-1) = 3 for n = 5."""
    assert f21(f2_params(5), -1.0) == pytest.approx(3.0, rel=1e-15)
    assert f21(f2_params(5), -7.5) == pytest.approx(16.0, rel=1e-15)


def test_derivative_head_and_c2_identity():
    """[TRIVIAL] F'(0) = ab/c; [PAPER] F(-1)(4F'(-1) - F(-1)) = -1/pi."""
    assert f21_deriv(F_PARAMS, 0.0) == pytest.approx(0.25)
    F, dF = f21(F_PARAMS, -1.0), f21_deriv(F_PARAMS, -1.0)
    assert abs(F * (4 * dF - F) + 1 / math.pi) < 1e-10


@pytest.mark.parametrize("params", TRIPLES)
def test_derivative_finite_difference(params):
    """[DERIVED] centered difference at z = -0.3."""
    h = 1e-5
    fd = (f21(params, -0.3 + h) - f21(params, -0.3 - h)) / (2 * h)
    assert abs(f21_deriv(params, -0.3) - fd) <= 1e-6


@pytest.mark.parametrize("params", TRIPLES)
def test_pfaff_agrees_with_series_random(params):
    """[DERIVED] 100 seeded z in (-1, 0): direct series against the Pfaff form."""
    z = np.random.default_rng(7).uniform(-1.0, 0.0, 100)
    assert np.allclose(f21_series(params, z), f21_pfaff(params, z), rtol=1e-12, atol=0)


@given(z=st.floats(-50.0, 0.0), idx=st.integers(0, len(TRIPLES) - 1))
def test_vector_and_scalar_agree(z, idx):
    """[TRIVIAL] the array path equals the scalar path."""
    p = TRIPLES[idx]
    assert f21(p, np.array([z]))[0] == pytest.approx(f21(p, z), rel=1e-14)


def test_F_positive_increasing():
    """[PAPER] F is positive and increasing on (-1, 0]."""
    z = np.linspace(-1.0, 0.0, 1000)
    v = f21(F_PARAMS, z)
    assert np.all(v > 0) and np.all(np.diff(v) > 0)


def test_log_deriv_q_head_and_slope():
    """[TRIVIAL] q(0) = (n-1)/4; [PAPER] q'(0) = (n-1)(3n+1)/(16n), 0.8 for n = 5."""
    for n in (4, 5, 7):
        assert log_deriv_q(n, 0.0) == pytest.approx((n - 1) / 4, rel=1e-14)
    h = 1e-5
    slope = (log_deriv_q(5, 0.0) - log_deriv_q(5, -h)) / h
    assert slope == pytest.approx(0.8, abs=1e-4)
    assert 4 * 16 / 80 == 0.8


@pytest.mark.parametrize("n", range(4, 11))
def test_log_deriv_q_bound(n):
    """[PAPER] q(w) < (n-1)/4 on [-1, 0)."""
    w = np.linspace(-1.0, 0.0, 10_001)[:-1]
    assert np.all(log_deriv_q(n, w) < (n - 1) / 4)
    if n == 4:
        assert log_deriv_q(4, -1.0) < 0.75


def test_domain_errors():
    with pytest.raises(DomainError):
        Hyp2F1Params(1.0, 1.0, -2.0)
    with pytest.raises(DomainError):
        f21(F_PARAMS, 0.1)
    with pytest.raises(DomainError):
        log_deriv_q(3, -0.5)
    with pytest.raises(DomainError):
        log_deriv_q(5, -1.5)
