"""Weights X and B, thresholds, the map rho(t) and the weight Y."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hslab import mappings, profiles
from hslab.errors import DomainError
from hslab.numerics import integrate


def test_x_weight_values():
    """[TRIVIAL] X(1) = 1, X(1/e) = 1/2, X(e^-9) = 1/10."""
    assert mappings.x_weight(1.0) == 1.0
    assert mappings.x_weight(math.exp(-1)) == pytest.approx(0.5, rel=1e-15)
    assert mappings.x_weight(math.exp(-9)) == pytest.approx(0.1, rel=1e-15)
    with pytest.raises(DomainError):
        mappings.x_weight(1.5)
    with pytest.raises(DomainError):
        mappings.x_raw(0.0)


@given(a=st.floats(1e-12, 1.0), b=st.floats(1e-12, 1.0))
def test_x_weight_monotone(a, b):
    """[TRIVIAL] X is increasing with values in (0, 1]."""
    lo, hi = sorted((a, b))
    xl, xh = mappings.x_weight(lo), mappings.x_weight(hi)
    assert 0 < xl <= xh <= 1


def test_beta_two_forms_agree():
    """[DERIVED] closed form of B against its integral form."""
    R = (1 + 1 / math.sqrt(3)) ** 2
    assert mappings.beta_weight(0.5, 0.5, R) == pytest.approx(mappings.beta_weight_integral(0.5, 0.5, R), rel=1e-10)


@given(r=st.floats(0.01, 1.0), theta=st.sampled_from([0.25, 0.5, 1.0, 1.5]))
def test_beta_forms_property(r, theta):
    """[DERIVED] the two forms of B agree across r and theta."""
    R = mappings.r_power_euclid(3, theta)
    assert mappings.beta_weight(r, theta, R) == pytest.approx(mappings.beta_weight_integral(r, theta, R), rel=1e-9)


def test_beta_endpoint():
    """[TRIVIAL] B(1) = 1/(R^theta - 1)^2."""
    R = mappings.r_power_euclid(3, 0.5)
    assert mappings.beta_weight(1.0, 0.5, R) == pytest.approx(1 / (R**0.5 - 1) ** 2, rel=1e-12)


def test_sandwich_point():
    """[PAPER] X(alpha r) <= B(r) <= X(beta r) at r = 0.3."""
    bw = mappings.BetaWeight(0.5, mappings.r_power_euclid(3, 0.5))
    lo, hi = bw.sandwich_margins(0.3)
    assert lo >= 0 and hi >= 0


@pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 1.5])
def test_sandwich_strict_interior(theta):
    """[PAPER] the sandwich holds strictly on a 10^4-point interior grid."""
    bw = mappings.BetaWeight(theta, mappings.r_power_euclid(3, theta))
    r = np.linspace(0, 1, 10_002)[1:-1]
    lo, hi = bw.sandwich_margins(r)
    assert np.all(lo > 0) and np.all(hi > 0)


def test_alpha_closed_example():
    """[DERIVED] n = 3, theta = 1: -ln alpha = 4 + ln 2, alpha = e^-4 / 2."""
    assert mappings.alpha_n_theta(3, 1.0) == pytest.approx(math.exp(-4) / 2, rel=1e-12)
    assert mappings.alpha_n_theta(3, 1.0) == pytest.approx(0.009158, abs=1e-6)


@pytest.mark.parametrize("n", [3, 4, 6])
@pytest.mark.parametrize("theta", [0.5, 1.0, 1.5])
def test_alpha_theta_specialization(n, theta):
    """[TRIVIAL] the ball threshold is the gamma = 1 case of the gamma family (see ledger)."""
    assert mappings.alpha_n_theta(n, theta) == mappings.alpha_threshold_theta(n, 1.0, theta)


def test_alpha_grid_below_one():
    """[PAPER] alpha_{n,gamma,theta} < 1 on a 3x3x3 grid."""
    for n in (3, 4, 5):
        for g in (0.0, 0.5, 1.0):
            for th in (0.5, 1.0, 1.5):
                assert 0 < mappings.alpha_threshold_theta(n, g, th) < 1


def test_thresholds_record():
    th = mappings.Thresholds(3, 0.0, 0.5).values
    assert set(th) == {"alpha_n", "alpha_n_theta", "alpha_n_gamma", "alpha_n_gamma_theta", "R_theta_gamma", "r_n_gamma"}
    assert th["alpha_n"] == 1.0
    assert th["alpha_n_gamma"] == pytest.approx(math.exp(2 / 3))
    with pytest.raises(DomainError):
        mappings.Thresholds(3, 1.5, 0.5)
    with pytest.raises(DomainError):
        mappings.r_power(3, 0.0, 2.0)


def test_rho_n3_is_G():
    """[TRIVIAL] h = 1 for n = 3, so rho(1) - rho(1/2) = int_{1/2}^1 ds/g^2 (independent quadrature)."""
    rm = mappings.rho_map(3)
    G = integrate(lambda s: 1.0 / profiles.g_eval(s) ** 2, 0.5, 1.0)
    assert rm.rho_of_t(1.0) - rm.rho_of_t(0.5) == pytest.approx(G, rel=1e-10)
    assert rm.rho_of_t(1.0) == pytest.approx(rm.g_integral(1.0), rel=1e-12)


def test_rho_exceeds_t():
    """[PAPER] rho > t for n = 4."""
    rm = mappings.rho_map(4)
    for t in (0.1, 1.0, 5.0):
        assert rm.rho_of_t(t) > t


def test_rho_minus_t_bounded():
    """[PAPER] rho - t increases to a finite limit on [5, 30] for n = 4."""
    rm = mappings.rho_map(4)
    t = np.linspace(5, 30, 26)
    d = rm.rho_of_t(t) - t
    inc = np.diff(d)
    assert np.all(inc >= -1e-12) and np.all(np.diff(inc) <= 1e-12) and d[-1] - d[-2] < 1e-8


@given(t=st.floats(1e-7, 40.0), n=st.sampled_from([3, 4, 5, 7]))
def test_rho_round_trip(t, n):
    """[TRIVIAL] t recovered from rho(t)."""
    rm = mappings.rho_map(n)
    assert abs(rm.t_of_rho(rm.rho_of_t(t)) - t) <= 1e-8 * max(1.0, t)


def test_y_n3_formula():
    """[TRIVIAL] Y = sinh t / (g^2 sinh rho) when n = 3."""
    rm = mappings.rho_map(3)
    t = np.array([0.01, 0.5, 2.0, 6.0])
    expect = np.sinh(t) / (profiles.g_eval(t) ** 2 * np.sinh(rm.rho_of_t(t)))
    assert np.allclose(rm.y_weight(t), expect, rtol=1e-13)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_y_log_limit(n):
    """[PAPER] -Y(t) ln t -> 1 as t -> 0."""
    rm = mappings.rho_map(n)
    e6 = abs(-rm.y_weight(1e-6) * math.log(1e-6) - 1)
    e3 = abs(-rm.y_weight(1e-3) * math.log(1e-3) - 1)
    assert e6 < 0.2 and e6 < e3


@pytest.mark.parametrize("n", [3, 4, 5])
def test_threshold_search(n):
    """[PAPER] alpha_hat > 0 with Y >= X(alpha_hat tanh(t/2)); [DERIVED] refined grid recheck; [TRIVIAL] halving alpha."""
    a = mappings.threshold_search(n)
    assert 0 < a < math.e
    fine = np.geomspace(1e-8, 50.0, 100_000)
    assert mappings.yx_margin(n, a, fine).min() >= 0
    assert mappings.yx_margin(n, a, np.geomspace(1e-6, 20, 2000)).min() >= 0
    grid = mappings.default_threshold_grid()
    assert mappings.yx_margin(n, a / 2, grid).min() > mappings.yx_margin(n, a, grid).min()


def test_domain():
    with pytest.raises(DomainError):
        mappings.rho_map(2)
    with pytest.raises(DomainError):
        mappings.rho_map(3).rho_of_t(-1.0)
    with pytest.raises(DomainError):
        mappings.threshold_search(3, np.geomspace(1e-3, 50, 100))
