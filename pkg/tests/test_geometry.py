import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hyperlorentz.errors import DomainError
from hyperlorentz.geometry import (
    SpaceParams,
    ball_volume,
    eta,
    inverse_volume,
    log_ball_volume,
    log_sinh,
    log_sinh_F,
    phi,
    phi_limit,
    unit_ball_volume,
)


def quad_volume(n, rho):
    """Oracle: n sigma_n int_0^rho sinh^{n-1} by adaptive quadrature."""
    val, _ = integrate.quad(lambda s: math.sinh(s) ** (n - 1), 0.0, rho, epsabs=0.0, epsrel=1e-13, limit=200)
    return n * unit_ball_volume(n) * val


@pytest.mark.parametrize("n", range(1, 21))
def test_unit_ball_volume_closed_form(n):
    expected = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    assert unit_ball_volume(n) == pytest.approx(expected, rel=1e-14)


def test_space_params_rejects_bad_dimension():
    with pytest.raises(DomainError):
        SpaceParams(1)
    with pytest.raises(DomainError):
        SpaceParams(2.5)


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("rho", [1e-6, 1e-3, 0.05, 0.4, 1.0, 2.5, 7.0, 15.0])
def test_ball_volume_matches_quadrature(n, rho):
    assert ball_volume(SpaceParams(n), rho) == pytest.approx(quad_volume(n, rho), rel=1e-12)


def test_ball_volume_low_dimension_closed_forms():
    # cosh(r) - 1 written as 2 sinh^2(r/2) to avoid cancellation in the oracle
    rho = np.array([1e-4, 0.3, 1.0, 4.0, 20.0])
    assert np.allclose(ball_volume(SpaceParams(2), rho), 4 * math.pi * np.sinh(rho / 2) ** 2, rtol=1e-13, atol=0)
    rho = np.array([0.3, 1.0, 4.0, 20.0])
    assert np.allclose(ball_volume(SpaceParams(3), rho), math.pi * (np.sinh(2 * rho) - 2 * rho), rtol=1e-12, atol=0)


def test_log_ball_volume_large_radius_does_not_overflow():
    space = SpaceParams(10)
    lv = log_ball_volume(space, np.array([200.0, 500.0]))
    assert np.all(np.isfinite(lv))
    # leading behaviour: n sigma (e^{rho}/2)^{n-1}/(n-1)
    lead = space.log_nsigma + 9 * (np.array([200.0, 500.0]) - math.log(2)) - math.log(9)
    assert np.allclose(lv, lead, rtol=1e-14)


@pytest.mark.parametrize("n", range(2, 11))
def test_inverse_round_trip(n):
    space = SpaceParams(n)
    t = np.geomspace(1e-9, 1e9, 200)
    assert np.max(np.abs(ball_volume(space, inverse_volume(space, t)) - t) / t) <= 1e-11


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 12), logt=st.floats(-30, 40))
def test_inverse_round_trip_property(n, logt):
    space = SpaceParams(n)
    t = 10.0**logt
    assert ball_volume(space, inverse_volume(space, t)) == pytest.approx(t, rel=1e-11)


def test_inverse_domain():
    assert inverse_volume(SpaceParams(3), 0.0) == 0.0
    with pytest.raises(DomainError):
        inverse_volume(SpaceParams(3), np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        phi(SpaceParams(3), 0.0)


def test_log_sinh_matches_numpy_and_large_arguments():
    x = np.array([1e-8, 0.1, 1.0, 30.0])
    assert np.allclose(log_sinh(x), np.log(np.sinh(x)), rtol=1e-14)
    assert log_sinh(1000.0) == pytest.approx(1000.0 - math.log(2.0), rel=1e-15)


@pytest.mark.parametrize("n", range(2, 11))
def test_keyyeu_strict(n):
    space = SpaceParams(n)
    t = np.geomspace(1e-9, 1e9, 200)
    assert np.all(n * log_sinh_F(space, t) - np.log(t / space.sigma_n) > 0)


@pytest.mark.parametrize("n", range(2, 11))
def test_phi_increasing_and_bounded(n):
    space = SpaceParams(n)
    t = np.geomspace(1e-9, 1e9, 200)
    values = phi(space, t)
    assert np.all(np.diff(values) > 0)
    assert np.all(values < phi_limit(space))


@pytest.mark.parametrize("n", range(2, 7))
def test_phi_close_to_limit_in_low_dimension(n):
    space = SpaceParams(n)
    assert 0.999 <= phi(space, 1e10) / phi_limit(space) <= 1.0


@pytest.mark.parametrize("n", [2, 5, 10])
def test_phi_consistency_with_eta(n):
    space = SpaceParams(n)
    t = np.geomspace(1e-6, 1e6, 25)
    direct = t * np.exp(-(n - 1) * log_sinh_F(space, t))
    assert np.allclose(phi(space, t), direct, rtol=1e-13, atol=0)
    assert np.allclose(eta(space, inverse_volume(space, t)), phi(space, t) / (n * space.sigma_n), rtol=1e-12, atol=0)
