import math

import numpy as np
import pytest
from scipy import integrate

from hyperlorentz.errors import PreconditionError
from hyperlorentz.geometry import SpaceParams, phi
from hyperlorentz.kernels import apply_T, log_quadrature, majorant_slope, majorant_v
from hyperlorentz.profiles import lorentz_integral, maximal, power_profile, step_profile


def quad_majorant(f2, space, t0, kinks=(2.0,)):
    """Oracle: int_{t0}^inf f**(s) phi(s)^2/(n sigma)^2 ds/s by quad in log s."""
    n = space.n

    def g(s):
        t = math.exp(s)
        return float(f2(t) * (phi(space, t) / (n * space.sigma_n)) ** 2)

    nodes = sorted({math.log(t0), *(math.log(k) for k in kinks if k > t0), 10.0, 40.0, 120.0, 700.0})
    pieces = list(zip(nodes[:-1], nodes[1:]))
    total = sum(integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0] for a, b in pieces)
    return total + float(f2(math.exp(700.0))) / (n - 1) ** 2


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_majorant_matches_quadrature(n):
    space = SpaceParams(n)
    f2 = maximal(step_profile([1.0], [2.0]))
    v = majorant_v(f2, space)
    # the breakpoint t = 2 is a node: exact up to rounding
    assert v(2.0) == pytest.approx(quad_majorant(f2, space, 2.0), rel=1e-13)
    # between nodes the cubic Hermite error is a few 1e-10 at 96 nodes per decade
    for t0 in (0.5, 30.0, 31.7):
        assert v(t0) == pytest.approx(quad_majorant(f2, space, t0), rel=1e-9)


def test_majorant_slope_is_exact_derivative():
    space = SpaceParams(3)
    f2 = maximal(step_profile([2.0, 1.0], [1.0, 3.0]))
    v = majorant_v(f2, space)
    t = np.array([0.3, 1.7, 10.0])
    h = 1e-5 * t
    fd = (v(t + h) - v(t - h)) / (2 * h)
    assert np.allclose(fd, majorant_slope(f2, space, t), rtol=1e-6)


def test_majorant_nonincreasing_and_positive():
    space = SpaceParams(3)
    v = majorant_v(maximal(step_profile([3.0, 1.0, 0.5], [0.1, 1.0, 7.0])), space)
    t = np.geomspace(1e-12, 1e12, 3000)
    vals = v(t)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) <= 1e-15 * vals[:-1])


def test_power_law_decay_of_majorant():
    # f = t^{-1/2}: v(t) ~ t^{-1/2} at large t since phi is nearly constant there
    space = SpaceParams(3)
    v = majorant_v(maximal(power_profile(1.0, -0.5)), space)
    t = np.array([1e8, 1e9])
    slope = np.diff(np.log(v(t))) / np.diff(np.log(t))
    assert slope[0] == pytest.approx(-0.5, abs=1e-6)


def test_T_is_positively_homogeneous():
    space = SpaceParams(3)
    f = step_profile([3.0, 1.0, 0.5], [0.1, 1.0, 7.0])
    a, b = apply_T(f, space), apply_T(f.scaled(2.5), space)
    t = np.geomspace(1e-5, 1e5, 50)
    assert np.allclose(b(t), 2.5 * a(t), rtol=1e-13)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p,q", [(2.0, 2.0), (3.0, 2.0)])
def test_T_norm_bound(n, p, q):
    v = step_profile([3.0, 1.0, 0.5], [0.1, 1.0, 7.0])
    lhs = lorentz_integral(apply_T(v, SpaceParams(n)), p, q)
    bound = (p * p / (p - 1) / (n - 1) ** 2) ** q * lorentz_integral(v, p, q)
    assert lhs <= bound * (1 + 1e-8)


def test_T_requires_nonincreasing():
    up = step_profile([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(PreconditionError):
        apply_T(up, SpaceParams(3))


def test_log_quadrature_power_laws():
    # pure power laws outside the node range are extended exactly
    s = np.linspace(math.log(1e-3), math.log(1e3), 401)
    val = log_quadrature(lambda t: np.minimum(t, t**-2.0), s)
    assert val == pytest.approx(1.5, rel=1e-13)
    assert math.isinf(log_quadrature(lambda t: 1.0 / t, s))
