import math

import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from hyperlorentz.errors import DomainError, PreconditionError
from hyperlorentz.geometry import SpaceParams, ball_volume, inverse_volume
from hyperlorentz.profiles import lorentz_integral, step_profile
from hyperlorentz.radial import (
    RHO,
    RadialFunction,
    RadialPiece,
    bump,
    distribution,
    from_profile,
    grad_norm_radial,
    laplacian_radial,
    nabla_m_norm,
    plateau,
    rearrange,
    zero_function,
)


def fd_laplacian(u, r, n, h):
    """Central-difference oracle for u'' + (n-1) coth(r) u'."""
    d2 = (u(r + h) - 2 * u(r) + u(r - h)) / h**2
    d1 = (u(r + h) - u(r - h)) / (2 * h)
    return d2 + (n - 1) / np.tanh(r) * d1


@pytest.mark.parametrize("n", [2, 3, 5])
def test_laplacian_second_order_fd_convergence(n):
    u = bump(SpaceParams(n), 1.5, 4)
    lap = laplacian_radial(u)
    r = np.array([0.2, 0.6, 1.1])
    exact = lap(r)
    errs = [np.max(np.abs(fd_laplacian(u, r, n, h) - exact)) for h in (2e-2, 1e-2, 5e-3)]
    orders = [math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])]
    assert all(1.8 <= o <= 2.2 for o in orders), orders


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_laplacian_matches_ball_model(n):
    """Compare with the Laplace-Beltrami operator of the Poincare ball metric.

    With g = (2/(1-|x|^2))^2 |dx|^2 one has
    Delta_g U = ((1-r^2)/2)^2 Delta U + (n-2) (1-r^2)/2 r U'(r) for radial U,
    and the geodesic radius is rho = 2 artanh(r).
    """
    rho0, k = 1.2, 3
    r = sp.symbols("r", positive=True)
    U = (1 - (2 * sp.atanh(r) / sp.Rational(6, 5)) ** 2) ** k
    flat = sp.diff(U, r, 2) + (n - 1) / r * sp.diff(U, r)
    ball = ((1 - r**2) / 2) ** 2 * flat + (n - 2) * (1 - r**2) / 2 * r * sp.diff(U, r)
    ball_fn = sp.lambdify(r, ball, "mpmath")
    lap = laplacian_radial(bump(SpaceParams(n), rho0, k))
    for rho in (0.1, 0.4, 0.8, 1.1):
        expected = float(ball_fn(math.tanh(rho / 2)))
        assert lap(rho) == pytest.approx(expected, rel=1e-11, abs=1e-12)


def test_laplacian_smooth_at_origin():
    u = bump(SpaceParams(3), 1.0, 3)
    lap = laplacian_radial(u)
    # near 0: Delta u -> n u''(0) = 3 * (-6)
    vals = lap(np.array([0.0, 1e-8, 1e-4, 0.049, 0.051]))
    assert vals[0] == pytest.approx(-18.0, rel=1e-13)
    assert np.all(np.isfinite(vals))
    assert abs(vals[3] - vals[4]) < 0.05


def test_grad_norm_is_absolute_derivative():
    u = plateau(SpaceParams(3), 0.5, 1.5)
    g = grad_norm_radial(u)
    r = np.array([0.2, 0.7, 1.0, 1.4, 2.0])
    assert np.allclose(g(r), np.abs(u.derivative(r)), rtol=1e-13, atol=1e-15)


def test_nabla_m_norm_alternates():
    u = bump(SpaceParams(4), 1.0, 5)
    r = np.array([0.3, 0.6])
    assert np.allclose(nabla_m_norm(u, 2)(r), np.abs(laplacian_radial(u)(r)), rtol=1e-14)
    assert np.allclose(nabla_m_norm(u, 3)(r), np.abs(laplacian_radial(u).derivative(r)), rtol=1e-13)


def test_bump_needs_valid_parameters():
    with pytest.raises(DomainError):
        bump(SpaceParams(3), -1.0, 2)
    with pytest.raises(DomainError):
        plateau(SpaceParams(3), 2.0, 1.0)


def test_non_smooth_origin_rejected():
    space = SpaceParams(3)
    with pytest.raises(PreconditionError):
        from hyperlorentz.radial import _with_taylor

        _with_taylor(space, 0.0, 1.0, 1 - RHO)


def test_distribution_of_quadratic_bump_n2():
    # 1 - (rho/rho0)^2 > lam  <=>  rho < rho0 sqrt(1 - lam)
    space = SpaceParams(2)
    u = bump(space, 2.0, 1)
    lam = np.array([0.0, 0.1, 0.5, 0.9, 0.999])
    expected = 2 * math.pi * (np.cosh(2.0 * np.sqrt(1 - lam)) - 1)
    assert np.allclose(distribution(u, lam), expected, rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_rearrangement_of_monotone_function_is_composition(n):
    space = SpaceParams(n)
    u = bump(space, 1.0, 3)
    star = rearrange(u)
    t = np.geomspace(1e-6, 0.999 * float(ball_volume(space, 1.0)), 40)
    assert np.allclose(star(t), u(inverse_volume(space, t)), rtol=1e-12, atol=1e-14)


def test_rearrangement_preserves_lorentz_norm_direct_quadrature():
    space = SpaceParams(3)
    u = bump(space, 1.0, 3)
    lap = nabla_m_norm(u, 2)
    star = rearrange(lap)
    # for p = q the Lorentz integral is the plain L^p integral in polar coordinates
    direct, _ = integrate.quad(
        lambda r: float(lap(r)) ** 2 * 3 * space.sigma_n * math.sinh(r) ** 2, 0, 1, epsabs=0, epsrel=1e-12, limit=200
    )
    assert lorentz_integral(star, 2.0, 2.0) == pytest.approx(direct, rel=1e-10)


def test_rearranged_distribution_matches_dense_sampling():
    """Oracle: the measure of {|w| > lam} by a fine midpoint rule in rho."""
    space = SpaceParams(3)
    w = nabla_m_norm(plateau(space, 0.5, 1.5), 2)
    star = rearrange(w)
    edges = np.linspace(0.0, 1.5, 300_001)
    mid = 0.5 * (edges[1:] + edges[:-1])
    vol = np.diff(ball_volume(space, edges))
    vals = w(mid)
    for lam in (0.5, 2.0, 5.0):
        direct = vol[vals > lam].sum()
        # u*(t) > lam exactly for t < mu(lam)
        mu = distribution(w, lam)
        assert mu == pytest.approx(direct, rel=2e-4)
        assert star(0.999 * mu) > lam > star(1.001 * mu)


def test_zero_function_rearranges_to_zero():
    star = rearrange(zero_function(SpaceParams(4)))
    assert lorentz_integral(star, 2.0, 2.0) == 0.0


def test_from_profile_round_trip():
    space = SpaceParams(3)
    prof = step_profile([2.0], [1.0])  # not smooth, but composable: u(rho) = u*(V(rho))
    u = from_profile(space, prof, "file:step")
    r = np.array([0.1, 0.5, 0.6])
    assert np.allclose(u(r), prof(ball_volume(space, r)))


def test_radial_pieces_must_be_contiguous():
    with pytest.raises(DomainError):
        RadialFunction(SpaceParams(3), (RadialPiece(0.0, 1.0, sp.Integer(1)), RadialPiece(1.5, 2.0, sp.Integer(1))))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_rearrangement_equimeasurable(m):
    """|{u* > lam}| equals the distribution of |w| at sampled levels."""
    space = SpaceParams(4)
    w = nabla_m_norm(plateau(space, 0.4, 1.3), m) if m else plateau(space, 0.4, 1.3)
    star = rearrange(w)
    top = float(star(1e-12))
    levels = np.linspace(0.02, 0.98, 50) * top
    mu = distribution(w, levels)
    # u*(mu(lam)^-) >= lam >= u*(mu(lam)^+) brackets the level set
    assert np.all(star(mu * (1 - 1e-9)) >= levels * (1 - 1e-10))
    assert np.all(star(mu * (1 + 1e-9)) <= levels * (1 + 1e-10))
