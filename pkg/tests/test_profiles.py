import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hyperlorentz.errors import DomainError, PreconditionError
from hyperlorentz.profiles import (
    PowerSum,
    Profile,
    dump_profile,
    lorentz_integral,
    lorentz_quasinorm,
    maximal,
    parse_profile,
    power_profile,
    step_profile,
)


def quad_lorentz(profile, p, q, edges):
    """Oracle: int u^q t^{q/p-1} dt by adaptive quadrature between breakpoints."""
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(
            lambda t: float(profile(t)) ** q * t ** (q / p - 1), a, b, epsabs=0.0, epsrel=1e-12, limit=200
        )
        total += val
    return total


def test_indicator_closed_form():
    # ||1_[0,a)||_{p,q}^q = (p/q) a^{q/p}
    for a, p, q in [(1.0, 2.0, 2.0), (3.5, 1.5, 4.0), (0.2, 4.0, 1.0)]:
        u = step_profile([1.0], [a])
        assert lorentz_integral(u, p, q) == pytest.approx(p / q * a ** (q / p), rel=1e-14)
        assert lorentz_quasinorm(u, p, q) == pytest.approx((p / q) ** (1 / q) * a ** (1 / p), rel=1e-14)


def test_lorentz_exponent_domain():
    u = step_profile([1.0], [1.0])
    with pytest.raises(DomainError):
        lorentz_integral(u, 1.0, 2.0)
    with pytest.raises(DomainError):
        lorentz_integral(u, 2.0, 0.5)


def test_non_integrable_power_gives_inf():
    # t^{-1/2} has infinite L^{2,2} norm
    assert math.isinf(lorentz_integral(power_profile(1.0, -0.5), 2.0, 2.0))


def test_power_integral_exponent_near_zero_is_stable():
    # t^{-1/p} on [a, R): the integrand t^{-q/p} t^{q/p-1} = 1/t, so the answer is ln(R/a)
    for p, q in [(1.7, 2.5), (2.4378, 4.1234), (3.0, 1.0)]:
        seg = Profile((PowerSum(0.0, 2.0, (), ()), PowerSum(2.0, 5e4, (1.0,), (-1.0 / p,)), PowerSum(5e4, math.inf, (), ())))
        assert lorentz_integral(seg, p, q) == pytest.approx(math.log(2.5e4), rel=1e-13)


def test_step_profile_matches_quadrature():
    u = step_profile([3.0, 2.0, 0.5], [0.5, 1.5, 4.0])
    for p, q in [(2.0, 2.0), (3.0, 1.5), (1.5, 4.0)]:
        assert lorentz_integral(u, p, q) == pytest.approx(quad_lorentz(u, p, q, [0, 0.5, 1.5, 4.0]), rel=1e-11)


def test_maximal_of_step_is_running_average():
    u = step_profile([3.0, 1.0], [1.0, 2.0])
    t = np.array([0.5, 1.0, 1.5, 2.0, 10.0])
    expected = np.array([3.0, 3.0, (3.0 + 0.5) / 1.5, 4.0 / 2.0, 4.0 / 10.0])
    assert np.allclose(maximal(u)(t), expected, rtol=1e-14)


def test_maximal_rejects_non_integrable_head():
    with pytest.raises(PreconditionError):
        maximal(power_profile(1.0, -1.5))


def test_profile_contiguity_enforced():
    with pytest.raises(DomainError):
        Profile((PowerSum(0.0, 1.0, (1.0,), (0.0,)), PowerSum(1.5, math.inf, (), ())))


def test_serialisation_round_trip(tmp_path):
    u = maximal(step_profile([3.0, 2.0, 0.5], [0.5, 1.5, 4.0]))
    text = dump_profile(u)
    again = parse_profile(text)
    t = np.geomspace(1e-3, 1e3, 77)
    assert np.allclose(again(t), u(t), rtol=1e-14, atol=0)
    assert again.nonincreasing
    path = tmp_path / "u.txt"
    path.write_text("# comment\n0 1 const 2\n1 3 linear 3 -1\n3 inf const 0\n")
    from hyperlorentz.profiles import load_profile

    loaded = load_profile(str(path))
    assert loaded(np.array([0.5, 2.0, 5.0])).tolist() == [2.0, 1.0, 0.0]


def test_parse_rejects_garbage():
    with pytest.raises(DomainError):
        parse_profile("0 1 wiggle 3\n1 inf const 0\n")
    with pytest.raises(DomainError):
        parse_profile("0 1 const\n")


step_lists = st.lists(
    st.tuples(st.floats(0.05, 5.0), st.floats(0.01, 3.0)), min_size=1, max_size=20
)


def _profile(pairs):
    heights = sorted((h for h, _ in pairs), reverse=True)
    edges = np.cumsum([w for _, w in pairs]).tolist()
    return step_profile(heights, edges)


@settings(max_examples=60, deadline=None)
@given(pairs=step_lists, pq=st.sampled_from([(2.0, 2.0), (2.0, 3.0), (3.0, 2.0), (1.5, 4.0)]))
def test_hardy_maximal_property(pairs, pq):
    p, q = pq
    u = _profile(pairs)
    lhs = lorentz_quasinorm(u, p, q) * p / (p - 1)
    rhs = lorentz_quasinorm(maximal(u), p, q)
    assert rhs <= lhs * (1 + 1e-10)


@settings(max_examples=60, deadline=None)
@given(pairs=step_lists)
def test_maximal_dominates_and_is_nonincreasing(pairs):
    u = _profile(pairs)
    u2 = maximal(u)
    t = np.geomspace(1e-3, 200.0, 300)
    assert np.all(u2(t) >= u(t) * (1 - 1e-13))
    assert np.all(np.diff(u2(t)) <= 1e-13)
