import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperlorentz.constants import (
    ExponentSet,
    conjugate,
    lorentz_sobolev_constant_lq,
    poincare_constant,
    sobolev_constant,
    sobolev_constant_factors,
    sobolev_exponent,
)
from hyperlorentz.errors import DomainError, UnsupportedError
from hyperlorentz.geometry import unit_ball_volume


def test_order_two_cross_check():
    # C(n,2,2)^2 = (n-1)^4/16, exactly 1 at n = 3
    assert poincare_constant(3, 2, 2) ** 2 == (3 - 1) ** 4 / 16
    for n in range(2, 12):
        assert poincare_constant(n, 2, 2) ** 2 == pytest.approx((n - 1) ** 4 / 16, rel=1e-15)


def test_first_order_constant():
    assert poincare_constant(3, 1, 2) == 1.0
    assert poincare_constant(5, 1, 4) == pytest.approx(1.0)


@given(n=st.integers(2, 15), k=st.integers(1, 4), p=st.floats(1.01, 20.0))
def test_constant_factorises(n, k, p):
    c1, c2 = poincare_constant(n, 1, p), poincare_constant(n, 2, p)
    assert poincare_constant(n, 2 * k, p) == pytest.approx(c2**k, rel=1e-12)
    assert poincare_constant(n, 2 * k + 1, p) == pytest.approx(c1 * c2**k, rel=1e-12)


def test_conjugate_and_sobolev_exponent():
    assert conjugate(2.0) == 2.0
    assert conjugate(3.0) == 1.5
    assert sobolev_exponent(5, 2.0, 1) == pytest.approx(10 / 3)
    assert sobolev_exponent(5, 2.0, 0) == 2.0
    with pytest.raises(DomainError):
        sobolev_exponent(4, 2.0, 2)
    with pytest.raises(DomainError):
        conjugate(1.0)


def test_exponent_set_validity():
    assert ExponentSet(5, 2, 2, 3).sobolev_valid
    assert ExponentSet(4, 3, 2, 2).poincare_valid
    assert not ExponentSet(4, 3, 2, 3).poincare_valid
    ex = ExponentSet(7, 3, 2, 2)
    assert not ex.sobolev_valid
    assert any("2n/(n-1)" in issue for issue in ex.sobolev_issues())
    assert "q > p with m odd" in ExponentSet(4, 1, 2, 8 / 3).sobolev_issues()
    with pytest.raises(DomainError):
        ExponentSet(3, 0, 2, 2)
    with pytest.raises(DomainError):
        ExponentSet(3, 1, 2, 0.5)
    with pytest.raises(DomainError):
        ExponentSet(3, 1, math.inf, 2)


def test_sobolev_constant_values():
    # m = 2, p = 2, n = 5: one factor n(n - 2p)/(p p') = 5/4
    assert sobolev_constant_factors(5, 2, 2) == [pytest.approx(1.25)]
    assert sobolev_constant(5, 2, 2) == pytest.approx(unit_ball_volume(5) ** 0.4 * 1.25, rel=1e-14)
    # (5, 3, 1.5): p_1* = 15/7
    r = 15 / 7
    expected = unit_ball_volume(5) ** 0.6 * (3.5 / 1.5) * 5 * (5 - 2 * r) / (r * r / (r - 1))
    assert sobolev_constant(5, 3, 1.5) == pytest.approx(expected, rel=1e-13)
    # m = 1: (n - p)/p
    assert sobolev_constant(4, 1, 2) == pytest.approx(unit_ball_volume(4) ** 0.25, rel=1e-14)
    # m = 3, n = 7, p = 2: (n-p)/p times the factor at p_1* = 14/5
    r = 14 / 5
    expected = unit_ball_volume(7) ** (3 / 7) * 2.5 * 7 * (7 - 2 * r) / (r * r / (r - 1))
    assert sobolev_constant(7, 3, 2) == pytest.approx(expected, rel=1e-13)


def test_sobolev_constant_undefined_for_large_p():
    with pytest.raises(DomainError):
        sobolev_constant(3, 2, 2)


def test_lorentz_sobolev_constant_branches():
    assert lorentz_sobolev_constant_lq(4, 2, 3, 3) == pytest.approx(unit_ball_volume(4) ** 0.25)
    with pytest.raises(UnsupportedError):
        lorentz_sobolev_constant_lq(4, 2, 3, 4)
