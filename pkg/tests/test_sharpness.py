import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlorentz.errors import DomainError
from hyperlorentz.geometry import SpaceParams, phi, phi_limit
from hyperlorentz.profiles import lorentz_integral
from hyperlorentz.sharpness import (
    SHARPNESS_COLUMNS,
    choose_a,
    fR_lorentz_identity,
    fR_tail_integral,
    make_fR,
    run_sharpness,
    sharpness_ratio,
)


def test_identity_exact_value():
    # p = q = 2, a = 1, R = e^2: 1 + 2 + int_1^2 (2-s)^2 ds = 10/3
    assert abs(fR_lorentz_identity(1.0, math.e**2, 2, 2) - 10 / 3) <= 1e-12


def test_tail_integral_closed_form_p_equals_q():
    # q = p: int_1^2 (2-s)^q ds = 1/(q+1)
    for q in (1.5, 2.0, 4.0):
        assert fR_tail_integral(q, q) == pytest.approx(1 / (q + 1), rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(
    loga=st.floats(-3, 2),
    span=st.floats(0.5, 6),
    p=st.floats(1.2, 5.0),
    q=st.floats(1.0, 6.0),
)
def test_identity_matches_direct_quasinorm(loga, span, p, q):
    a = 10.0**loga
    R = a * 10.0**span
    closed = fR_lorentz_identity(a, R, p, q)
    direct = lorentz_integral(make_fR(a, R, p), p, q)
    assert direct == pytest.approx(closed, rel=1e-8)


def test_make_fR_shape():
    f = make_fR(2.0, 100.0, 2.0)
    t = np.array([1.0, 2.0, 50.0, 100.0, 150.0, 200.0, 300.0])
    expected = [2 ** -0.5, 2 ** -0.5, 50 ** -0.5, 0.1, 0.05, 0.0, 0.0]
    assert np.allclose(f(t), expected, rtol=1e-14, atol=1e-16)
    assert f.nonincreasing
    with pytest.raises(DomainError):
        make_fR(5.0, 3.0, 2.0)
    with pytest.raises(DomainError):
        make_fR(1.0, 3.0, 1.0)


def test_choose_a_hits_target():
    space = SpaceParams(3)
    a = choose_a(space, 0.01)
    target = phi_limit(space) / 1.01
    assert phi(space, a) == pytest.approx(target, rel=1e-12)
    assert phi(space, 0.99 * a) < target
    with pytest.raises(DomainError):
        choose_a(space, 0.0)


def test_ratio_above_constant_and_decreasing():
    a = choose_a(SpaceParams(3), 0.01)
    ratios = [sharpness_ratio(3, 2, 2, 2, a, R) for R in (1e4, 1e5, 1e6)]
    assert all(r >= 1 - 1e-8 for r in ratios)
    assert ratios[0] > ratios[1] > ratios[2]


def test_ratio_first_order():
    a = choose_a(SpaceParams(3), 0.01)
    r4, r6 = (sharpness_ratio(3, 1, 2, 2, a, R) for R in (1e4, 1e6))
    assert r4 > r6 >= 1 - 1e-8


def test_run_sharpness_rows():
    res = run_sharpness(3, 2, 2, 2, epsilon=0.01, R_values=(1e2, 1e5))
    assert res[0].status == "unsupported" and math.isnan(res[0].ratio)
    assert res[1].status == "holds"
    assert tuple(res[1].row()) == SHARPNESS_COLUMNS
    assert res[1].ratio_over_target == pytest.approx(res[1].ratio)
