"""Acceptance criteria as callables, shared by the test-suite and ``selftest``.

Each criterion returns a :class:`CriterionResult`; tolerances are fixed at
the values the criteria prescribe.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import poincare_constant
from .geometry import SpaceParams, ball_volume, inverse_volume, log_sinh_F, phi, phi_limit
from .profiles import PowerSum, Profile, lorentz_integral
from .sharpness import fR_lorentz_identity, make_fR, run_sharpness
from .verifier import (
    HOLDS,
    FunctionContext,
    check_1d_hardy,
    check_hardy_maximal,
    check_keyest,
    check_order2_chain,
    check_poincare,
    check_poincare_sobolev,
    check_tnorm,
    make_function,
    random_piecewise_linear,
    random_step_profiles,
)

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "format_line"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)


def _grid_t(count: int) -> np.ndarray:
    return np.geomspace(1e-9, 1e9, count)


def criterion_1() -> tuple[bool, str]:
    t = _grid_t(200)
    worst = 0.0
    start = time.perf_counter()
    for n in range(2, 11):
        space = SpaceParams(n)
        err = np.abs(ball_volume(space, inverse_volume(space, t)) - t) / t
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-11 and elapsed < 5.0
    return ok, f"max rel round-trip error {worst:.3g} (<= 1e-11), {elapsed:.2f} s (< 5 s)"


def criterion_2() -> tuple[bool, str]:
    t = _grid_t(200)
    worst = math.inf
    for n in range(2, 11):
        space = SpaceParams(n)
        margin = n * log_sinh_F(space, t) - np.log(t / space.sigma_n)
        worst = min(worst, float(margin.min()))
    return worst > 0, f"min of n log sinh F - ln(t/sigma_n) = {worst:.3g} (> 0)"


def criterion_3() -> tuple[bool, str]:
    t = _grid_t(300)
    worst = math.inf
    ratios = {}
    for n in (2, 3, 5, 8):
        for q in (2 * n / (n - 1), 4.0, 10.0):
            rows = check_keyest(n, q, t)
            worst = min(worst, min(r.rel_slack for r in rows))
            ratios[(n, q)] = rows[0].detail["rhs_over_lhs"]
    low = [f"(n={n}, q={q:.4g}): {r:.6f}" for (n, q), r in ratios.items() if r < 0.999]
    ok = worst >= -1e-9 and not low
    msg = f"min rel_slack {worst:.3g} (>= -1e-9); min RHS/LHS at t=1e-9 {min(ratios.values()):.6f} (>= 0.999)"
    if low:
        msg += "; below 0.999 at " + ", ".join(low)
    return ok, msg


def criterion_4() -> tuple[bool, str]:
    t = _grid_t(200)
    strict = True
    failing = []
    ratios = {}
    for n in range(2, 11):
        space = SpaceParams(n)
        strict &= bool(np.all(np.diff(phi(space, t)) > 0))
        ratio = float(phi(space, np.array([1e10]))[0] / phi_limit(space))
        ratios[n] = ratio
        if not (0.999 <= ratio <= 1.0):
            failing.append(n)
    ok = strict and not failing
    worst = min(ratios.values())
    msg = f"phi strictly increasing: {strict}; min phi(1e10)(n-1)/(n sigma_n) = {worst:.6f} (band [0.999, 1])"
    if failing:
        msg += f"; outside band for n = {failing}"
    return ok, msg


def criterion_5() -> tuple[bool, str]:
    start = time.perf_counter()
    profiles = random_step_profiles(100, seed=5)
    worst = -math.inf
    for p, q in ((2, 2), (2, 3), (3, 2), (1.5, 4)):
        for u in profiles:
            r = check_hardy_maximal(u, p, q)
            worst = max(worst, r.rhs / r.lhs)
    elapsed = time.perf_counter() - start
    ok = worst <= 1.0 + 1e-10 and elapsed < 10.0
    return ok, f"max ||u**|| / (p' ||u*||) = {worst:.12f} (<= 1 + 1e-10), {elapsed:.2f} s (< 10 s)"


def criterion_6() -> tuple[bool, str]:
    profiles = random_piecewise_linear(50, seed=6)
    worst = math.inf
    for p, q in ((3, 2), (4, 2), (2, 2)):
        for u in profiles:
            worst = min(worst, check_1d_hardy(u, p, q).rel_slack)
    tri = Profile((PowerSum(0.0, 1.0, (1.0, -1.0), (0.0, 1.0)), PowerSum(1.0, math.inf, (), ())))
    r = check_1d_hardy(tri, 3, 2)
    exact = abs(r.lhs - 1 / 3) <= 1e-12 and abs(r.rhs - 1 / 12) <= 1e-12
    ok = worst >= -1e-10 and exact
    return ok, f"min rel_slack {worst:.3g} (>= -1e-10); closed form LHS={r.lhs:.15f} RHS={r.rhs:.15f}"


POINCARE_FUNCTIONS = ("bump(1,3)", "bump(2,4)", "plateau(0.5,1.5)")
POINCARE_TUPLES = ((3, 1, 2, 2), (3, 2, 2, 2), (5, 2, 2, 3), (4, 3, 2, 2))


def criterion_7() -> tuple[bool, str]:
    worst = math.inf
    for spec in POINCARE_FUNCTIONS:
        for n, m, p, q in POINCARE_TUPLES:
            ctx = FunctionContext(make_function(spec, SpaceParams(n)), spec)
            worst = min(worst, check_poincare(ctx, n, m, p, q).rel_slack)
    cross = poincare_constant(3, 2, 2) ** 2 == (3 - 1) ** 4 / 16
    ok = worst >= -1e-8 and cross
    return ok, f"min rel_slack {worst:.3g} (>= -1e-8); C(3,2,2)^2 == (n-1)^4/16: {cross}"


def criterion_8() -> tuple[bool, str]:
    start = time.perf_counter()
    ctx = FunctionContext(make_function("bump(1,4)", SpaceParams(5)), "bump(1,4)")
    rows = check_order2_chain(ctx, 5, 2, 3)
    elapsed = time.perf_counter() - start
    worst = min(r.rel_slack for r in rows)
    all_hold = len(rows) == 9 and all(r.status == HOLDS for r in rows)
    ok = all_hold and worst >= -1e-7 and elapsed < 60.0
    names = ",".join(r.name for r in rows if r.status != HOLDS) or "none"
    return ok, f"{len(rows)} rows, not holding: {names}; min rel_slack {worst:.3g} (>= -1e-7), {elapsed:.1f} s (< 60 s)"


SOBOLEV_TUPLES = ((5, 2, 2, 3.0), (7, 3, 2, 2.0), (4, 1, 2, 8 / 3))


def criterion_9() -> tuple[bool, str]:
    worst = math.inf
    notes = []
    for n, m, p, q in SOBOLEV_TUPLES:
        ctx = FunctionContext(make_function("bump(1,4)", SpaceParams(n)), "bump(1,4)")
        r = check_poincare_sobolev(ctx, n, m, p, q)
        worst = min(worst, r.rel_slack)
        if r.status != HOLDS:
            notes.append(f"({n},{m},{p:g},{q:.4g}) {r.note}")
    ok = worst >= -1e-7
    msg = f"min rel_slack {worst:.3g} (>= -1e-7)"
    if notes:
        msg += "; " + "; ".join(notes)
    return ok, msg


def criterion_10() -> tuple[bool, str]:
    profiles = random_step_profiles(20, seed=10)
    worst = -math.inf
    for n in (2, 3):
        for p, q in ((2, 2), (3, 2)):
            for v in profiles:
                r = check_tnorm(v, n, p, q)
                worst = max(worst, r.rhs / r.lhs)
    ok = worst <= 1.0 + 1e-8
    return ok, f"max int T(v)^q / bound = {worst:.6f} (<= 1 + 1e-8)"


def criterion_11() -> tuple[bool, str]:
    start = time.perf_counter()
    ok = True
    parts = []
    for m, target in ((2, 1.0), (1, 1.0)):
        res = run_sharpness(3, m, 2, 2, epsilon=0.01, R_values=(1e2, 1e4, 1e6))
        usable = [r for r in res if r.status != "unsupported"]
        skipped = [f"{r.R:.0e}" for r in res if r.status == "unsupported"]
        ratios = [r.ratio for r in usable]
        mono = all(b <= a + 1e-6 for a, b in zip(ratios[:-1], ratios[1:]))
        lower = all(x >= target - 1e-8 for x in ratios)
        last = next((r.ratio for r in usable if r.R == 1e6), math.nan)
        band = last <= 1.25
        ok &= mono and lower and band and not skipped
        parts.append(
            f"m={m}: a={res[0].a:.6g}, ratios {[round(x, 6) for x in ratios]}, non-increasing {mono}, "
            f">= C^q {lower}, R=1e6 ratio {last:.4f} <= 1.25 {band}"
            + (f", R <= a (f_R undefined) for R = {skipped}" if skipped else "")
        )
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120.0
    return ok, "; ".join(parts) + f"; {elapsed:.1f} s (< 120 s)"


def criterion_12() -> tuple[bool, str]:
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(20):
        a = float(10 ** rng.uniform(-3, 2))
        R = a * float(10 ** rng.uniform(0.5, 6))
        p = float(rng.uniform(1.2, 5.0))
        q = float(rng.uniform(1.0, 6.0))
        closed = fR_lorentz_identity(a, R, p, q)
        direct = lorentz_integral(make_fR(a, R, p), p, q)
        worst = max(worst, abs(closed - direct) / abs(closed))
    exact = abs(fR_lorentz_identity(1.0, math.e**2, 2, 2) - 10 / 3)
    ok = worst <= 1e-8 and exact <= 1e-12
    return ok, f"max rel diff {worst:.3g} (<= 1e-8); |identity - 10/3| = {exact:.3g} (<= 1e-12)"


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("geometry round trip", criterion_1),
    2: ("sinh^n(F(t)) > t/sigma_n", criterion_2),
    3: ("keyest lower bound", criterion_3),
    4: ("phi monotone with limit", criterion_4),
    5: ("maximal-function Hardy inequality", criterion_5),
    6: ("one-dimensional Hardy inequality", criterion_6),
    7: ("higher-order Poincare inequality", criterion_7),
    8: ("order-two chain", criterion_8),
    9: ("higher-order Poincare-Sobolev inequality", criterion_9),
    10: ("operator T bound", criterion_10),
    11: ("sharpness ratios", criterion_11),
    12: ("f_R closed form", criterion_12),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - start)


def run_all(numbers=None) -> list[CriterionResult]:
    """Run criteria 1-12 and append criterion 13 (total runtime)."""
    numbers = list(CRITERIA) if numbers is None else list(numbers)
    start = time.perf_counter()
    out = [run_criterion(k) for k in numbers]
    total = time.perf_counter() - start
    if numbers == list(CRITERIA):
        out.append(CriterionResult(13, "full selftest runtime", total < 300.0, f"{total:.1f} s (< 300 s)", total))
    return out


def format_line(r: CriterionResult) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.number:2d} ({r.title}): {r.detail}"
