"""Numerical certification of the inequalities, with slack reports.

Every report is oriented so that the inequality reads ``lhs >= rhs``; for
upper bounds such as the maximal-function Hardy inequality the dominating
side is stored as ``lhs``.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .constants import ExponentSet, conjugate, lorentz_sobolev_constant_lq, poincare_constant, sobolev_constant
from .errors import DomainError, PreconditionError
from .geometry import SpaceParams, log_sinh_F, phi, phi_limit
from .kernels import PER_DECADE, apply_T, log_grid, log_quadrature, majorant_slope, majorant_v
from .profiles import PowerSum, Profile, load_profile, lorentz_integral, maximal
from .radial import RadialFunction, bump, from_profile, nabla_m_norm, plateau, rearrange, zero_function

__all__ = [
    "HOLDS",
    "VIOLATED",
    "INDETERMINATE",
    "UNSUPPORTED",
    "DEFAULT_TOL",
    "InequalityReport",
    "make_report",
    "unsupported_report",
    "FunctionContext",
    "make_function",
    "check_keyest",
    "check_keyyeu",
    "check_phi_monotone",
    "check_hardy_maximal",
    "check_1d_hardy",
    "check_tnorm",
    "check_poincare",
    "check_poincare_sobolev",
    "check_poincare_sobolev_chain",
    "check_order2_chain",
    "check_major_pointwise",
    "REGISTRY",
    "ORDER2_ROWS",
    "SweepSpec",
    "sweep",
    "summarize",
    "reports_to_csv",
    "reports_to_json",
    "REPORT_COLUMNS",
]

HOLDS = "holds"
VIOLATED = "violated"
INDETERMINATE = "indeterminate"
UNSUPPORTED = "unsupported"
DEFAULT_TOL = 1e-9
_TINY = 1e-300

REPORT_COLUMNS = ("name", "n", "m", "p", "q", "function", "lhs", "rhs", "abs_slack", "rel_slack", "status", "tol")


@dataclass(frozen=True)
class InequalityReport:
    name: str
    params: dict
    lhs: float
    rhs: float
    abs_slack: float
    rel_slack: float
    status: str
    tol: float
    note: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != VIOLATED

    def row(self) -> dict:
        out = {"name": self.name}
        for key in ("n", "m", "p", "q", "function"):
            out[key] = self.params.get(key, "")
        out.update(
            lhs=self.lhs, rhs=self.rhs, abs_slack=self.abs_slack, rel_slack=self.rel_slack, status=self.status, tol=self.tol
        )
        return out


def make_report(name: str, params: dict, lhs: float, rhs: float, tol: float = DEFAULT_TOL, note: str = "", detail=None):
    """Classify ``lhs >= rhs``; zero slack counts as holding."""
    lhs, rhs = float(lhs), float(rhs)
    detail = dict(detail or {})
    if math.isnan(lhs) or math.isnan(rhs):
        return InequalityReport(name, params, lhs, rhs, math.nan, math.nan, INDETERMINATE, tol, note or "nan", detail)
    if math.isinf(lhs) and math.isinf(rhs):
        return InequalityReport(name, params, lhs, rhs, math.nan, math.nan, INDETERMINATE, tol, note or "both sides infinite", detail)
    if math.isinf(rhs) or math.isinf(lhs):
        abs_slack = lhs - rhs
        rel = 1.0 if abs_slack > 0 else -1.0
        return InequalityReport(name, params, lhs, rhs, abs_slack, rel, HOLDS if rel > 0 else VIOLATED, tol, note, detail)
    abs_slack = lhs - rhs
    rel = abs_slack / max(abs(lhs), abs(rhs), _TINY)
    status = HOLDS if rel >= -tol else VIOLATED
    return InequalityReport(name, params, lhs, rhs, abs_slack, rel, status, tol, note, detail)


def unsupported_report(name: str, params: dict, reason: str, tol: float = DEFAULT_TOL, lhs=math.nan, rhs=math.nan):
    """Unsupported row; values are still recorded when they could be computed."""
    lhs, rhs = float(lhs), float(rhs)
    if math.isfinite(lhs) and math.isfinite(rhs):
        abs_slack = lhs - rhs
        rel = abs_slack / max(abs(lhs), abs(rhs), _TINY)
    else:
        abs_slack = rel = math.nan
    return InequalityReport(name, params, lhs, rhs, abs_slack, rel, UNSUPPORTED, tol, "unsupported: " + reason)


# -- test functions --------------------------------------------------------------

_BUMP = re.compile(r"^\s*bump\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)\s*$")
_PLATEAU = re.compile(r"^\s*plateau\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)\s*$")


def make_function(spec: str, space: SpaceParams) -> RadialFunction:
    """Parse ``bump(rho0,k)``, ``plateau(r1,r2)``, ``zero`` or ``file:<path>``."""
    text = spec.strip()
    if (m := _BUMP.match(text)) is not None:
        k = float(m.group(2))
        if k != int(k):
            raise DomainError("bump exponent k must be an integer")
        return bump(space, float(m.group(1)), int(k)).with_name(text)
    if (m := _PLATEAU.match(text)) is not None:
        return plateau(space, float(m.group(1)), float(m.group(2))).with_name(text)
    if text == "zero":
        return zero_function(space)
    if text.startswith("file:"):
        return from_profile(space, load_profile(text[5:]), text)
    raise DomainError(f"unknown function spec {spec!r}")


class FunctionContext:
    """Caches rearrangements of |nabla^j u| for one radial test function."""

    def __init__(self, u: RadialFunction, label: str | None = None, per_decade: int = PER_DECADE):
        self.u = u
        self.space = u.space
        self.label = label if label is not None else u.name
        self.per_decade = per_decade
        self._stars: dict[int, Profile] = {}
        self._lorentz: dict[tuple, float] = {}

    @property
    def n(self) -> int:
        return self.space.n

    def star(self, j: int) -> Profile:
        """Rearrangement of |nabla^j u| (j = 0 gives u*)."""
        if j not in self._stars:
            w = self.u.with_name(self.u.name, absolute=True) if j == 0 else nabla_m_norm(self.u, j)
            self._stars[j] = rearrange(w)
        return self._stars[j]

    def laplace_power_star(self, k: int) -> Profile:
        """Rearrangement of |Delta^k u|, which is the j = 2k entry."""
        return self.star(2 * k)

    def norm_q(self, j: int, p: float, q: float) -> float:
        """||nabla^j u||_{p,q}^q."""
        key = (j, p, q)
        if key not in self._lorentz:
            self._lorentz[key] = lorentz_integral(self.star(j), p, q)
        return self._lorentz[key]

    @cached_property
    def majorant(self) -> tuple[Profile, Profile]:
        """(f**, v) for f = -Delta u."""
        f2 = maximal(self.star(2), self.per_decade)
        return f2, majorant_v(f2, self.space, self.per_decade)


def _context(u, per_decade: int = PER_DECADE) -> FunctionContext:
    return u if isinstance(u, FunctionContext) else FunctionContext(u, per_decade=per_decade)


def _params(n, m, p, q, function, **extra) -> dict:
    out = {"n": n, "m": m, "p": p, "q": q, "function": function}
    out.update(extra)
    return out


def _q_at_least(q: float, bound: float) -> bool:
    return q >= bound * (1.0 - 1e-12)


# -- geometric inequalities --------------------------------------------------------

def check_keyest(n: int, q: float, t_grid: Iterable[float], tol: float = DEFAULT_TOL) -> list[InequalityReport]:
    """sinh^{q(n-1)}F >= (t/s)^{q(n-1)/n} + ((n-1)/n)^q (t/s)^q, divided by the largest term."""
    space = SpaceParams(n)
    t = np.asarray(list(t_grid), dtype=float)
    thr = 2.0 * n / (n - 1)
    if not _q_at_least(q, thr):
        return [
            unsupported_report("keyest", _params(n, "", "", q, "", t=float(x)), f"q < 2n/(n-1) = {thr:g}", tol) for x in t
        ]
    if np.any(t <= 0):
        raise DomainError("keyest grid must be positive")
    lt = np.log(t / space.sigma_n)
    a = q * (n - 1) * log_sinh_F(space, t)
    b1 = q * (n - 1) / n * lt
    b2 = q * math.log((n - 1) / n) + q * lt
    top = np.maximum(a, np.maximum(b1, b2))
    lhs = np.exp(a - top)
    rhs = np.exp(b1 - top) + np.exp(b2 - top)
    return [
        make_report("keyest", _params(n, "", "", q, "", t=float(x)), L, R, tol, detail={"rhs_over_lhs": R / L})
        for x, L, R in zip(t, lhs, rhs)
    ]


def check_keyyeu(n: int, t_grid: Iterable[float], tol: float = DEFAULT_TOL) -> list[InequalityReport]:
    """sinh^n(F(t)) > t/sigma_n, normalised by the left side."""
    space = SpaceParams(n)
    t = np.asarray(list(t_grid), dtype=float)
    margin = n * log_sinh_F(space, t) - np.log(t / space.sigma_n)
    return [
        make_report(
            "keyyeu", _params(n, "", "", "", "", t=float(x)), 1.0, math.exp(-g), tol, detail={"log_margin": float(g)}
        )
        for x, g in zip(t, margin)
    ]


def check_phi_monotone(
    n: int, t_grid: Iterable[float], t_limit: float = 1e10, band: float = 0.999, tol: float = DEFAULT_TOL
) -> list[InequalityReport]:
    """phi strictly increasing on the grid, and phi(t_limit) close to its limit.

    The first row compares the consecutive pair with the smallest relative
    increase; the second row checks ``phi(t_limit)(n-1)/(n sigma_n) >= band``
    (the upper bound 1 is recorded in ``detail``).
    """
    space = SpaceParams(n)
    t = np.unique(np.asarray(list(t_grid), dtype=float))
    vals = phi(space, t)
    rel_inc = np.diff(vals) / vals[1:]
    k = int(np.argmin(rel_inc))
    rows = [
        make_report(
            "phi-monotone",
            _params(n, "", "", "", "", t=float(t[k])),
            float(vals[k + 1]),
            float(vals[k]),
            tol,
            detail={"min_relative_increase": float(rel_inc[k]), "strict": bool(np.all(np.diff(vals) > 0))},
        )
    ]
    ratio = float(phi(space, np.array([t_limit]))[0] / phi_limit(space))
    rows.append(
        make_report(
            "phi-limit",
            _params(n, "", "", "", "", t=t_limit),
            ratio,
            band,
            tol,
            detail={"ratio": ratio, "below_one": ratio <= 1.0},
        )
    )
    return rows


# -- profile inequalities ------------------------------------------------------------

def check_hardy_maximal(u_star: Profile, p: float, q: float, label: str = "", tol: float = DEFAULT_TOL):
    """||u**||_{p,q} <= p' ||u*||_{p,q}."""
    params = _params("", "", p, q, label)
    norm = lorentz_integral(u_star, p, q) ** (1.0 / q)
    norm2 = lorentz_integral(maximal(u_star), p, q) ** (1.0 / q)
    return make_report("hardy-maximal", params, conjugate(p) * norm, norm2, tol)


def derivative_profile(u: Profile) -> Profile:
    """Exact derivative of a profile made of power-sum segments."""
    segs = []
    for seg in u.segments:
        if not isinstance(seg, PowerSum):
            raise PreconditionError("exact derivatives need power-sum segments")
        coefs = [c * a for c, a in zip(seg.coefs, seg.exps) if a != 0]
        exps = [a - 1.0 for c, a in zip(seg.coefs, seg.exps) if a != 0]
        segs.append(PowerSum(seg.lo, seg.hi, tuple(coefs), tuple(exps)))
    return Profile(tuple(segs))


def check_1d_hardy(u: Profile, p: float, q: float, label: str = "", tol: float = DEFAULT_TOL):
    """int |u'|^q t^{p-1} >= ((p-q)/q)^q int |u|^q t^{p-q-1}."""
    params = _params("", "", p, q, label)
    if not (1.0 <= q <= p):
        return unsupported_report("1d-hardy", params, "need 1 <= q <= p", tol)
    if u.support_end == math.inf and u.tail_exponent * q + p - q > -1e-15 and not (
        isinstance(u.tail, PowerSum) and u.tail.is_zero
    ):
        return unsupported_report("1d-hardy", params, "u(t) t^{(p-q)/q} does not vanish at infinity", tol)
    lhs = derivative_profile(u).power_integral(q, p - 1.0)
    const = ((p - q) / q) ** q
    rhs = const * u.power_integral(q, p - q - 1.0) if const > 0 else 0.0
    return make_report("1d-hardy", params, lhs, rhs, tol)


def check_tnorm(v: Profile, n: int, p: float, q: float, label: str = "", tol: float = DEFAULT_TOL):
    """int T(v)^q t^{q/p-1} <= (pp'/(n-1)^2)^q int v^q t^{q/p-1}."""
    space = SpaceParams(n)
    params = _params(n, "", p, q, label)
    lhs = (p * conjugate(p) / (n - 1) ** 2) ** q * lorentz_integral(v, p, q)
    rhs = lorentz_integral(apply_T(v, space), p, q)
    return make_report("Tnorm", params, lhs, rhs, tol)


# -- Poincare and Poincare-Sobolev ---------------------------------------------------------

def check_poincare(u, n: int, m: int, p: float, q: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """||nabla^m u||_{p,q}^q >= C(n,m,p)^q ||u||_{p,q}^q."""
    ctx = _context(u)
    _require_dimension(ctx, n)
    params = _params(n, m, p, q, ctx.label)
    ex = ExponentSet(n, m, p, q)
    lhs = ctx.norm_q(m, p, q)
    rhs = poincare_constant(n, m, p) ** q * ctx.norm_q(0, p, q)
    if not ex.poincare_valid:
        return unsupported_report("poincare", params, "q > p with m odd", tol, lhs, rhs)
    return make_report("poincare", params, lhs, rhs, tol)


def _require_dimension(ctx: FunctionContext, n: int) -> None:
    if ctx.n != n:
        raise DomainError(f"test function lives on H^{ctx.n}, not H^{n}")


def check_poincare_sobolev(u, n: int, m: int, p: float, q: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """||nabla^m u||^q - C^q ||u||^q >= S^q ||u||_{p_m*,q}^q."""
    ctx = _context(u)
    _require_dimension(ctx, n)
    params = _params(n, m, p, q, ctx.label)
    ex = ExponentSet(n, m, p, q)
    if p >= n / m:
        return unsupported_report("poincare-sobolev", params, "p >= n/m", tol)
    lhs = ctx.norm_q(m, p, q) - poincare_constant(n, m, p) ** q * ctx.norm_q(0, p, q)
    rhs = sobolev_constant(n, m, p) ** q * ctx.norm_q(0, ex.p_star(m), q)
    issues = ex.sobolev_issues()
    if issues:
        return unsupported_report("poincare-sobolev", params, "hypothesis unmet (" + "; ".join(issues) + ")", tol, lhs, rhs)
    return make_report("poincare-sobolev", params, lhs, rhs, tol)


def _ls2_factor(n: int, r: float, sigma: float) -> float:
    return n * (n - 2.0 * r) / (r * conjugate(r)) * sigma ** (2.0 / n)


def check_poincare_sobolev_chain(u, n: int, m: int, p: float, q: float, tol: float = DEFAULT_TOL):
    """The intermediate inequalities used to reach order m from orders 1 and 2."""
    ctx = _context(u)
    _require_dimension(ctx, n)
    ex = ExponentSet(n, m, p, q)
    sigma = ctx.space.sigma_n
    rows: list[InequalityReport] = []
    name = "poincare-sobolev-chain:"
    base = _params(n, m, p, q, ctx.label)
    if m < 3:
        return rows
    k = m // 2
    if m % 2 == 0:
        # Poincare of order 2k-2 applied to u, scaled by C(n,2,p)^q
        rows.append(
            make_report(
                name + "poincare",
                dict(base),
                poincare_constant(n, 2, p) ** q * ctx.norm_q(2 * k - 2, p, q),
                poincare_constant(n, m, p) ** q * ctx.norm_q(0, p, q),
                tol,
            )
        )
        # improved order-2 inequality for w = Delta^{k-1} u
        lhs = ctx.norm_q(2 * k, p, q) - poincare_constant(n, 2, p) ** q * ctx.norm_q(2 * k - 2, p, q)
        if p < n / 2:
            rhs = _ls2_factor(n, p, sigma) ** q * ctx.norm_q(2 * k - 2, ex.p_star(2), q)
            if _q_at_least(q, ex.q_threshold):
                rows.append(make_report(name + "improvedLS2a", dict(base), lhs, rhs, tol))
            else:
                rows.append(unsupported_report(name + "improvedLS2a", dict(base), "q < 2n/(n-1)", tol, lhs, rhs))
        steps = [(2 * i, 2 * k - 2 - 2 * (i - 1)) for i in range(1, k)]
    else:
        rows.append(
            make_report(
                name + "poincare",
                dict(base),
                ((n - 1) / p) ** q * ctx.norm_q(2 * k, p, q),
                poincare_constant(n, m, p) ** q * ctx.norm_q(0, p, q),
                tol,
            )
        )
        lhs = ctx.norm_q(m, p, q) - ((n - 1) / p) ** q * ctx.norm_q(2 * k, p, q)
        if p < n:
            rhs = lorentz_sobolev_constant_lq(n, p, q, q) ** q * ctx.norm_q(2 * k, ex.p_star(1), q)
            if q <= p:
                rows.append(make_report(name + "PSLorentz1", dict(base), lhs, rhs, tol))
            else:
                rows.append(unsupported_report(name + "PSLorentz1", dict(base), "q > p", tol, lhs, rhs))
        steps = [(2 * i - 1, 2 * k - 2 * (i - 1)) for i in range(1, k + 1)]
    # LSorder2 at exponent r = p_j*: ||Delta w||_{r,q} >= c(r) ||w||_{r_2*,q}
    for j, order in steps:
        if order < 2 or ex.p * (j + 2) >= n:
            continue
        r = ex.p_star(j)
        lhs = ctx.norm_q(order, r, q)
        rhs = _ls2_factor(n, r, sigma) ** q * ctx.norm_q(order - 2, ex.p_star(j + 2), q)
        rows.append(make_report(name + f"LSorder2[p_{j}*]", dict(base), lhs, rhs, tol))
    return rows


# -- the order-two chain ---------------------------------------------------------------

ORDER2_ROWS = (
    "order2I1",
    "order2I2",
    "order2II2",
    "order2II3",
    "LSorder2*",
    "LSorder2",
    "improvedLS2",
    "improvedLS2a",
    "major",
)


def order2_integrals(ctx: FunctionContext, p: float, q: float) -> dict[str, float]:
    """All integrals entering the order-two chain (q-th powers)."""
    space = ctx.space
    n, sigma = space.n, space.sigma_n
    f2, v = ctx.majorant
    nodes = log_grid(f2, ctx.per_decade)
    nsig = n * sigma

    def dv(t):
        return np.abs(majorant_slope(f2, space, t))

    def dv_w(t):
        # |v'| n sigma sinh^{n-1}(F) = f** phi / (n sigma)
        return f2(t) * phi(space, t) / nsig

    out = {
        "lap": ctx.norm_q(2, p, q),
        "A": log_quadrature(lambda t: dv_w(t) ** q * t ** (q / p - 1.0), nodes),
        "B": log_quadrature(lambda t: dv_w(t) ** q * t ** (q * (1 / p - 1 / n) - 1.0), nodes),
        "Cv": lorentz_integral(v, p, q),
        "D": log_quadrature(lambda t: dv(t) ** q * t ** (q * (1 / p - 1 / n) + q - 1.0), nodes),
        "E": v.power_integral(q, q * (1 / p - 1 / n) - 1.0),
        "G": log_quadrature(lambda t: dv(t) ** q * t ** (q * (1 / p - 2 / n) + q - 1.0), nodes),
        "U": ctx.norm_q(0, p, q),
    }
    if p < n / 2:
        p2 = n * p / (n - 2 * p)
        out["Ev2"] = v.power_integral(q, q / p2 - 1.0)
        out["U2"] = ctx.norm_q(0, p2, q)
    return out


def check_order2_chain(u, n: int, p: float, q: float, tol: float = DEFAULT_TOL) -> list[InequalityReport]:
    """One report per row of the order-two chain, in ``ORDER2_ROWS`` order."""
    ctx = _context(u)
    _require_dimension(ctx, n)
    sigma = ctx.space.sigma_n
    pp = conjugate(p)
    thr = 2.0 * n / (n - 1)
    base = _params(n, 2, p, q, ctx.label)
    if not (1.0 < p < n) or not (1.0 < q < math.inf):
        return [unsupported_report(r, dict(base), "need 1 < p < n and q > 1", tol) for r in ORDER2_ROWS]
    I = order2_integrals(ctx, p, q)
    big_q = _q_at_least(q, thr)
    half = p < n / 2
    c1 = ((p - 1) / p * n * sigma ** (1 / n)) ** q
    c_star = (n * n * sigma ** (2 / n) / pp) ** q
    c_ls2 = _ls2_factor(n, p, sigma) ** q if half else math.nan
    c_poinc = poincare_constant(n, 2, p) ** q
    nsq = n**q * sigma ** (q / n)

    rows = []

    def add(name, lhs, rhs, ok=True, reason=""):
        if ok:
            rows.append(make_report(name, dict(base), lhs, rhs, tol))
        else:
            rows.append(unsupported_report(name, dict(base), reason, tol, lhs, rhs))

    add("order2I1", I["lap"], c1 * I["B"])
    add("order2I2", I["lap"] - ((n - 1) * (p - 1) / p) ** q * I["A"], c1 * I["B"], big_q, "q < 2n/(n-1)")
    add("order2II2", I["A"], ((n - 1) / p) ** q * I["Cv"] + nsq * I["D"], big_q, "q < 2n/(n-1)")
    add("order2II3", I["B"], ((n - 1) * (n - p) / (n * p)) ** q * I["E"] + nsq * I["G"], big_q, "q < 2n/(n-1)")
    add("LSorder2*", I["lap"], c_star * I["G"])
    if half:
        add("LSorder2", I["lap"], c_ls2 * I["U2"])
    else:
        rows.append(unsupported_report("LSorder2", dict(base), "p >= n/2", tol))
    add("improvedLS2", I["lap"] - c_poinc * I["U"], c_star * I["G"], big_q, "q < 2n/(n-1)")
    if half:
        add("improvedLS2a", I["lap"] - c_poinc * I["U"], c_ls2 * I["U2"], big_q, "q < 2n/(n-1)")
    else:
        rows.append(unsupported_report("improvedLS2a", dict(base), "p >= n/2", tol))
    # u* <= v integrated against both Lorentz weights; report the tighter one
    major = [make_report("major", dict(base), I["Cv"], I["U"], tol)]
    if half:
        major.append(make_report("major", dict(base), I["Ev2"], I["U2"], tol))
    worst = min(major, key=lambda r: r.rel_slack if not math.isnan(r.rel_slack) else math.inf)
    rows.append(worst)
    return rows


def check_major_pointwise(u, n: int, points: int = 100, tol: float = 1e-8) -> InequalityReport:
    """u*(t) <= v(t) on a log grid inside the support of u*."""
    ctx = _context(u)
    _require_dimension(ctx, n)
    u_star = ctx.star(0)
    _, v = ctx.majorant
    end = u_star.support_end
    hi = end if math.isfinite(end) else 1e6
    t = np.geomspace(hi * 1e-8, hi * (1 - 1e-9), points)
    us, vs = u_star(t), v(t)
    rel = (vs - us) / np.maximum(np.maximum(np.abs(vs), np.abs(us)), _TINY)
    k = int(np.argmin(rel))
    params = _params(n, "", "", "", ctx.label, t=float(t[k]))
    return make_report("major-pointwise", params, float(vs[k]), float(us[k]), tol)


# -- registry and sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    kind: str  # "grid", "profile", "function", "function-m", "order2"
    description: str


REGISTRY: dict[str, RegistryEntry] = {
    e.name: e
    for e in (
        RegistryEntry("keyest", "grid", "sinh^{q(n-1)}(F) lower bound, q >= 2n/(n-1)"),
        RegistryEntry("keyyeu", "grid", "sinh^n(F(t)) > t/sigma_n"),
        RegistryEntry("phi-monotone", "grid", "phi increasing towards n sigma_n/(n-1)"),
        RegistryEntry("hardy-maximal", "profile", "||u**||_{p,q} <= p' ||u*||_{p,q}"),
        RegistryEntry("1d-hardy", "profile", "one-dimensional weighted Hardy inequality"),
        RegistryEntry("Tnorm", "profile", "L^{p,q}-type bound for the operator T"),
        RegistryEntry("major", "order2", "u* <= v integrated against Lorentz weights"),
        RegistryEntry("order2I1", "order2", "||Delta u||^q against the v' integral with weight t^{q(1/p-1/n)-1}"),
        RegistryEntry("order2I2", "order2", "improved form of order2I1 for q >= 2n/(n-1)"),
        RegistryEntry("order2II2", "order2", "lower bound of the v' integral with weight t^{q/p-1}"),
        RegistryEntry("order2II3", "order2", "lower bound of the v' integral with weight t^{q(1/p-1/n)-1}"),
        RegistryEntry("LSorder2*", "order2", "||Delta u||^q against int |v'|^q t^{q(1/p-2/n)+q-1}"),
        RegistryEntry("LSorder2", "order2", "second-order Lorentz-Sobolev inequality"),
        RegistryEntry("improvedLS2", "order2", "improved second-order inequality (v' form)"),
        RegistryEntry("improvedLS2a", "order2", "improved second-order Poincare-Sobolev inequality"),
        RegistryEntry("poincare", "function-m", "higher-order sharp Poincare inequality"),
        RegistryEntry("poincare-sobolev", "function-m", "higher-order Poincare-Sobolev inequality"),
    )
}


def _range_values(values) -> list:
    vals = list(values)
    if not vals:
        raise DomainError("empty parameter range")
    return vals


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian product of parameters for one registered inequality."""

    name: str
    n: tuple = ()
    m: tuple = ()
    p: tuple = ()
    q: tuple = ()
    functions: tuple = ()
    t_grid: tuple = ()
    tol: float = DEFAULT_TOL
    seed: int = 0
    count: int = 20
    chain: bool = False
    per_decade: int = PER_DECADE


def random_step_profiles(count: int, seed: int, max_steps: int = 20) -> list[Profile]:
    """Random non-increasing step profiles with at most ``max_steps`` steps."""
    from .profiles import step_profile

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_steps + 1))
        heights = np.sort(rng.uniform(0.05, 5.0, size=k))[::-1]
        edges = np.cumsum(rng.uniform(0.01, 3.0, size=k))
        out.append(step_profile(heights.tolist(), edges.tolist()))
    return out


def random_piecewise_linear(count: int, seed: int, max_knots: int = 8) -> list[Profile]:
    """Random continuous piecewise-linear compactly supported profiles in t."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_knots + 1))
        knots = np.cumsum(rng.uniform(0.05, 2.0, size=k + 1))
        vals = np.concatenate((rng.uniform(-2.0, 2.0, size=k + 1), [0.0]))
        knots = np.concatenate(([0.0], knots))
        segs = [PowerSum(0.0, knots[1], (vals[0],), (0.0,))]
        for a, b, ya, yb in zip(knots[1:-1], knots[2:], vals[:-2], vals[1:-1]):
            slope = (yb - ya) / (b - a)
            segs.append(PowerSum(a, b, (ya - slope * a, slope), (0.0, 1.0)))
        # final linear taper down to zero
        a, b = knots[-1], knots[-1] + rng.uniform(0.05, 2.0)
        ya = vals[-2]
        slope = -ya / (b - a)
        segs.append(PowerSum(a, b, (ya - slope * a, slope), (0.0, 1.0)))
        segs.append(PowerSum(b, math.inf, (), ()))
        out.append(Profile(tuple(segs)))
    return out


def _profiles_for(spec: SweepSpec, label: str):
    if label.startswith("file:"):
        return [(label, load_profile(label[5:]))]
    if label.startswith("random"):
        if spec.name == "1d-hardy":
            profs = random_piecewise_linear(spec.count, spec.seed)
        else:
            profs = random_step_profiles(spec.count, spec.seed)
        return [(f"{label}#{i}", prof) for i, prof in enumerate(profs)]
    raise DomainError(f"{spec.name} needs a profile: file:<path> or random")


def _run_task(task) -> list[InequalityReport]:
    spec, key = task
    entry = REGISTRY[spec.name]
    tol = spec.tol
    if entry.kind == "grid":
        n, q = key
        if spec.name == "keyest":
            return check_keyest(n, q, spec.t_grid, tol)
        if spec.name == "keyyeu":
            return check_keyyeu(n, spec.t_grid, tol)
        return check_phi_monotone(n, spec.t_grid, tol=tol)
    if entry.kind == "profile":
        n, p, q, label = key
        rows = []
        for lab, prof in _profiles_for(spec, label):
            if spec.name == "hardy-maximal":
                rows.append(check_hardy_maximal(prof, p, q, lab, tol))
            elif spec.name == "1d-hardy":
                rows.append(check_1d_hardy(prof, p, q, lab, tol))
            else:
                rows.append(check_tnorm(prof, n, p, q, lab, tol))
        return rows
    n, m, p, q, label = key
    ctx = FunctionContext(make_function(label, SpaceParams(n)), label, spec.per_decade)
    if entry.kind == "order2":
        return [r for r in check_order2_chain(ctx, n, p, q, tol) if r.name == spec.name]
    if spec.name == "poincare":
        return [check_poincare(ctx, n, m, p, q, tol)]
    rows = [check_poincare_sobolev(ctx, n, m, p, q, tol)]
    if spec.chain:
        rows.extend(check_poincare_sobolev_chain(ctx, n, m, p, q, tol))
    return rows


def _tasks(spec: SweepSpec) -> list:
    if spec.name not in REGISTRY:
        raise DomainError(f"unknown inequality {spec.name!r}; known: {', '.join(REGISTRY)}")
    kind = REGISTRY[spec.name].kind
    if kind == "grid":
        if not spec.t_grid:
            raise DomainError("empty t grid")
        qs = spec.q if spec.name == "keyest" else ("",)
        keys = itertools.product(_range_values(spec.n), _range_values(qs))
    elif kind == "profile":
        ns = spec.n if spec.name == "Tnorm" else ("",)
        keys = itertools.product(
            _range_values(ns), _range_values(spec.p), _range_values(spec.q), _range_values(spec.functions)
        )
    else:
        ms = spec.m if kind == "function-m" else (2,)
        keys = itertools.product(
            _range_values(spec.n), _range_values(ms), _range_values(spec.p), _range_values(spec.q),
            _range_values(spec.functions),
        )
    return [(spec, k) for k in keys]


def sweep(spec: SweepSpec, jobs: int = 1) -> list[InequalityReport]:
    """Evaluate every parameter tuple; rows come back in parameter order."""
    tasks = _tasks(spec)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    return [r for chunk in chunks for r in chunk]


def summarize(reports: Sequence[InequalityReport]) -> dict[str, int]:
    out = {HOLDS: 0, VIOLATED: 0, INDETERMINATE: 0, UNSUPPORTED: 0}
    for r in reports:
        out[r.status] += 1
    return out


# -- emitters ---------------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def reports_to_csv(reports: Sequence[InequalityReport], header: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        row = r.row()
        writer.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else _fmt(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    return str(x)


def reports_to_json(reports: Sequence[InequalityReport]) -> str:
    records = []
    for r in reports:
        rec = {k: _json_value(v) for k, v in r.row().items()}
        rec["params"] = _json_value(r.params)
        if r.note:
            rec["note"] = r.note
        records.append(rec)
    return json.dumps(records, indent=2) + "\n"
