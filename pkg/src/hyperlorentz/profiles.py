"""One-dimensional profiles in the volume variable t, maximal functions and
Lorentz quasi-norms.

A :class:`Profile` is a right-continuous function on (0, inf) made of
contiguous segments.  Two segment kinds cover everything the package needs:

* :class:`PowerSum` -- ``sum_i c_i t**a_i`` (constants, powers and linear
  tapers are special cases) with closed-form integrals;
* :class:`Hermite` -- a table of nodes in ``s = log t`` with node values and
  one-sided slopes ``du/ds``, interpolated by cubic Hermite polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, PreconditionError

__all__ = [
    "PowerSum",
    "Hermite",
    "Profile",
    "step_profile",
    "power_profile",
    "maximal",
    "power_tail",
    "power_head",
    "lorentz_integral",
    "lorentz_quasinorm",
    "weighted_integral",
    "dump_profile",
    "load_profile",
    "parse_profile",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL_X = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS
QUAD_EPSREL = 1e-13


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=400)
    return val


@dataclass(frozen=True)
class PowerSum:
    """``sum_i coefs[i] * t**exps[i]`` on ``[lo, hi)``."""

    lo: float
    hi: float
    coefs: tuple[float, ...]
    exps: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefs) != len(self.exps):
            raise DomainError("coefs and exps must have equal length")
        merged: dict[float, float] = {}
        for c, a in zip(self.coefs, self.exps):
            merged[float(a)] = merged.get(float(a), 0.0) + float(c)
        items = sorted((a, c) for a, c in merged.items() if c != 0.0)
        object.__setattr__(self, "exps", tuple(a for a, _ in items))
        object.__setattr__(self, "coefs", tuple(c for _, c in items))

    @property
    def is_zero(self) -> bool:
        return not self.coefs

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, a in zip(self.coefs, self.exps):
            out = out + (c if a == 0 else c * t**a)
        return out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, a in zip(self.coefs, self.exps):
            if a != 0:
                out = out + c * a * t ** (a - 1)
        return out

    def scaled(self, factor: float) -> "PowerSum":
        return PowerSum(self.lo, self.hi, tuple(factor * c for c in self.coefs), self.exps)

    def antiderivative_terms(self) -> tuple[list[float], list[float], float]:
        """Terms of a primitive ``G`` with ``G(t) = sum c t^a + L log t``."""
        coefs, exps, log_coef = [], [], 0.0
        for c, a in zip(self.coefs, self.exps):
            if a == -1.0:
                log_coef += c
            else:
                coefs.append(c / (a + 1))
                exps.append(a + 1)
        return coefs, exps, log_coef

    def integral(self, a: float, b: float) -> float:
        """int_a^b of the segment (lo <= a <= b <= hi)."""
        if self.is_zero or a == b:
            return 0.0
        coefs, exps, log_coef = self.antiderivative_terms()
        if a == 0.0 and (log_coef != 0.0 or any(e <= 0 for e in exps)):
            raise PreconditionError("profile is not integrable at the origin")
        if math.isinf(b) and (log_coef != 0.0 or any(e >= 0 for e in exps)):
            return math.inf
        total = 0.0
        for c, e in zip(coefs, exps):
            if a == 0.0 or math.isinf(b):
                hi = 0.0 if math.isinf(b) else b**e
                lo = 0.0 if a == 0.0 else a**e
                total += c * (hi - lo)
            else:
                # stable when e is close to 0
                total += c * a**e * math.expm1(e * math.log(b / a))
        if log_coef:
            total += log_coef * (math.log(b) - math.log(a))
        return total

    def power_integral(self, q: float, beta: float) -> float:
        """int_lo^hi |segment|^q t^beta dt (may be inf)."""
        if self.is_zero:
            return 0.0
        lo, hi = self.lo, self.hi
        if len(self.coefs) == 1:
            c, a = self.coefs[0], self.exps[0]
            g = a * q + beta + 1.0
            scale = abs(c) ** q
            if g == 0.0:
                if lo == 0.0 or math.isinf(hi):
                    return math.inf
                return scale * (math.log(hi) - math.log(lo))
            if lo == 0.0 and g < 0:
                return math.inf
            if math.isinf(hi) and g > 0:
                return math.inf
            if lo > 0.0 and not math.isinf(hi):
                # stable when g is close to 0
                return scale * lo**g * math.expm1(g * math.log(hi / lo)) / g
            top = 0.0 if math.isinf(hi) else hi**g
            bot = 0.0 if lo == 0.0 else lo**g
            return scale * (top - bot) / g
        # leading behaviour decides convergence at the ends
        if lo == 0.0 and self.exps[0] * q + beta + 1.0 <= 0:
            return math.inf
        if math.isinf(hi) and self.exps[-1] * q + beta + 1.0 >= 0:
            return math.inf

        def integrand(s):
            t = math.exp(s)
            return abs(float(self(t))) ** q * math.exp((beta + 1.0) * s)

        s_lo = -math.inf if lo == 0.0 else math.log(lo)
        s_hi = math.inf if math.isinf(hi) else math.log(hi)
        if math.isinf(s_lo) or math.isinf(s_hi):
            return _quad(integrand, s_lo, s_hi)
        # split long intervals so quad resolves every decade
        edges = np.linspace(s_lo, s_hi, max(2, int((s_hi - s_lo) / 2.0) + 2))
        return sum(_quad(integrand, x0, x1) for x0, x1 in zip(edges[:-1], edges[1:]))


@dataclass(frozen=True, eq=False)
class Hermite:
    """Cubic Hermite interpolant in ``s = log t``.

    ``dl[k]`` and ``dr[k]`` are the slopes ``du/ds`` at the left and right end
    of cell ``k``; they may differ between neighbouring cells.
    """

    s: np.ndarray
    u: np.ndarray
    dl: np.ndarray
    dr: np.ndarray
    clip: bool = True

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 1 or len(s) < 2 or np.any(np.diff(s) <= 0):
            raise DomainError("Hermite nodes must be strictly increasing, at least two")
        for name in ("s", "u", "dl", "dr"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(self.u) != len(s) or len(self.dl) != len(s) - 1 or len(self.dr) != len(s) - 1:
            raise DomainError("inconsistent Hermite table sizes")

    @property
    def lo(self) -> float:
        return float(np.exp(self.s[0]))

    @property
    def hi(self) -> float:
        return float(np.exp(self.s[-1]))

    def _cell(self, s):
        k = np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, len(self.s) - 2)
        h = self.s[k + 1] - self.s[k]
        x = (s - self.s[k]) / h
        return k, h, x

    def _eval_s(self, s):
        k, h, x = self._cell(s)
        x2, x3 = x * x, x * x * x
        val = (
            (2 * x3 - 3 * x2 + 1) * self.u[k]
            + (x3 - 2 * x2 + x) * h * self.dl[k]
            + (-2 * x3 + 3 * x2) * self.u[k + 1]
            + (x3 - x2) * h * self.dr[k]
        )
        return np.maximum(val, 0.0) if self.clip else val

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self._eval_s(np.log(t))

    def derivative(self, t):
        """du/dt of the interpolant."""
        t = np.asarray(t, dtype=float)
        s = np.log(t)
        k, h, x = self._cell(s)
        x2 = x * x
        dds = (
            (6 * x2 - 6 * x) * self.u[k] / h
            + (3 * x2 - 4 * x + 1) * self.dl[k]
            + (-6 * x2 + 6 * x) * self.u[k + 1] / h
            + (3 * x2 - 2 * x) * self.dr[k]
        )
        return dds / t

    def scaled(self, factor: float) -> "Hermite":
        return Hermite(self.s, factor * self.u, factor * self.dl, factor * self.dr, self.clip)

    def cell_quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss nodes (in t) and weights (in s) for every cell, shape (K, G)."""
        h = np.diff(self.s)
        s = self.s[:-1, None] + h[:, None] * _GL_X[None, :]
        w = h[:, None] * _GL_W[None, :]
        return np.exp(s), w

    def cell_integrals(self) -> np.ndarray:
        """int u dt over every cell."""
        t, w = self.cell_quadrature()
        return (self._eval_s(np.log(t)) * t * w).sum(axis=1)

    def integral(self, a: float, b: float) -> float:
        if a == b:
            return 0.0
        sa, sb = math.log(a), math.log(b)
        i0 = int(np.searchsorted(self.s, sa, side="right"))
        i1 = int(np.searchsorted(self.s, sb, side="left"))
        cuts = np.concatenate(([sa], self.s[i0:i1], [sb]))
        total = 0.0
        for x0, x1 in zip(cuts[:-1], cuts[1:]):
            if x1 <= x0:
                continue
            ss = x0 + (x1 - x0) * _GL_X
            total += float(((x1 - x0) * _GL_W * self._eval_s(ss) * np.exp(ss)).sum())
        return total

    def power_integral(self, q: float, beta: float) -> float:
        t, w = self.cell_quadrature()
        vals = np.abs(self._eval_s(np.log(t))) ** q
        return float((vals * t ** (beta + 1.0) * w).sum())


Segment = PowerSum | Hermite


@dataclass(frozen=True, eq=False)
class Profile:
    """Right-continuous piecewise function on (0, inf)."""

    segments: tuple[Segment, ...]
    nonincreasing: bool = False
    _breaks: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise DomainError("profile needs at least one segment")
        if segs[0].lo != 0.0 or not math.isinf(segs[-1].hi):
            raise DomainError("segments must cover (0, inf)")
        for left, right in zip(segs[:-1], segs[1:]):
            if not math.isclose(left.hi, right.lo, rel_tol=1e-12):
                raise DomainError(f"segments are not contiguous at {left.hi} / {right.lo}")
            if right.lo <= 0:
                raise DomainError("interior breakpoints must be positive")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_breaks", np.array([s.lo for s in segs[1:]], dtype=float))

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breaks.copy()

    @property
    def tail(self) -> Segment:
        return self.segments[-1]

    @property
    def tail_exponent(self) -> float:
        """Leading exponent of the last segment (-inf for eventually zero)."""
        tail = self.tail
        if isinstance(tail, Hermite) or tail.is_zero:
            return -math.inf
        return tail.exps[-1]

    @property
    def support_end(self) -> float:
        """Start of the trailing zero segment, or inf."""
        tail = self.tail
        if isinstance(tail, PowerSum) and tail.is_zero:
            return tail.lo
        return math.inf

    def _index(self, t):
        return np.searchsorted(self._breaks, t, side="right")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("profiles are evaluated at t > 0")
        flat = np.atleast_1d(t).ravel()
        idx = self._index(flat)
        out = np.empty_like(flat)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = self.segments[k](flat[mask])
        out = out.reshape(t.shape)
        return out[()] if out.ndim == 0 else out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        idx = self._index(flat)
        out = np.empty_like(flat)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = self.segments[k].derivative(flat[mask])
        out = out.reshape(t.shape)
        return out[()] if out.ndim == 0 else out

    def scaled(self, factor: float) -> "Profile":
        nonincreasing = self.nonincreasing and factor >= 0
        return Profile(tuple(s.scaled(factor) for s in self.segments), nonincreasing)

    def cumulative(self, t: float) -> float:
        """int_0^t of the profile."""
        if t <= 0:
            return 0.0
        total = 0.0
        for seg in self.segments:
            if seg.lo >= t:
                break
            total += seg.integral(seg.lo, min(seg.hi, t))
        return total

    def power_integral(self, q: float, beta: float) -> float:
        """int_0^inf |P(t)|^q t^beta dt."""
        total = 0.0
        for seg in self.segments:
            total += seg.power_integral(q, beta)
            if math.isinf(total):
                return math.inf
        return total

    def sample_grid(self, per_decade: int = 8) -> np.ndarray:
        """Representative evaluation points covering every segment."""
        pts = [self._breaks]
        for seg in self.segments:
            if isinstance(seg, Hermite):
                pts.append(np.exp(seg.s))
        finite = self._breaks[self._breaks > 0]
        lo = finite.min() * 1e-6 if finite.size else 1e-6
        hi = finite.max() * 1e6 if finite.size else 1e6
        count = int(per_decade * np.log10(hi / lo)) + 2
        pts.append(np.geomspace(lo, hi, count))
        return np.unique(np.concatenate(pts))


def step_profile(heights: Sequence[float], edges: Sequence[float]) -> Profile:
    """Step profile ``heights[k]`` on ``[edges[k-1], edges[k])`` with edges[-1]=0."""
    if len(heights) != len(edges):
        raise DomainError("one height per right edge")
    segs: list[PowerSum] = []
    lo = 0.0
    for h, e in zip(heights, edges):
        if e <= lo:
            raise DomainError("edges must be strictly increasing and positive")
        segs.append(PowerSum(lo, float(e), (float(h),), (0.0,)))
        lo = float(e)
    segs.append(PowerSum(lo, math.inf, (), ()))
    heights = np.asarray(heights, dtype=float)
    noninc = bool(np.all(np.diff(heights) <= 0) and heights[-1] >= 0)
    return Profile(tuple(segs), nonincreasing=noninc)


def power_profile(coef: float, exponent: float) -> Profile:
    """``coef * t**exponent`` on all of (0, inf)."""
    return Profile((PowerSum(0.0, math.inf, (coef,), (exponent,)),), nonincreasing=exponent <= 0 and coef >= 0)


def _check_exponents(p: float, q: float) -> None:
    if not (1.0 < p < math.inf):
        raise DomainError(f"Lorentz exponent p must satisfy 1 < p < inf, got {p}")
    if not (1.0 <= q < math.inf):
        raise DomainError(f"Lorentz exponent q must satisfy 1 <= q < inf, got {q}")


def lorentz_integral(u_star: Profile, p: float, q: float) -> float:
    """``||u||_{p,q}^q = int_0^inf u*(t)^q t^{q/p - 1} dt`` (may be inf)."""
    _check_exponents(p, q)
    return u_star.power_integral(q, q / p - 1.0)


def lorentz_quasinorm(u_star: Profile, p: float, q: float) -> float:
    """Lorentz quasi-norm of a non-increasing profile."""
    return lorentz_integral(u_star, p, q) ** (1.0 / q)


def weighted_integral(profile: Profile, q: float, beta: float) -> float:
    return profile.power_integral(q, beta)


def _maximal_power(seg: PowerSum, offset: float) -> PowerSum | None:
    """Exact maximal function on a power-sum segment.

    Returns None when an exponent is at or near -1: the closed form then
    involves a logarithm or cancels catastrophically.
    """
    if any(abs(a + 1.0) < 1e-3 for a in seg.exps):
        return None
    coefs, exps, _ = seg.antiderivative_terms()
    const = offset
    if seg.lo > 0:
        const -= sum(c * seg.lo**e for c, e in zip(coefs, exps))
    new_c = [const] + coefs
    new_e = [-1.0] + [e - 1.0 for e in exps]
    return PowerSum(seg.lo, seg.hi, tuple(new_c), tuple(new_e))


def power_tail(t_end: float, value: float, slope_s: float) -> PowerSum:
    """Power-law continuation ``value * (t/t_end)**alpha`` on [t_end, inf),
    matching the value and the log-slope ``du/ds`` at t_end."""
    if value == 0.0:
        return PowerSum(t_end, math.inf, (), ())
    alpha = slope_s / value
    return PowerSum(t_end, math.inf, (value * t_end ** (-alpha),), (alpha,))


def power_head(t_start: float, value: float, slope_s: float) -> PowerSum:
    """Power-law continuation on (0, t_start]."""
    if value == 0.0:
        return PowerSum(0.0, t_start, (), ())
    alpha = slope_s / value
    return PowerSum(0.0, t_start, (value * t_start ** (-alpha),), (alpha,))


def _tabulate_maximal(seg: Segment, offset: float, per_decade: int) -> list[Segment]:
    if isinstance(seg, Hermite):
        cum = offset + np.concatenate(([0.0], np.cumsum(seg.cell_integrals())))
        U = cum / np.exp(seg.s)
        return [Hermite(seg.s, U, seg.u[:-1] - U[:-1], seg.u[1:] - U[1:])]
    if seg.lo == 0.0:
        raise PreconditionError("u* is not integrable near 0")
    hi = seg.hi if not math.isinf(seg.hi) else seg.lo * 1e40
    count = max(4, int(per_decade * math.log10(hi / seg.lo)) + 2)
    t = np.geomspace(seg.lo, hi, count)
    cum = offset + np.array([seg.integral(seg.lo, x) for x in t])
    U = cum / t
    vals = seg(t)
    out: list[Segment] = [Hermite(np.log(t), U, vals[:-1] - U[:-1], vals[1:] - U[1:])]
    if math.isinf(seg.hi):
        out.append(power_tail(hi, U[-1], vals[-1] - U[-1]))
    return out


def maximal(u_star: Profile, per_decade: int = 96) -> Profile:
    """Maximal function ``u**(t) = t^{-1} int_0^t u*``."""
    first = u_star.segments[0]
    if isinstance(first, PowerSum) and first.coefs and first.exps[0] <= -1.0:
        raise PreconditionError("u* is not integrable near 0 (exponent <= -1)")
    segs: list[Segment] = []
    offset = 0.0
    for seg in u_star.segments:
        new = _maximal_power(seg, offset) if isinstance(seg, PowerSum) else None
        if new is None:
            segs.extend(_tabulate_maximal(seg, offset, per_decade))
        else:
            segs.append(new)
        if not math.isinf(seg.hi):
            offset += seg.integral(seg.lo, seg.hi)
    return Profile(tuple(segs), nonincreasing=True)


# -- plain-text serialisation -------------------------------------------------

def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return format(float(x), ".17g")


def dump_profile(profile: Profile) -> str:
    """One segment per line: ``t_lo t_hi kind params...``."""
    lines = ["# t_lo t_hi kind params"]
    for seg in profile.segments:
        if isinstance(seg, PowerSum):
            if seg.is_zero:
                lines.append(f"{_fmt(seg.lo)} {_fmt(seg.hi)} const 0")
            elif len(seg.coefs) == 1 and seg.exps[0] == 0.0:
                lines.append(f"{_fmt(seg.lo)} {_fmt(seg.hi)} const {_fmt(seg.coefs[0])}")
            elif len(seg.coefs) == 1:
                lines.append(f"{_fmt(seg.lo)} {_fmt(seg.hi)} power {_fmt(seg.coefs[0])} {_fmt(seg.exps[0])}")
            else:
                terms = " ".join(f"{_fmt(c)} {_fmt(a)}" for c, a in zip(seg.coefs, seg.exps))
                lines.append(f"{_fmt(seg.lo)} {_fmt(seg.hi)} powersum {terms}")
        else:
            t = np.exp(seg.s)
            dl = np.append(seg.dl, seg.dr[-1])
            dr = np.insert(seg.dr, 0, seg.dl[0])
            quads = " ".join(
                f"{_fmt(a)} {_fmt(b)} {_fmt(c)} {_fmt(d)}" for a, b, c, d in zip(t, seg.u, dl, dr)
            )
            lines.append(f"{_fmt(seg.lo)} {_fmt(seg.hi)} hermite {quads}")
    return "\n".join(lines) + "\n"


def _parse_segment(lo: float, hi: float, kind: str, args: list[float]) -> Segment:
    if kind == "const":
        (c,) = args
        return PowerSum(lo, hi, (c,), (0.0,))
    if kind == "power":
        c, a = args
        return PowerSum(lo, hi, (c,), (a,))
    if kind == "linear":
        c, d = args
        return PowerSum(lo, hi, (c, d), (0.0, 1.0))
    if kind == "powersum":
        if len(args) % 2:
            raise DomainError("powersum needs coefficient/exponent pairs")
        return PowerSum(lo, hi, tuple(args[0::2]), tuple(args[1::2]))
    if kind == "tabulated":
        if len(args) % 2 or len(args) < 4:
            raise DomainError("tabulated needs at least two t/value pairs")
        t = np.asarray(args[0::2])
        u = np.asarray(args[1::2])
        if not (math.isclose(t[0], lo) and math.isclose(t[-1], hi)):
            raise DomainError("tabulated nodes must start at t_lo and end at t_hi")
        s = np.log(t)
        slopes = PchipInterpolator(s, u).derivative()(s)
        return Hermite(s, u, slopes[:-1], slopes[1:], clip=False)
    if kind == "hermite":
        if len(args) % 4 or len(args) < 8:
            raise DomainError("hermite needs t/value/left-slope/right-slope quadruples")
        arr = np.asarray(args).reshape(-1, 4)
        return Hermite(np.log(arr[:, 0]), arr[:, 1], arr[:-1, 2], arr[1:, 3])
    raise DomainError(f"unknown segment kind {kind!r}")


def parse_profile(text: str) -> Profile:
    segs: list[Segment] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise DomainError(f"line {lineno}: expected 't_lo t_hi kind params'")
        try:
            lo, hi = float(parts[0]), float(parts[1])
            args = [float(x) for x in parts[3:]]
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
        try:
            segs.append(_parse_segment(lo, hi, parts[2], args))
        except ValueError as exc:  # wrong number of parameters for the kind
            raise DomainError(f"line {lineno}: bad parameters for {parts[2]!r}: {exc}") from None
    profile = Profile(tuple(segs))
    grid = profile.sample_grid()
    vals = profile(grid)
    noninc = bool(np.all(np.diff(vals) <= 1e-14 * np.maximum(1.0, np.abs(vals[:-1]))) and vals[-1] >= 0)
    return Profile(profile.segments, nonincreasing=noninc)


def load_profile(path: str) -> Profile:
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read())

