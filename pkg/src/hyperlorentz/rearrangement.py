"""Distribution functions and decreasing rearrangements.

A function is described by monotone *pieces* and flat *atoms*.  A piece is a
non-negative function ``g`` on a parameter interval ``[x_lo, x_hi]`` that is
strictly monotone there, together with a measure coordinate ``tmap`` (the
volume of ``{x' <= x}``); an atom is a level attained on a set of positive
measure.  For radial functions the parameter is the geodesic radius and
``tmap`` is the ball volume; for profiles in the volume variable ``tmap`` is
the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError, PreconditionError
from .profiles import Hermite, PowerSum, Profile

__all__ = ["MonotonePiece", "Atom", "split_monotone", "distribution_of", "rearrange_pieces"]

Func = Callable[[np.ndarray], np.ndarray]

_UNIFORM = 8193
_CLUSTER = np.geomspace(1e-12, 0.02, 1000)


@dataclass(frozen=True, eq=False)
class MonotonePiece:
    x_lo: float
    x_hi: float
    g: Func
    dg: Func
    tmap: Func
    dtmap: Func
    increasing: bool

    def samples(self, uniform: int = _UNIFORM) -> tuple[np.ndarray, np.ndarray]:
        L = self.x_hi - self.x_lo
        y = np.unique(np.concatenate((np.linspace(0.0, 1.0, uniform), _CLUSTER, 1.0 - _CLUSTER)))
        x = self.x_lo + L * y
        x[-1] = self.x_hi
        g = self.g(x)
        # enforce exact monotonicity of the table (rounding near extrema)
        g = np.maximum.accumulate(g) if self.increasing else np.minimum.accumulate(g)
        return x, g

    @property
    def measure(self) -> float:
        return float(self.tmap(np.array([self.x_hi]))[0] - self.tmap(np.array([self.x_lo]))[0])


@dataclass(frozen=True)
class Atom:
    level: float
    mass: float


def split_monotone(
    x_lo: float,
    x_hi: float,
    w: Func,
    dw: Func,
    tmap: Func,
    dtmap: Func,
    samples: int = 4097,
) -> list[MonotonePiece]:
    """Cut ``|w|`` on ``[x_lo, x_hi]`` into strictly monotone pieces."""
    x = np.linspace(x_lo, x_hi, samples)
    cuts = {x_lo, x_hi}
    for fn in (w, dw):
        vals = fn(x)
        sgn = np.sign(vals)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            cuts.add(brentq(lambda z: float(fn(np.array([z]))[0]), x[i], x[i + 1], xtol=1e-15, rtol=1e-15))
        for i in np.nonzero(sgn == 0)[0]:
            if 0 < i < samples - 1:
                cuts.add(float(x[i]))
    edges = sorted(cuts)
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-13 * max(1.0, abs(b)):
            continue
        mid = np.linspace(a, b, 7)[1:-1]
        wv, dv = w(mid), dw(mid)
        sign_w = np.sign(wv[np.argmax(np.abs(wv))])
        if sign_w == 0:
            continue
        sign_d = np.sign(dv[np.argmax(np.abs(dv))])
        if sign_d == 0:
            raise PreconditionError("flat stretch inside a non-constant piece")
        s = float(sign_w)
        pieces.append(
            MonotonePiece(
                a,
                b,
                (lambda z, f=w, s=s: s * f(z)),
                (lambda z, f=dw, s=s: s * f(z)),
                tmap,
                dtmap,
                increasing=bool(sign_w * sign_d > 0),
            )
        )
    return pieces


class _Inverter:
    """Vectorised solution of g(x) = lam on one monotone piece."""

    def __init__(self, piece: MonotonePiece):
        self.piece = piece
        x, g = piece.samples()
        if not piece.increasing:
            x, g = x[::-1], g[::-1]
        self.x, self.gv = x, g  # g ascending
        self.gmin, self.gmax = float(g[0]), float(g[-1])
        self.t_lo = float(piece.tmap(np.array([piece.x_lo]))[0])
        self.t_hi = float(piece.tmap(np.array([piece.x_hi]))[0])

    def solve(self, lam: np.ndarray) -> np.ndarray:
        x, g = self.x, self.gv
        out = np.where(lam <= self.gmin, x[0], x[-1]).astype(float)
        inside = (lam > self.gmin) & (lam < self.gmax)
        if not inside.any():
            return out
        lv = lam[inside]
        idx = np.clip(np.searchsorted(g, lv), 1, len(g) - 1)
        a, b = x[idx - 1], x[idx]
        ga, gb = g[idx - 1], g[idx]
        frac = np.where(gb > ga, (lv - ga) / np.where(gb > ga, gb - ga, 1.0), 0.5)
        xc = a + frac * (b - a)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        f, df = self.piece.g, self.piece.dg
        active = np.ones(len(lv), dtype=bool)
        for it in range(200):
            r = f(xc) - lv
            d = df(xc)
            # keep the bracket [lo, hi] around the root
            above = r > 0
            if self.piece.increasing:
                hi = np.where(above, xc, hi)
                lo = np.where(above, lo, xc)
            else:
                lo = np.where(above, xc, lo)
                hi = np.where(above, hi, xc)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = r / d
            new = xc - step
            bad = ~np.isfinite(new) | (new < lo) | (new > hi) | (it >= 60)
            new = np.where(bad, 0.5 * (lo + hi), new)
            new = np.where(r == 0, xc, new)
            tol = 1e-15 * np.maximum(np.abs(xc), 1e-300)
            conv = (np.abs(new - xc) <= tol) | (hi - lo <= tol) | (r == 0)
            xc = np.where(active, new, xc)
            active &= ~conv
            if not active.any():
                break
        else:
            raise NumericalError("level-set inversion did not converge")
        out[inside] = xc
        return out

    def measure_above(self, lam: np.ndarray, xs: np.ndarray | None = None) -> np.ndarray:
        if xs is None:
            xs = self.solve(lam)
        t = self.piece.tmap(xs)
        m = t - self.t_lo if not self.piece.increasing else self.t_hi - t
        m = np.where(lam >= self.gmax, 0.0, m)
        m = np.where(lam < self.gmin, self.t_hi - self.t_lo, m)
        return np.maximum(m, 0.0)


def distribution_of(pieces: Sequence[MonotonePiece], atoms: Sequence[Atom], lam) -> np.ndarray:
    """mu(lam) = measure of {g > lam}."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    total = np.zeros_like(lam)
    for p in pieces:
        total += _Inverter(p).measure_above(lam)
    for a in atoms:
        total += np.where(a.level > lam, a.mass, 0.0)
    return total


def rearrange_pieces(pieces: Sequence[MonotonePiece], atoms: Sequence[Atom]) -> Profile:
    """Decreasing rearrangement u* of the function described by pieces/atoms."""
    atoms = [a for a in atoms if a.mass > 0 and a.level > 0]
    for a in atoms:
        if math.isinf(a.mass):
            raise PreconditionError("superlevel set of infinite measure")
    invs = [_Inverter(p) for p in pieces]
    levels = [inv.gv for inv in invs] + [np.array([a.level for a in atoms])]
    lam = np.unique(np.concatenate(levels))[::-1]
    lam = lam[lam >= 0]
    if lam.size == 0 or lam[0] <= 0:
        return Profile((PowerSum(0.0, math.inf, (), ()),), nonincreasing=True)

    K, P = len(lam), len(invs)
    xs = np.empty((P, K))
    meas = np.zeros(K)
    for j, inv in enumerate(invs):
        xs[j] = inv.solve(lam)
        meas += inv.measure_above(lam, xs[j])
    atom_above = np.zeros(K)
    atom_at = np.zeros(K)
    for a in atoms:
        atom_above += np.where(a.level > lam, a.mass, 0.0)
        atom_at += np.where(a.level == lam, a.mass, 0.0)
    # rounding in the level-set solves can break monotonicity by a few ulps
    t_minus = np.maximum.accumulate(meas + atom_above)
    t_plus = np.maximum.accumulate(t_minus + atom_at)

    # d mu / d lam contributions of each piece at each node
    rate = np.zeros((P, K))
    for j, inv in enumerate(invs):
        with np.errstate(divide="ignore", invalid="ignore"):
            rate[j] = inv.piece.dtmap(xs[j]) / np.abs(inv.piece.dg(xs[j]))
    rate = np.where(np.isnan(rate), np.inf, rate)
    gmin = np.array([inv.gmin for inv in invs])
    gmax = np.array([inv.gmax for inv in invs])

    segs: list = []
    group: dict[str, list[float]] = {"t": [], "u": [], "dl": [], "dr": []}

    def flush():
        if len(group["t"]) >= 2:
            segs.append(Hermite(np.log(group["t"]), group["u"], group["dl"], group["dr"]))
        for key in group:
            group[key] = []

    def slope(active, k, t):
        mu_rate = rate[active, k].sum() if active.any() else 0.0
        if mu_rate <= 0:
            raise PreconditionError("flat level set inside a monotone piece")
        return -t / mu_rate if np.isfinite(mu_rate) else 0.0

    for k in range(K):
        if atom_at[k] > 0:
            flush()
            segs.append(PowerSum(float(t_minus[k]), float(t_plus[k]), (float(lam[k]),), (0.0,)))
        if k == K - 1:
            break
        t0, t1 = float(t_plus[k]), float(t_minus[k + 1])
        if t1 - t0 <= 1e-13 * t1:
            flush()
            continue
        if t0 == 0.0:
            segs.append(PowerSum(0.0, t1, (float(lam[k + 1]),), (0.0,)))
            continue
        active = (gmin < lam[k]) & (gmax > lam[k + 1])
        if not group["t"]:
            group["t"].append(t0)
            group["u"].append(float(lam[k]))
        group["t"].append(t1)
        group["u"].append(float(lam[k + 1]))
        group["dl"].append(slope(active, k, t0))
        group["dr"].append(slope(active, k + 1, t1))
    flush()
    t_end = float(t_plus[-1])
    if math.isinf(t_end):
        raise PreconditionError("function does not vanish at infinity")
    if not segs:
        segs.append(PowerSum(0.0, t_end, (float(lam[0]),), (0.0,)))
    segs = _fill_gaps(segs)
    segs.append(PowerSum(t_end, math.inf, (), ()))
    return Profile(tuple(segs), nonincreasing=True)


def _fill_gaps(segs: list) -> list:
    """Join segments exactly (first one starts at 0, no overlaps)."""
    out = []
    cur = 0.0
    for seg in segs:
        if isinstance(seg, PowerSum):
            seg = PowerSum(cur, seg.hi, seg.coefs, seg.exps)
        elif cur == 0.0:
            # Hermite starting above 0 with nothing before: hold its first value
            out.append(PowerSum(0.0, seg.lo, (float(seg.u[0]),), (0.0,)))
        elif seg.lo != cur:
            # absorb the width of skipped near-degenerate cells
            s = np.array(seg.s, dtype=float)
            s[0] = math.log(cur)
            seg = Hermite(s, seg.u, seg.dl, seg.dr)
        out.append(seg)
        cur = seg.hi
    return out
