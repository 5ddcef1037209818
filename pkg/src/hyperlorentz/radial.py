"""Radial functions on H^n and the radial Laplace-Beltrami calculus.

A :class:`RadialFunction` is piecewise in the geodesic radius; each piece
carries a sympy expression, so derivatives of every order are exact.  On the
piece touching the origin a Taylor expansion replaces the closed form for
small radii, where ``coth`` makes the closed form cancel catastrophically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy as sp

from .errors import DomainError, PreconditionError
from .geometry import SpaceParams, ball_volume, inverse_volume, log_sinh
from .profiles import PowerSum, Profile
from .rearrangement import Atom, MonotonePiece, distribution_of, rearrange_pieces, split_monotone

__all__ = [
    "RHO",
    "RadialPiece",
    "RadialFunction",
    "bump",
    "plateau",
    "zero_function",
    "from_profile",
    "laplacian_radial",
    "grad_norm_radial",
    "nabla_m_norm",
    "distribution",
    "rearrange",
    "volume_measure",
]

RHO = sp.Symbol("rho", nonnegative=True)
TAYLOR_TERMS = 28


def _rho_coth_series(terms: int) -> np.ndarray:
    out = np.zeros(terms)
    for i in range(0, terms, 2):
        k = i // 2
        out[i] = float(sp.Integer(2) ** (2 * k) * sp.bernoulli(2 * k) / sp.factorial(2 * k))
    return out


_RHO_COTH = _rho_coth_series(TAYLOR_TERMS)


@dataclass(frozen=True, eq=False)
class RadialPiece:
    """``expr(rho)`` on ``[lo, hi)``; ``taylor`` holds ascending coefficients
    used for ``rho < taylor_radius`` when the piece starts at the origin."""

    lo: float
    hi: float
    expr: sp.Expr
    taylor: np.ndarray | None = None
    taylor_radius: float = 0.0

    @property
    def is_constant(self) -> bool:
        return not self.expr.free_symbols

    @cached_property
    def _f(self):
        return sp.lambdify(RHO, self.expr, "numpy")

    @cached_property
    def _df(self):
        return sp.lambdify(RHO, sp.diff(self.expr, RHO), "numpy")

    def _eval(self, fn, taylor, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        near = r < self.taylor_radius if taylor is not None else np.zeros(r.shape, dtype=bool)
        far = ~near
        if far.any():
            out[far] = np.broadcast_to(np.asarray(fn(r[far]), dtype=float), (int(far.sum()),))
        if near.any():
            out[near] = np.polynomial.polynomial.polyval(r[near], taylor)
        return out

    def value(self, r):
        if self.is_constant:
            return np.full(np.shape(r), float(self.expr))
        return self._eval(self._f, self.taylor, r)

    def derivative(self, r):
        if self.is_constant:
            return np.zeros(np.shape(r))
        dt = None if self.taylor is None else np.polynomial.polynomial.polyder(self.taylor)
        return self._eval(self._df, dt, r)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Piecewise radial function on H^n, zero beyond the last piece.

    With ``absolute=True`` the function represents ``|w|`` (used for norms of
    derivatives); calculus always acts on the signed expression.
    """

    space: SpaceParams
    pieces: tuple[RadialPiece, ...]
    name: str = "u"
    absolute: bool = False
    _edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if pieces and pieces[0].lo != 0.0:
            raise DomainError("first piece must start at the origin")
        for a, b in zip(pieces[:-1], pieces[1:]):
            if a.hi != b.lo:
                raise DomainError("radial pieces must be contiguous")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "_edges", np.array([p.lo for p in pieces[1:]], dtype=float))

    @property
    def support_radius(self) -> float:
        return self.pieces[-1].hi if self.pieces else 0.0

    def _dispatch(self, method, rho):
        r = np.asarray(rho, dtype=float)
        if np.any(r < 0):
            raise DomainError("geodesic radius must be >= 0")
        flat = np.atleast_1d(r).ravel()
        out = np.zeros_like(flat)
        if self.pieces:
            idx = np.searchsorted(self._edges, flat, side="right")
            inside = flat < self.support_radius
            for k in np.unique(idx[inside]):
                mask = inside & (idx == k)
                out[mask] = getattr(self.pieces[k], method)(flat[mask])
        out = out.reshape(r.shape)
        return out[()] if out.ndim == 0 else out

    def __call__(self, rho):
        val = self._dispatch("value", rho)
        return np.abs(val) if self.absolute else val

    def derivative(self, rho):
        return self._dispatch("derivative", rho)

    def with_name(self, name: str, absolute: bool | None = None) -> "RadialFunction":
        return RadialFunction(self.space, self.pieces, name, self.absolute if absolute is None else absolute)

    def scaled(self, factor: float) -> "RadialFunction":
        pieces = tuple(
            RadialPiece(p.lo, p.hi, factor * p.expr, None if p.taylor is None else factor * p.taylor, p.taylor_radius)
            for p in self.pieces
        )
        return RadialFunction(self.space, pieces, self.name, self.absolute)


def _with_taylor(space: SpaceParams, lo: float, hi: float, expr: sp.Expr) -> RadialPiece:
    if lo != 0.0 or not expr.free_symbols:
        return RadialPiece(lo, hi, expr)
    series = sp.series(expr, RHO, 0, TAYLOR_TERMS).removeO()
    poly = sp.Poly(series, RHO)
    coeffs = np.zeros(TAYLOR_TERMS)
    for (deg,), c in poly.terms():
        coeffs[deg] = float(c)
    if abs(coeffs[1]) > 1e-12 * max(1.0, np.abs(coeffs).max()):
        raise PreconditionError("radial function must satisfy u'(0) = 0 to be smooth at the origin")
    coeffs[1] = 0.0
    return RadialPiece(lo, hi, expr, coeffs, min(0.05, 0.25 * hi))


def _finalize(space, pieces, name) -> RadialFunction:
    return RadialFunction(space, tuple(pieces), name)


def bump(space: SpaceParams, rho0: float, k: int) -> RadialFunction:
    """``(1 - (rho/rho0)^2)_+^k``."""
    if rho0 <= 0 or k < 1 or int(k) != k:
        raise DomainError("bump needs rho0 > 0 and an integer k >= 1")
    expr = (1 - (RHO / sp.nsimplify(rho0)) ** 2) ** int(k)
    return _finalize(space, [_with_taylor(space, 0.0, float(rho0), sp.expand(expr))], f"bump({rho0:g},{int(k)})")


def plateau(space: SpaceParams, r1: float, r2: float) -> RadialFunction:
    """1 on ``[0, r1)``, C^3 smootherstep down to 0 on ``[r1, r2)``."""
    if not 0 < r1 < r2:
        raise DomainError("plateau needs 0 < r1 < r2")
    x = (sp.nsimplify(r2) - RHO) / (sp.nsimplify(r2) - sp.nsimplify(r1))
    step = x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3)
    pieces = [RadialPiece(0.0, float(r1), sp.Integer(1)), RadialPiece(float(r1), float(r2), sp.expand(step))]
    return _finalize(space, pieces, f"plateau({r1:g},{r2:g})")


def zero_function(space: SpaceParams) -> RadialFunction:
    return RadialFunction(space, (), "zero")


def from_profile(space: SpaceParams, profile: Profile, name: str = "file") -> RadialFunction:
    """The radial function ``u(rho) = P(V(rho))`` of a power-sum profile."""
    n = space.n
    s = sp.Symbol("s")
    vol = sp.nsimplify(n) * sp.pi ** sp.Rational(n, 2) / sp.gamma(sp.Rational(n, 2) + 1)
    vol = vol * sp.integrate(sp.sinh(s) ** (n - 1), (s, 0, RHO))
    pieces = []
    for seg in profile.segments:
        if not isinstance(seg, PowerSum):
            raise PreconditionError("only power-sum segments can be differentiated in rho")
        if math.isinf(seg.hi):
            if not seg.is_zero:
                raise PreconditionError("profile must have compact support")
            break
        lo = float(inverse_volume(space, seg.lo)) if seg.lo > 0 else 0.0
        hi = float(inverse_volume(space, seg.hi))
        expr = sum((sp.Float(c) * vol ** sp.nsimplify(a) for c, a in zip(seg.coefs, seg.exps)), sp.Integer(0))
        if lo == 0.0 and expr.free_symbols:
            raise PreconditionError("first segment must be constant to keep u smooth at the origin")
        pieces.append(RadialPiece(lo, hi, sp.sympify(expr)))
    return _finalize(space, pieces, name)


# -- differential operators ----------------------------------------------------

def _laplacian_taylor(a: np.ndarray, n: int) -> np.ndarray:
    N = len(a)
    j = np.arange(N - 2)
    second = (j + 2) * (j + 1) * a[2:]
    over_rho = (j + 2) * a[2:]  # u'(rho) / rho
    coth_term = np.convolve(_RHO_COTH[: N - 2], over_rho)[: N - 2]
    return second + (n - 1) * coth_term


def laplacian_radial(u: RadialFunction) -> RadialFunction:
    """Radial Laplace-Beltrami operator ``u'' + (n-1) coth(rho) u'``."""
    n = u.space.n
    pieces = []
    for p in u.pieces:
        d1 = sp.diff(p.expr, RHO)
        expr = sp.diff(d1, RHO) + (n - 1) * sp.coth(RHO) * d1
        taylor = None if p.taylor is None else _laplacian_taylor(p.taylor, n)
        pieces.append(RadialPiece(p.lo, p.hi, expr, taylor, p.taylor_radius))
    return RadialFunction(u.space, tuple(pieces), f"Lap[{u.name}]")


def _derivative_function(u: RadialFunction) -> RadialFunction:
    pieces = []
    for p in u.pieces:
        taylor = None if p.taylor is None else np.polynomial.polynomial.polyder(p.taylor)
        pieces.append(RadialPiece(p.lo, p.hi, sp.diff(p.expr, RHO), taylor, p.taylor_radius))
    return RadialFunction(u.space, tuple(pieces), f"d[{u.name}]")


def grad_norm_radial(u: RadialFunction) -> RadialFunction:
    """``|grad_g u|_g = |u'(rho)|`` for radial u."""
    return _derivative_function(u).with_name(f"|grad {u.name}|", absolute=True)


def nabla_m_norm(u: RadialFunction, m: int) -> RadialFunction:
    """``|nabla_g^m u|``: Laplacian powers, finished by a gradient when m is odd."""
    if int(m) != m or m < 1:
        raise DomainError("derivative order m must be an integer >= 1")
    w = u
    for _ in range(int(m) // 2):
        w = laplacian_radial(w)
    if m % 2:
        return grad_norm_radial(w).with_name(f"|nabla^{m} {u.name}|", absolute=True)
    return w.with_name(f"|nabla^{m} {u.name}|", absolute=True)


# -- rearrangement of radial functions -------------------------------------------

def volume_measure(space: SpaceParams):
    log_ns = space.log_nsigma

    def tmap(r):
        return ball_volume(space, np.asarray(r, dtype=float))

    def dtmap(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, np.exp(log_ns + (space.n - 1) * log_sinh(np.maximum(r, 1e-300))), 0.0)

    return tmap, dtmap


def _decompose(w: RadialFunction) -> tuple[list[MonotonePiece], list[Atom]]:
    tmap, dtmap = volume_measure(w.space)
    pieces: list[MonotonePiece] = []
    atoms: list[Atom] = []
    for p in w.pieces:
        if p.is_constant:
            c = abs(float(p.expr))
            if c > 0:
                mass = float(tmap(np.array([p.hi]))[0] - tmap(np.array([p.lo]))[0])
                atoms.append(Atom(c, mass))
            continue
        pieces.extend(split_monotone(p.lo, p.hi, p.value, p.derivative, tmap, dtmap))
    return pieces, atoms


def distribution(w: RadialFunction, lam) -> np.ndarray:
    """``mu_w(lam) = V_g({|w| > lam})``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0):
        raise DomainError("level must be >= 0")
    pieces, atoms = _decompose(w)
    out = distribution_of(pieces, atoms, lam_arr)
    return out.reshape(lam_arr.shape)[()] if lam_arr.ndim == 0 else out


def rearrange(w: RadialFunction) -> Profile:
    """Decreasing rearrangement ``w*`` of ``|w|`` as a profile in t."""
    pieces, atoms = _decompose(w)
    return rearrange_pieces(pieces, atoms)
