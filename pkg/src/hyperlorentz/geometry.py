"""Volume function of geodesic balls in H^n, its inverse F, and the ratio phi.

Everything that involves ``sinh^{n-1}`` of a radius is carried in log domain
so that volumes up to ~1e300 can be handled for any dimension.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb, gamma, log, pi

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "SpaceParams",
    "unit_ball_volume",
    "ball_volume",
    "log_ball_volume",
    "inverse_volume",
    "log_sinh",
    "log_sinh_F",
    "phi",
    "phi_limit",
    "eta",
]

_SERIES_TERMS = 40
_SERIES_MAX = 1.0
_EXPANSION_MIN = 3.0


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in R^n."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return pi ** (n / 2) / gamma(n / 2 + 1)


def log_sinh(x):
    """``log(sinh(x))`` for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > 20.0
    small = ~big
    out[big] = x[big] - log(2.0) + np.log1p(-np.exp(-2.0 * x[big]))
    xs = x[small]
    with np.errstate(divide="ignore"):
        out[small] = np.log(xs) + np.log(np.sinh(xs) / np.where(xs > 0, xs, 1.0))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SpaceParams:
    """Dimension of H^n together with the derived constant sigma_n."""

    n: int
    sigma_n: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"H^n needs an integer n >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "sigma_n", unit_ball_volume(self.n))

    @cached_property
    def _series(self) -> np.ndarray:
        # int_0^r sinh^m = r^{m+1} * sum_j c_j r^{2j}
        m = self.n - 1
        j = np.arange(_SERIES_TERMS)
        base = np.array([1.0 / gamma(2 * k + 2) for k in j])
        coef = np.zeros(_SERIES_TERMS)
        coef[0] = 1.0
        for _ in range(m):
            coef = np.convolve(coef, base)[:_SERIES_TERMS]
        return coef / (m + 1 + 2 * j)

    @cached_property
    def _expansion(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.n - 1
        k = np.arange(m + 1)
        sign_binom = np.array([(-1) ** int(i) * comb(m, int(i)) for i in k], dtype=float)
        denom = (m - 2 * k).astype(float)
        return k, sign_binom, denom

    @property
    def log_nsigma(self) -> float:
        return log(self.n * self.sigma_n)

    def __repr__(self):
        return f"SpaceParams(n={self.n})"


def _log_sinh_integral(space: SpaceParams, rho: np.ndarray) -> np.ndarray:
    """log of int_0^rho sinh^{n-1}(s) ds for rho > 0."""
    m = space.n - 1
    out = np.empty_like(rho)

    small = rho < _SERIES_MAX
    if small.any():
        r = rho[small]
        poly = np.polynomial.polynomial.polyval(r * r, space._series)
        out[small] = (m + 1) * np.log(r) + np.log(poly)

    mid = (~small) & (rho < _EXPANSION_MIN)
    if mid.any():
        r = rho[mid]
        sh, ch = np.sinh(r), np.cosh(r)
        if m % 2 == 0:
            acc, start = r.copy(), 2
        else:
            acc, start = ch - 1.0, 3
        for j in range(start, m + 1, 2):
            acc = sh ** (j - 1) * ch / j - (j - 1) / j * acc
        out[mid] = np.log(acc)

    large = rho >= _EXPANSION_MIN
    if large.any():
        r = rho[large][:, None]
        k, sb, denom = space._expansion
        e_m = np.exp(-m * r)
        safe = np.where(denom == 0, 1.0, denom)
        terms = np.where(denom == 0, r * e_m, (np.exp(-2.0 * k * r) - e_m) / safe)
        s = (sb * terms).sum(axis=1)
        out[large] = m * rho[large] - m * log(2.0) + np.log(s)
    return out


def log_ball_volume(space: SpaceParams, rho):
    """log V_g(B(0, rho)); -inf at rho = 0."""
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("geodesic radius must be >= 0")
    flat = np.atleast_1d(r).ravel()
    out = np.full(flat.shape, -np.inf)
    pos = flat > 0
    if pos.any():
        out[pos] = space.log_nsigma + _log_sinh_integral(space, flat[pos])
    out = out.reshape(r.shape)
    return out[()] if out.ndim == 0 else out


def ball_volume(space: SpaceParams, rho):
    """Hyperbolic volume of the geodesic ball of radius rho (inf on overflow)."""
    with np.errstate(over="ignore"):
        return np.exp(log_ball_volume(space, rho))


def _inverse_log_volume(space: SpaceParams, logt: np.ndarray) -> np.ndarray:
    n, sigma = space.n, space.sigma_n
    # both seeds are lower bounds of F(t); log V is concave and increasing in
    # rho, so Newton from below increases monotonically to the root
    seed_small = np.arcsinh(np.exp((logt - log(sigma)) / n))
    seed_large = (logt + log(n - 1) + (n - 1) * log(2.0) - log(n * sigma)) / (n - 1)
    upper = np.exp((logt - log(sigma)) / n)
    rho = np.maximum(seed_small, seed_large)
    rho = np.where(np.isfinite(rho), rho, seed_large)
    for _ in range(100):
        lv = log_ball_volume(space, rho)
        # d/drho log V = n sigma sinh^{n-1} / V
        dlog = np.exp(space.log_nsigma + (n - 1) * log_sinh(rho) - lv)
        step = (logt - lv) / dlog
        new = np.minimum(rho + step, upper)
        new = np.where(new > 0, new, 0.5 * rho)
        # converged when the step is an ulp or the residual is at rounding level
        done = (np.abs(new - rho) <= 2e-15 * np.maximum(rho, 1e-300)) | (
            np.abs(logt - lv) <= 8.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(logt))
        )
        rho = new
        if done.all():
            return rho
    raise NumericalError("inverse_volume: Newton iteration did not converge")


def inverse_volume(space: SpaceParams, t):
    """Geodesic radius F(t) of the ball of volume t."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0) or np.any(np.isnan(tt)):
        raise DomainError("volume must be >= 0")
    flat = np.atleast_1d(tt).ravel()
    out = np.zeros(flat.shape)
    pos = flat > 0
    if pos.any():
        out[pos] = _inverse_log_volume(space, np.log(flat[pos]))
    out = out.reshape(tt.shape)
    return out[()] if out.ndim == 0 else out


def _require_positive(t, what="t"):
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{what} must be > 0")
    return arr


def log_sinh_F(space: SpaceParams, t):
    """log sinh(F(t)) for t > 0."""
    return log_sinh(inverse_volume(space, _require_positive(t)))


def phi(space: SpaceParams, t):
    """phi(t) = t / sinh^{n-1}(F(t)), increasing towards n sigma_n / (n-1)."""
    tt = _require_positive(t)
    with np.errstate(over="ignore"):
        return np.exp(np.log(tt) - (space.n - 1) * log_sinh_F(space, tt))


def phi_limit(space: SpaceParams) -> float:
    return space.n * space.sigma_n / (space.n - 1)


def eta(space: SpaceParams, rho):
    """int_0^rho sinh^{n-1} / sinh^{n-1}(rho); equals phi(V(rho)) / (n sigma_n)."""
    r = _require_positive(rho, "rho")
    flat = np.atleast_1d(r).ravel()
    out = np.exp(_log_sinh_integral(space, flat) - (space.n - 1) * log_sinh(flat))
    out = out.reshape(r.shape)
    return out[()] if out.ndim == 0 else out

