"""The Green-type majorant ``v`` of ``u*`` and the operator ``T``.

For a maximal function ``f**`` the majorant is

    v(t) = int_t^inf s f**(s) / (n sigma_n sinh^{n-1}(F(s)))^2 ds
         = int_t^inf f**(s) phi(s)^2 / (n sigma_n)^2  ds / s,

so in the variable ``s = log t`` the integrand is smooth and bounded between
breakpoints of ``f**``.  ``v`` is tabulated as a cubic Hermite interpolant in
``log t`` whose node slopes are the exact values ``t v'(t)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import PreconditionError
from .geometry import SpaceParams, phi
from .profiles import _GL_W, _GL_X, Hermite, PowerSum, Profile, maximal, power_tail

__all__ = [
    "majorant_v",
    "majorant_slope",
    "apply_T",
    "log_grid",
    "log_quadrature",
    "PER_DECADE",
]

PER_DECADE = 96
_T_LO = 1e-16
_T_HI = 1e16


def log_grid(profile: Profile, per_decade: int = PER_DECADE) -> np.ndarray:
    """Log-spaced nodes covering the breakpoints of ``profile`` with margin."""
    br = profile.breakpoints
    br = br[np.isfinite(br) & (br > 0)]
    t_lo = min(_T_LO, 1e-12 * br.min()) if br.size else _T_LO
    t_hi = max(_T_HI, 1e12 * br.max()) if br.size else _T_HI
    s_lo, s_hi = math.log(t_lo), math.log(t_hi)
    count = int(per_decade * (s_hi - s_lo) / math.log(10.0)) + 2
    s = np.concatenate((np.linspace(s_lo, s_hi, count), np.log(br)))
    s = np.unique(s)
    # drop nodes that nearly coincide with a breakpoint
    keep = np.concatenate(([True], np.diff(s) > 1e-9))
    return s[keep]


def _kernel_log(space: SpaceParams, t: np.ndarray) -> np.ndarray:
    """phi(t)^2 / (n sigma_n)^2, the weight of f** in ``d log s``."""
    return np.exp(2.0 * (np.log(phi(space, t)) - space.log_nsigma))


def majorant_slope(f_star_star: Profile, space: SpaceParams, t) -> np.ndarray:
    """Exact ``v'(t) = -t f**(t) / (n sigma_n sinh^{n-1}(F(t)))^2``."""
    t = np.asarray(t, dtype=float)
    return -f_star_star(t) * _kernel_log(space, t) / t


def _tail_integral(f2: Profile, space: SpaceParams, s_hi: float) -> float:
    """int_{e^{s_hi}}^inf f**(s) phi^2/(n sigma)^2 ds/s."""
    tail = f2.tail
    if not isinstance(tail, PowerSum):
        raise PreconditionError("f** must end with a closed-form tail")
    if tail.is_zero:
        return 0.0
    if tail.exps[-1] >= 0:
        raise PreconditionError("f** does not decay; the majorant integral diverges")
    s_top = min(s_hi + 200.0, 700.0)

    def g(s):
        t = math.exp(s)
        return float(f2(t) * _kernel_log(space, np.array([t]))[0])

    edges = np.linspace(s_hi, s_top, 41)
    total = sum(
        integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])
    )
    # beyond e^{s_top} phi sits at its limit to double precision
    shifted = PowerSum(tail.lo, tail.hi, tail.coefs, tuple(a - 1.0 for a in tail.exps))
    total += shifted.integral(math.exp(s_top), math.inf) / (space.n - 1) ** 2
    return total


def _head_segment(t0: float, v0: float, slope0: float, gamma: float) -> PowerSum:
    """``C + B t^gamma`` on (0, t0] matching value and log-slope at t0."""
    if abs(gamma) < 1e-6:
        gamma = 1e-6
    b = slope0 / (gamma * t0**gamma)
    return PowerSum(0.0, t0, (v0 - b * t0**gamma, b), (0.0, gamma))


def majorant_v(f_star_star: Profile, space: SpaceParams, per_decade: int = PER_DECADE) -> Profile:
    """Tabulate ``v`` for the maximal function ``f**``."""
    if all(isinstance(s, PowerSum) and s.is_zero for s in f_star_star.segments):
        return Profile((PowerSum(0.0, math.inf, (), ()),), nonincreasing=True)
    s = log_grid(f_star_star, per_decade)
    t = np.exp(s)
    h = np.diff(s)
    ss = s[:-1, None] + h[:, None] * _GL_X[None, :]
    ts = np.exp(ss)
    g = f_star_star(ts) * _kernel_log(space, ts)
    cells = (g * h[:, None] * _GL_W[None, :]).sum(axis=1)
    tail = _tail_integral(f_star_star, space, float(s[-1]))
    v = tail + np.concatenate((np.cumsum(cells[::-1])[::-1], [0.0]))
    slope = -f_star_star(t) * _kernel_log(space, t)  # t v'(t)
    body = Hermite(s, v, slope[:-1], slope[1:])
    # local exponent of the integrand at the left end sets the head shape
    g0, g1 = slope[0], slope[1]
    gamma = math.log(g1 / g0) / (s[1] - s[0]) if g0 < 0 and g1 < 0 else 1.0
    segs = [_head_segment(float(t[0]), float(v[0]), float(slope[0]), gamma), body]
    segs.append(power_tail(body.hi, float(v[-1]), float(slope[-1])))
    return Profile(tuple(segs), nonincreasing=True)


def apply_T(v: Profile, space: SpaceParams, per_decade: int = PER_DECADE) -> Profile:
    """``T(v) = majorant_v(v**)``."""
    if not v.nonincreasing:
        raise PreconditionError("T acts on non-negative non-increasing profiles")
    return majorant_v(maximal(v), space, per_decade)


def log_quadrature(fn, s_nodes: np.ndarray) -> float:
    """int_0^inf fn(t) dt with Gauss-Legendre cells in ``log t``.

    Beyond the node range the integrand is extended by the power law fitted
    to the two outermost nodes; a non-integrable extension gives inf.
    """
    s = np.asarray(s_nodes, dtype=float)
    h = np.diff(s)
    ss = s[:-1, None] + h[:, None] * _GL_X[None, :]
    ts = np.exp(ss)
    vals = fn(ts) * ts
    total = float((vals * h[:, None] * _GL_W[None, :]).sum())
    ends = fn(np.exp(s[[0, 1, -2, -1]])) * np.exp(s[[0, 1, -2, -1]])
    # head: integrand (in d log t) ~ exp(kappa s) with kappa > 0 needed
    if ends[0] > 0:
        if ends[1] <= 0:
            kappa = math.inf
        else:
            kappa = math.log(ends[1] / ends[0]) / (s[1] - s[0])
        if kappa <= 0:
            return math.inf
        total += ends[0] / kappa
    if ends[3] > 0:
        if ends[2] <= 0:
            kappa = -math.inf
        else:
            kappa = math.log(ends[3] / ends[2]) / (s[-1] - s[-2])
        if kappa >= 0:
            return math.inf
        total += ends[3] / -kappa
    return total
