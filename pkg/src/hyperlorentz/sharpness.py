"""Extremal family f_R and ratio experiments for the sharp constant C(n,m,p).

For even ``m = 2k`` the test function ``u_R`` satisfies ``(-Delta_g)^k u_R =
f_R(V(rho))`` and ``v_{R,k} = T^k f_R`` majorises ``u_R*``, so
``||f_R||^q / ||v_{R,k}||^q`` bounds the Rayleigh-type quotient from above.
For odd ``m = 2k+1`` the numerator becomes the Lorentz norm of
``|grad (f_R o V)| = |f_R'(t)| n sigma_n sinh^{n-1}(F(t))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .constants import ExponentSet, poincare_constant
from .errors import DomainError
from .geometry import SpaceParams, inverse_volume, log_sinh_F, phi, phi_limit
from .kernels import PER_DECADE, apply_T
from .profiles import PowerSum, Profile, lorentz_integral
from .rearrangement import rearrange_pieces, split_monotone

__all__ = [
    "choose_a",
    "make_fR",
    "fR_tail_integral",
    "fR_lorentz_identity",
    "iterate_vR",
    "gradient_norm_q",
    "SharpnessResult",
    "sharpness_ratio",
    "run_sharpness",
    "DEFAULT_R_SCHEDULE",
    "SHARPNESS_COLUMNS",
]

DEFAULT_R_SCHEDULE = (1e2, 1e4, 1e6)
SHARPNESS_COLUMNS = ("n", "m", "p", "q", "epsilon", "a", "R", "ratio", "C_pow_q", "ratio_over_target", "status")


def choose_a(space: SpaceParams, epsilon: float) -> float:
    """Smallest s with phi(s) >= n sigma_n / ((1+eps)(n-1)), by bisection in log s."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    target = math.log(phi_limit(space) / (1.0 + epsilon))

    def gap(s):
        return float(np.log(phi(space, np.array([math.exp(s)]))[0])) - target

    lo, hi = -50.0, 50.0
    while gap(hi) < 0:
        hi += 50.0
        if hi > 700:
            raise DomainError("epsilon too small for double precision")
    s = optimize.bisect(gap, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(s)


def make_fR(a: float, R: float, p: float) -> Profile:
    """Flat on (0,a), t^{-1/p} on [a,R), linear taper to 0 on [R,2R)."""
    if not (0 < a < R):
        raise DomainError(f"need 0 < a < R, got a={a}, R={R}")
    if not p > 1:
        raise DomainError("need p > 1")
    c = R ** (-1.0 / p)
    segs = (
        PowerSum(0.0, a, (a ** (-1.0 / p),), (0.0,)),
        PowerSum(a, R, (1.0,), (-1.0 / p,)),
        PowerSum(R, 2 * R, (2 * c, -c / R), (0.0, 1.0)),
        PowerSum(2 * R, math.inf, (), ()),
    )
    return Profile(segs, nonincreasing=True)


def fR_tail_integral(p: float, q: float) -> float:
    """int_1^2 (2-s)^q s^{q/p-1} ds."""
    val, _ = integrate.quad(lambda s: (2 - s) ** q * s ** (q / p - 1), 1.0, 2.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def fR_lorentz_identity(a: float, R: float, p: float, q: float) -> float:
    """||f_R||_{p,q}^q = p/q + ln(R/a) + int_1^2 (2-s)^q s^{q/p-1} ds."""
    if not (0 < a < R):
        raise DomainError(f"need 0 < a < R, got a={a}, R={R}")
    if q < 1:
        raise DomainError("need q >= 1")
    return p / q + math.log(R / a) + fR_tail_integral(p, q)


def iterate_vR(fR: Profile, k: int, space: SpaceParams, per_decade: int = PER_DECADE) -> Profile:
    """v_{R,k} = T^k f_R."""
    if int(k) != k or k < 0:
        raise DomainError("k must be a non-negative integer")
    v = fR
    for _ in range(int(k)):
        v = apply_T(v, space, per_decade)
    return v


def gradient_norm_q(space: SpaceParams, a: float, R: float, p: float, q: float, p_norm: float | None = None) -> float:
    """Lorentz norm (q-th power) of |grad (f_R o V)|, computed in the volume variable.

    On (a, R) the gradient is ``t^{-1/p-1} W(t)/p`` and on (R, 2R) it is
    ``R^{-1/p-1} W(t)`` with ``W = n sigma_n sinh^{n-1}(F)``; both are
    monotone in t and ``dW/dt = (n-1) coth F``.
    """
    n = space.n
    pn = p if p_norm is None else p_norm

    def W(t):
        return np.exp(space.log_nsigma + (n - 1) * log_sinh_F(space, t))

    def dW(t):
        return (n - 1) / np.tanh(inverse_volume(space, t))

    # parametrise by x = log t so that sampling is uniform in log t
    def g1(x):
        t = np.exp(x)
        return t ** (-1.0 / p - 1.0) * W(t) / p

    def dg1(x):
        t = np.exp(x)
        return t * (t ** (-1.0 / p - 1.0) / p) * ((-1.0 / p - 1.0) * W(t) / t + dW(t))

    cR = R ** (-1.0 / p - 1.0)

    def g2(x):
        return cR * W(np.exp(x))

    def dg2(x):
        t = np.exp(x)
        return cR * t * dW(t)

    tmap = np.exp
    pieces = split_monotone(math.log(a), math.log(R), g1, dg1, tmap, tmap)
    pieces += split_monotone(math.log(R), math.log(2 * R), g2, dg2, tmap, tmap)
    star = rearrange_pieces(pieces, [])
    return lorentz_integral(star, pn, q)


@dataclass(frozen=True)
class SharpnessResult:
    n: int
    m: int
    p: float
    q: float
    epsilon: float
    a: float
    R: float
    ratio: float
    C_pow_q: float
    status: str
    note: str = ""

    @property
    def ratio_over_target(self) -> float:
        return self.ratio / self.C_pow_q

    def row(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "q": self.q,
            "epsilon": self.epsilon,
            "a": self.a,
            "R": self.R,
            "ratio": self.ratio,
            "C_pow_q": self.C_pow_q,
            "ratio_over_target": self.ratio_over_target,
            "status": self.status,
        }


def sharpness_ratio(n: int, m: int, p: float, q: float, a: float, R: float, per_decade: int = PER_DECADE) -> float:
    """Quotient ||nabla^m u_R||^q / ||u_R||^q realised through f_R and T^k f_R."""
    space = SpaceParams(n)
    ExponentSet(n, m, p, q)
    k = m // 2
    fR = make_fR(a, R, p)
    den = lorentz_integral(iterate_vR(fR, k, space, per_decade), p, q)
    if m % 2 == 0:
        num = fR_lorentz_identity(a, R, p, q)
    else:
        num = gradient_norm_q(space, a, R, p, q)
    return num / den


def run_sharpness(
    n: int,
    m: int,
    p: float,
    q: float,
    epsilon: float = 0.01,
    R_values=DEFAULT_R_SCHEDULE,
    per_decade: int = PER_DECADE,
) -> list[SharpnessResult]:
    """The ratio experiment over an R schedule with a chosen from epsilon."""
    space = SpaceParams(n)
    ex = ExponentSet(n, m, p, q)
    c_q = poincare_constant(n, m, p) ** q
    a = choose_a(space, epsilon)
    out = []
    for R in R_values:
        R = float(R)
        if not a < R:
            out.append(
                SharpnessResult(n, m, p, q, epsilon, a, R, math.nan, c_q, "unsupported", "unsupported: R <= a for this epsilon")
            )
            continue
        ratio = sharpness_ratio(n, m, p, q, a, R, per_decade)
        status = "holds" if ratio >= c_q * (1 - 1e-8) else "violated"
        note = "" if ex.poincare_valid else "outside the odd-m range q <= p"
        out.append(SharpnessResult(n, m, p, q, epsilon, a, R, ratio, c_q, status, note))
    return out
