"""Sharp Poincare constants C(n,m,p), Sobolev-improvement constants S(n,m,p)
and the exponent bookkeeping behind them."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedError
from .geometry import unit_ball_volume

__all__ = [
    "ExponentSet",
    "conjugate",
    "sobolev_exponent",
    "poincare_constant",
    "sobolev_constant",
    "sobolev_constant_factors",
    "lorentz_sobolev_constant_lq",
]


def _check_n(n) -> int:
    if int(n) != n or n < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def _check_m(m) -> int:
    if int(m) != m or m < 1:
        raise DomainError(f"derivative order must be an integer >= 1, got {m!r}")
    return int(m)


def _check_p(p) -> float:
    p = float(p)
    if not (1.0 < p < math.inf):
        raise DomainError(f"need 1 < p < inf, got {p}")
    return p


def conjugate(p: float) -> float:
    """Hoelder conjugate p' = p/(p-1)."""
    p = _check_p(p)
    return p / (p - 1.0)


def sobolev_exponent(n: int, p: float, i: int) -> float:
    """p_i* = np/(n - ip), defined while ip < n."""
    n, p = _check_n(n), _check_p(p)
    if n - i * p <= 0:
        raise DomainError(f"p_{i}* undefined: {i}*p >= n")
    return n * p / (n - i * p)


@dataclass(frozen=True)
class ExponentSet:
    """Derivative order and Lorentz exponents for a fixed dimension."""

    n: int
    m: int
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "n", _check_n(self.n))
        object.__setattr__(self, "m", _check_m(self.m))
        object.__setattr__(self, "p", _check_p(self.p))
        q = float(self.q)
        if not (1.0 <= q < math.inf):
            raise DomainError(f"need 1 <= q < inf, got {q}")
        object.__setattr__(self, "q", q)

    @property
    def p_prime(self) -> float:
        return conjugate(self.p)

    def p_star(self, i: int) -> float:
        return sobolev_exponent(self.n, self.p, i)

    @property
    def q_threshold(self) -> float:
        """2n/(n-1), the lower bound on q for the improved inequalities."""
        return 2.0 * self.n / (self.n - 1)

    @property
    def poincare_valid(self) -> bool:
        return self.m % 2 == 0 or self.q <= self.p

    @property
    def sobolev_valid(self) -> bool:
        return self.poincare_valid and self.q >= self.q_threshold and self.p < self.n / self.m

    def sobolev_issues(self) -> list[str]:
        """Unmet hypotheses of the Poincare-Sobolev inequality, as text."""
        issues = []
        if self.m % 2 and self.q > self.p:
            issues.append("q > p with m odd")
        if self.q < self.q_threshold:
            issues.append(f"q < 2n/(n-1) = {self.q_threshold:g}")
        if self.p >= self.n / self.m:
            issues.append("p >= n/m")
        return issues


def poincare_constant(n: int, m: int, p: float) -> float:
    """C(n,m,p): ((n-1)^2/(pp'))^{m/2}, with a leading (n-1)/p for odd m."""
    n, m, p = _check_n(n), _check_m(m), _check_p(p)
    base = (n - 1) ** 2 / (p * conjugate(p))
    if m % 2 == 0:
        return base ** (m // 2)
    return (n - 1) / p * base ** ((m - 1) // 2)


def _order2_factor(n: int, r: float) -> float:
    """n(n - 2r)/(r r'), the order-two improvement factor at exponent r."""
    return n * (n - 2.0 * r) / (r * conjugate(r))


def sobolev_constant_factors(n: int, m: int, p: float) -> list[float]:
    """The individual factors of S(n,m,p) without the sigma_n power."""
    n, m, p = _check_n(n), _check_m(m), _check_p(p)
    if p >= n / m:
        raise DomainError(f"S(n,m,p) needs p < n/m = {n / m:g}")
    if m % 2 == 0:
        return [_order2_factor(n, sobolev_exponent(n, p, 2 * i)) for i in range(m // 2)]
    k = (m - 1) // 2
    return [(n - p) / p] + [_order2_factor(n, sobolev_exponent(n, p, 2 * i - 1)) for i in range(1, k + 1)]


def sobolev_constant(n: int, m: int, p: float) -> float:
    """S(n,m,p) = sigma_n^{m/n} times the product of the order factors."""
    factors = sobolev_constant_factors(n, m, p)
    if any(f <= 0 for f in factors):
        raise DomainError("a factor of S(n,m,p) is not positive")
    return unit_ball_volume(n) ** (m / n) * math.prod(factors)


def lorentz_sobolev_constant_lq(n: int, p: float, q: float, l: float) -> float:
    """First-order Lorentz-Sobolev constant; only the branch l = q exists here."""
    n, p = _check_n(n), _check_p(p)
    if not (1.0 <= q < math.inf):
        raise DomainError(f"need 1 <= q < inf, got {q}")
    if l != q:
        raise UnsupportedError("unsupported: external fractional-dimension constant (l != q)")
    if p >= n:
        raise DomainError("need p < n")
    return unit_ball_volume(n) ** (1.0 / n) * (n - p) / p
