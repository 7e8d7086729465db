"""Special functions for the non-holomorphic completions.

``E(x) = 2 int_0^x exp(-pi u^2) du = erf(sqrt(pi) x)`` and
``beta_nu(x) = int_x^oo u^-nu exp(-pi u) du``; both reduce to the error
function from the standard library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class NumericResult:
    """A complex value with a bound on the neglected tail of its series."""

    value: complex
    tail_bound: float = 0.0

    def __complex__(self) -> complex:
        return complex(self.value)

    def __add__(self, other):
        if isinstance(other, NumericResult):
            return NumericResult(self.value + other.value, self.tail_bound + other.tail_bound)
        return NumericResult(self.value + other, self.tail_bound)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, NumericResult):
            return NumericResult(self.value - other.value, self.tail_bound + other.tail_bound)
        return NumericResult(self.value - other, self.tail_bound)

    def __mul__(self, c):
        if isinstance(c, NumericResult):
            v = self.value * c.value
            b = abs(self.value) * c.tail_bound + abs(c.value) * self.tail_bound + self.tail_bound * c.tail_bound
            return NumericResult(v, b)
        return NumericResult(self.value * c, self.tail_bound * abs(c))

    __rmul__ = __mul__


def E(x: float) -> float:
    return math.erf(math.sqrt(math.pi) * x)


def sgn_minus_E(s: int, x: float) -> float:
    """``s - E(x)`` without cancellation when ``s = sgn(x)``."""
    if x > 0:
        return (s - 1) + math.erfc(math.sqrt(math.pi) * x)
    if x < 0:
        return (s + 1) - math.erfc(-math.sqrt(math.pi) * x)
    return float(s)


def erfcx(t: float) -> float:
    """``exp(t^2) erfc(t)`` for ``t >= 0``; asymptotic series past ``t = 20``."""
    if t < 0:
        raise DomainError("erfcx is only needed for t >= 0")
    if t <= 20:
        return math.exp(t * t) * math.erfc(t)
    u = 1 / (2 * t * t)
    # 1 - u + 3u^2 - 15u^3 + ...; the first omitted term is below 1e-15
    s, term = 1.0, 1.0
    for k in range(1, 7):
        term *= -(2 * k - 1) * u
        s += term
    return s / (t * math.sqrt(math.pi))


def sgn_minus_E_exp(s: int, x: float, c: float) -> float:
    """``(s - E(x)) exp(c)``, finite whenever the product is.

    Lattice sums pair ``s - E(x)``, which can underflow, with Gaussian factors
    that overflow at large ``Im tau``.
    """
    if s and (x > 0) == (s > 0) and x != 0:
        return s * erfcx(math.sqrt(math.pi) * abs(x)) * math.exp(c - math.pi * x * x)
    return sgn_minus_E(s, x) * math.exp(c)


def beta_half(x: float) -> float:
    """``beta_{1/2}(x) = erfc(sqrt(pi x))``; ``beta_{1/2}(0) = 1``."""
    if x < 0:
        raise DomainError(f"beta_1/2 needs x >= 0, got {x}")
    return math.erfc(math.sqrt(math.pi * x))


def beta_three_halves(x: float) -> float:
    if x <= 0:
        raise DomainError(f"beta_3/2 diverges at x = {x}")
    return 2 * math.exp(-math.pi * x) / math.sqrt(x) - 2 * math.pi * beta_half(x)


def beta_nu(nu, x: float) -> float:
    if nu in (0.5, "1/2"):
        return beta_half(x)
    if nu in (1.5, "3/2"):
        return beta_three_halves(x)
    raise DomainError(f"beta_nu implemented for nu = 1/2, 3/2 only, got {nu}")


def t_beta_three_halves(t: float, y: float) -> float:
    """``|t| beta_{3/2}(t^2 y)``, continued to ``2/sqrt(y)`` at ``t = 0``."""
    t = abs(t)
    return 2 * math.exp(-math.pi * t * t * y) / math.sqrt(y) - 2 * math.pi * t * beta_half(t * t * y)


def gaussian_tail(a: float, b: float, start: int) -> float:
    """Bound on ``sum_{n >= start} exp(-a n^2 + b n)`` for ``a > 0``.

    Consecutive ratios are at most ``rho = exp(-a(2 start + 1) + b)``; once
    ``rho < 1`` the tail is below a geometric series.
    """
    if a <= 0:
        raise DomainError("need a positive Gaussian coefficient")
    n = max(start, 0)
    while -a * (2 * n + 1) + b >= 0:
        n += 1
    head = sum(math.exp(-a * k * k + b * k) for k in range(max(start, 0), n))
    rho = math.exp(-a * (2 * n + 1) + b)
    return head + math.exp(-a * n * n + b * n) / (1 - rho)


def cutoff(a: float, b: float, tol: float = 1e-18, scale: float = 1.0) -> int:
    """Smallest N with ``gaussian_tail(a, b, N + 1) < tol * scale``."""
    N = 1
    while gaussian_tail(a, b, N + 1) >= tol * max(scale, 1e-300):
        N += 1
    return N
