"""Floating-point theta, eta and Appell functions.

Conventions: ``q = e(tau)``, ``w = e(z)`` with ``e(x) = exp(2 pi i x)``;
``theta_1(z, tau) = i sum_{r in Z+1/2} (-1)^(r-1/2) q^(r^2/2) w^r``.
"""

from __future__ import annotations

import cmath
import math

from .special import NumericResult, cutoff, gaussian_tail, sgn_minus_E

TAU_PI = 2j * math.pi


class NearPole(ArithmeticError):
    pass


def e(x: complex) -> complex:
    return cmath.exp(TAU_PI * x)


def _check_tau(tau: complex) -> float:
    y = tau.imag
    if y <= 0:
        raise ValueError(f"need Im tau > 0, got {tau}")
    return y


def theta1(z: complex, tau: complex, tol: float = 1e-18) -> NumericResult:
    y = _check_tau(tau)
    # |term| = exp(-pi y r^2 - 2 pi r Im z)
    a, b = math.pi * y, 2 * math.pi * abs(z.imag)
    N = cutoff(a, b, tol)
    s = 0j
    for k in range(-N, N):
        r = k + 0.5
        s += (-1) ** k * e(tau * r * r / 2 + z * r)
    return NumericResult(1j * s, 2 * gaussian_tail(a, b, N))


def theta_half(kind: int, z: complex, tau: complex, tol: float = 1e-18) -> NumericResult:
    """``theta_2`` (half-integral lattice) or ``theta_3`` (integral lattice), no signs."""
    y = _check_tau(tau)
    a, b = math.pi * y, 2 * math.pi * abs(z.imag)
    N = cutoff(a, b, tol)
    off = 0.5 if kind == 2 else 0.0
    s = sum(e(tau * (k + off) ** 2 / 2 + z * (k + off)) for k in range(-N - 1, N + 1))
    return NumericResult(s, 2 * gaussian_tail(a, b, N))


def eta(tau: complex) -> complex:
    """Pentagonal-number form of the Dedekind eta function."""
    y = _check_tau(tau)
    N = cutoff(3 * math.pi * y, math.pi * y, 1e-18)
    s = sum((-1) ** n * e(tau * (3 * n * n - n) / 2) for n in range(-N, N + 1))
    return e(tau / 24) * s


def appell_numeric(ell: int, u: complex, v: complex, tau: complex, tol: float = 1e-17) -> NumericResult:
    """``A_ell(u,v,tau) = a^(ell/2) sum_n (-1)^(ell n) q^(ell n(n+1)/2) b^n / (1 - a q^n)``."""
    y = _check_tau(tau)
    if ell < 1:
        raise ValueError("level must be positive")
    a = e(u)
    # n >= 0: |term| ~ exp(-pi ell y n^2 + (2 pi Im v - pi ell y) n) / |1 - a q^n|
    # n < 0:  |term| ~ exp(-pi ell y n^2 + ...)|a|^-1 |q|^-n ...; both sides Gaussian
    slope = 2 * math.pi * (abs(v.imag) + abs(u.imag)) + 2 * math.pi * y
    N = cutoff(math.pi * ell * y, slope, tol)
    s = 0j
    for n in range(-N, N + 1):
        sign = (-1) ** (ell * n)
        if 2 * math.pi * (n * y + u.imag) >= 0:
            den = 1 - a * e(n * tau)
            term = e(tau * ell * n * (n + 1) / 2 + n * v)
        else:
            # |a q^n| > 1: divide through by a q^n so nothing overflows
            den = 1 - e(-u - n * tau)
            term = -e(tau * (ell * n * (n + 1) / 2 - n) + n * v - u)
        if abs(den) < 1e-8:
            raise NearPole(f"1 - a q^{n} = {den}")
        s += sign * term / den
    pref = cmath.exp(1j * math.pi * ell * u)
    # beyond the cutoff |1 - a q^n| >= 1/2, which the factor 4 absorbs
    bound = 4 * abs(pref) * gaussian_tail(math.pi * ell * y, slope, N + 1)
    return NumericResult(pref * s, bound)


def R(u: complex, tau: complex, tol: float = 1e-18) -> NumericResult:
    """``sum_{r in Z+1/2} (sgn r - E((r + Im u / y) sqrt(2y))) (-1)^(r-1/2) e(-r u) q^(-r^2/2)``.

    ``|sgn r - E(x)| <= exp(-pi x^2)`` once ``r`` and ``x`` share a sign, so the
    summand is below ``exp(-pi y r^2 - 2 pi r Im u - 2 pi (Im u)^2 / y)``.
    """
    y = _check_tau(tau)
    c = u.imag / y
    a, b = math.pi * y, 2 * math.pi * abs(u.imag)
    N = cutoff(a, b, tol) + int(abs(c)) + 1
    s = 0j
    for k in range(-N, N):
        r = k + 0.5
        w = sgn_minus_E(1 if r > 0 else -1, (r + c) * math.sqrt(2 * y))
        s += w * (-1) ** k * e(-r * u - tau * r * r / 2)
    return NumericResult(s, 2 * gaussian_tail(a, b, N) * math.exp(-2 * math.pi * u.imag ** 2 / y))


def appell_completed(ell: int, u: complex, v: complex, tau: complex) -> NumericResult:
    """``A + (i/2) sum_k a^k theta_1(v + k tau + (ell-1)/2, ell tau) R(ell u - v - k tau - (ell-1)/2, ell tau)``."""
    out = appell_numeric(ell, u, v, tau)
    a = e(u)
    h = (ell - 1) / 2
    for k in range(ell):
        t = theta1(v + k * tau + h, ell * tau)
        rr = R(ell * u - v - k * tau - h, ell * tau)
        out = out + (t * rr) * (0.5j * a ** k)
    return out


def mu(u: complex, v: complex, tau: complex) -> complex:
    """Level-one Lerch sum ``A_1(u, v, tau) / theta_1(v, tau)``."""
    return appell_numeric(1, u, v, tau).value / theta1(v, tau).value


def quasi_periodicity_residual(u: complex, v: complex, z: complex, tau: complex, with_i: bool = True) -> float:
    """``|mu(u+z, v+z) - mu(u, v) - c eta^3 th(u+v+z) th(z) / (th(u) th(v) th(u+z) th(v+z))|``.

    ``c = i`` by default; ``with_i=False`` tests the variant with ``c = 1``.
    """
    th = lambda x: theta1(x, tau).value
    lhs = mu(u + z, v + z, tau) - mu(u, v, tau)
    rhs = eta(tau) ** 3 * th(u + v + z) * th(z) / (th(u) * th(v) * th(u + z) * th(v + z))
    if with_i:
        rhs *= 1j
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def min_theta_distance(x: complex, tau: complex) -> float:
    """Distance from ``x`` to the lattice ``Z tau + Z`` (zeros of theta_1)."""
    y = tau.imag
    m = round(x.imag / y)
    best = math.inf
    for mm in (m - 1, m, m + 1):
        t = x - mm * tau
        best = min(best, abs(t - round(t.real)))
    return best


# ---------------------------------------------------------------------------
# rank-2 specialisations A_{ell,(alpha,beta)}(z, tau)
# ---------------------------------------------------------------------------


def _half_theta(ell: int, odd: bool, z: complex, tau: complex) -> complex:
    """``-1/2 sum_x q^(ell x^2/4) w^((ell-2) x)`` over odd or even ``x``."""
    y = tau.imag
    N = cutoff(math.pi * ell * y / 2, 2 * math.pi * abs((ell - 2) * z.imag), 1e-18)
    s = 0j
    for x in range(-2 * N - 1, 2 * N + 2):
        if (x % 2 == 1) == odd:
            s += e(tau * ell * x * x / 4 + z * (ell - 2) * x)
    return -0.5 * s


def eta3_theta1_4z(z: complex, tau: complex) -> complex:
    """``i eta^3 / theta_1(4z, tau)``."""
    return 1j * eta(tau) ** 3 / theta1(4 * z, tau).value


def appell_spec(ell: int, alpha: int, beta: int, z: complex, tau: complex) -> complex:
    """``A_{ell,(alpha,beta)}(z, tau)`` through the level-ell Appell function at ``2 tau``."""
    w = lambda k: e(k * z)
    v0 = 2 * (ell - 2) * z + ell / 2
    if beta == 1:
        if alpha == 1:
            A = appell_numeric(ell, tau + 4 * z, tau + v0, 2 * tau).value
            return e(tau * (2 - ell) / 4) * w(-ell) * A
        A = appell_numeric(ell, tau + 4 * z, v0, 2 * tau).value
        return e(-tau * ell / 4) * w(-ell - 2) * A + _half_theta(ell, True, z, tau)
    if alpha == 1:
        A = appell_numeric(ell, 4 * z, (1 - ell) * tau + v0, 2 * tau).value
        return w(2 - 2 * ell) * A + eta3_theta1_4z(z, tau)
    A = appell_numeric(ell, 4 * z, -ell * tau + v0, 2 * tau).value
    return w(-2 * ell) * A + _half_theta(ell, False, z, tau) + eta3_theta1_4z(z, tau)
