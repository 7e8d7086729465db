"""Level-ell Appell series specialised to the rank-2 generating functions."""

from __future__ import annotations

import math
from fractions import Fraction

from ..qseries import PoleSeries, QSeries, WLaurent, eta_pow, theta1_inv


class UnsupportedEll(ValueError):
    pass


def _geometric(k: int, qmax) -> tuple[QSeries, bool]:
    """Expansion of ``1 / (1 - q**k w**4)`` in non-negative q powers.

    Returns ``(series, is_pole)``; for ``k == 0`` the pole part is signalled
    and the caller divides by ``w**2 - w**-2`` (``1/(1-w^4) = -w^-2/(w^2-w^-2)``).
    """
    if k == 0:
        return QSeries.monomial(0, -2, -1), True
    terms = {}
    if k > 0:
        j = 0
        while k * j <= qmax:
            terms[k * j] = WLaurent({4 * j: 1})
            j += 1
    else:
        j = 1
        while -k * j <= qmax:
            terms[-k * j] = WLaurent({-4 * j: -1})
            j += 1
    return QSeries(terms, qmax), False


def _appell_sum(ell: int, lead_e, lead_k: int, quad, lin, wstep: int, geo_shift: int,
                qmax) -> tuple[QSeries, QSeries]:
    """``q^lead_e w^lead_k sum_n q^(quad n^2 + lin n) w^(wstep n) / (1 - q^(2n+geo_shift) w^4)``.

    Returns (regular part, coefficient of the pole ``1/(w^2-w^-2)``).
    """
    qmax = Fraction(qmax)
    reg: dict = {}
    pole = QSeries.zero(qmax)
    regular = QSeries.zero(qmax)
    n_max = 2
    while quad * n_max * n_max - (abs(lin) + 2) * n_max + lead_e <= qmax + 2:
        n_max += 1
    for n in range(-n_max, n_max + 1):
        e = lead_e + quad * n * n + lin * n
        k = 2 * n + geo_shift
        low = e + (-k if k < 0 else 0)
        if low > qmax:
            continue
        geo, is_pole = _geometric(k, qmax - e)
        term = geo.shift(e, lead_k + wstep * n)
        if is_pole:
            pole = pole + term
        else:
            regular = regular + term
    del reg
    return regular.truncate(qmax), pole.truncate(qmax)


def _half_theta_sum(ell: int, odd: bool, qmax) -> QSeries:
    """``-1/2 sum_n q^(ell x^2/4) w^((ell-2) x)`` over odd x or even x = 2n."""
    qmax = Fraction(qmax)
    terms: dict = {}
    X = 2 * math.isqrt(int(4 * qmax / ell) + 1) + 3
    for x in range(-X, X + 1):
        if (x % 2 == 1) != odd:
            continue
        e = Fraction(ell * x * x, 4)
        if e > qmax:
            continue
        p = WLaurent({(ell - 2) * x: Fraction(-1, 2)})
        terms[e] = terms[e] + p if e in terms else p
    return QSeries(terms, qmax)


def eta3_over_theta1_4z(qmax) -> PoleSeries:
    """``i eta^3 / theta_1(4z, tau)``; denominator ``w^2 - w^-2``."""
    qmax = Fraction(qmax)
    inv = theta1_inv(4, qmax - Fraction(1, 8))
    return PoleSeries(inv.den, inv.body * eta_pow(3, qmax + Fraction(1, 8)))


def appell_A(ell: int, alpha: int, beta: int, qmax) -> QSeries | PoleSeries:
    """``A_{ell,(alpha,beta)}(z, tau)`` exact up to ``q**qmax``.

    ``beta == 1`` gives a ``QSeries``; ``beta == 0`` a ``PoleSeries`` over
    ``w^2 - w^-2`` (the n = 0 geometric term and the eta^3/theta_1 term).
    """
    if ell < 1:
        raise UnsupportedEll(f"A_{{ell,(alpha,beta)}} needs ell >= 1, got {ell}")
    if alpha not in (0, 1) or beta not in (0, 1):
        raise ValueError("alpha, beta must be 0 or 1")
    qmax = Fraction(qmax)
    if beta == 1:
        if alpha == 1:
            reg, pole = _appell_sum(
                ell, Fraction(ell + 2, 4), ell, ell, ell + 1, 2 * (ell - 2), 1, qmax
            )
            return reg
        reg, pole = _appell_sum(
            ell, Fraction(ell, 4), ell - 2, ell, ell, 2 * (ell - 2), 1, qmax
        )
        return reg + _half_theta_sum(ell, True, qmax)
    if alpha == 1:
        reg, pole = _appell_sum(ell, Fraction(0), 2, ell, 1, 2 * (ell - 2), 0, qmax)
    else:
        reg, pole = _appell_sum(ell, Fraction(0), 0, ell, 0, 2 * (ell - 2), 0, qmax)
        reg = reg + _half_theta_sum(ell, False, qmax)
    sinh2 = WLaurent.sinh(2)
    out = PoleSeries((2,), reg.mul_laurent(sinh2) + pole)
    return out + eta3_over_theta1_4z(qmax)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def _box_add(terms: dict, e, k: int, c, qmax) -> None:
    if e <= qmax:
        p = WLaurent({k: c})
        terms[e] = terms[e] + p if e in terms else p


def _geometric_box(terms, e0, k0, step_e: int, qmax, box: int, c=1) -> None:
    """Add ``c q^e0 w^k0 / (1 - q^step_e w^4)`` term by term, ``|j| <= box``."""
    if step_e > 0:
        for j in range(0, box + 1):
            _box_add(terms, e0 + step_e * j, k0 + 4 * j, c, qmax)
    else:
        # 1/(1-x) = -sum_{j>=1} x^-j for |x| > 1
        for j in range(1, box + 1):
            _box_add(terms, e0 - step_e * j, k0 - 4 * j, -c, qmax)


def appell_A_box(ell: int, alpha: int, beta: int, qmax, box: int = 60) -> tuple[QSeries, QSeries]:
    """Box enumeration of ``A_{ell,(alpha,beta)}`` over ``|n|, |j| <= box``.

    Returns ``(regular, pole)`` with ``A = regular + pole / (w^2 - w^-2) + [beta = 0] i eta^3 / theta_1(4z)``.
    """
    qmax = Fraction(qmax)
    reg: dict = {}
    pole: dict = {}
    for n in range(-box, box + 1):
        kw = 2 * (ell - 2) * n
        if beta == 1:
            if alpha == 1:
                e0, k0 = Fraction(ell + 2, 4) + ell * n * (n + 1) + n, ell + kw
            else:
                e0, k0 = Fraction(ell, 4) + ell * n * (n + 1), ell - 2 + kw
                x = 2 * n + 1
                _box_add(reg, Fraction(ell * x * x, 4), (ell - 2) * x, Fraction(-1, 2), qmax)
            _geometric_box(reg, e0, k0, 2 * n + 1, qmax, box)
            continue
        if alpha == 1:
            e0, k0 = Fraction(ell * n * n + n), 2 + kw
        else:
            e0, k0 = Fraction(ell * n * n), kw
            _box_add(reg, e0, kw, Fraction(-1, 2), qmax)
        if n == 0:
            # 1/(1 - w^4) = -w^-2 / (w^2 - w^-2)
            _box_add(pole, e0, k0 - 2, -1, qmax)
        else:
            _geometric_box(reg, e0, k0, 2 * n, qmax, box)
    return QSeries(reg, qmax), QSeries(pole, qmax)


def _theta1_4z_box(qmax, box: int) -> QSeries:
    """``theta_1(4z, tau) / i = sum_r (-1)^(r-1/2) q^(r^2/2) w^(4r)``."""
    t: dict = {}
    for k in range(-box, box):
        r = Fraction(2 * k + 1, 2)
        _box_add(t, r * r / 2, int(4 * r), (-1) ** k, qmax)
    return QSeries(t, qmax)


def _eta3_box(qmax, box: int) -> QSeries:
    """Jacobi: ``eta^3 = sum_{n >= 0} (-1)^n (2n+1) q^((2n+1)^2/8)``."""
    t: dict = {}
    for n in range(0, box + 1):
        _box_add(t, Fraction((2 * n + 1) ** 2, 8), 0, (-1) ** n * (2 * n + 1), qmax)
    return QSeries(t, qmax)


def appell_oracle_agrees(ell: int, alpha: int, beta: int, qmax, box: int = 60) -> bool:
    """Exact agreement of :func:`appell_A` with :func:`appell_A_box` up to ``q**qmax``.

    For ``beta = 0`` both sides are multiplied by ``(w^2 - w^-2) theta_1(4z)/i``,
    which turns the eta term into ``(w^2 - w^-2) eta^3``.
    """
    qmax = Fraction(qmax)
    reg, pole = appell_A_box(ell, alpha, beta, qmax, box)
    got = appell_A(ell, alpha, beta, qmax)
    if beta == 1:
        return got.same_terms(reg, qmax)
    s2 = WLaurent.sinh(2)
    th = _theta1_4z_box(qmax, box)
    lhs = (got.body * th).truncate(qmax)
    rhs = ((reg.mul_laurent(s2) + pole) * th + _eta3_box(qmax, box).mul_laurent(s2)).truncate(qmax)
    return got.den == (2,) and lhs.same_terms(rhs, qmax)
