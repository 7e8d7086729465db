"""Indefinite theta series of the rank-2 wall-crossing sums."""

from __future__ import annotations

import math
from fractions import Fraction

from ..lattice import Polarization, Side, sgn
from ..qseries import QSeries, WLaurent


class DivergentSum(ValueError):
    pass


def _accumulate(terms: dict, e: Fraction, k: int, c):
    if not c:
        return
    p = WLaurent({k: c})
    if e in terms:
        s = terms[e] + p
        if s:
            terms[e] = s
        else:
            del terms[e]
    else:
        terms[e] = p


def _theta_weight(x: int, y: int, J: Polarization) -> Fraction:
    # 1/2 (sgn(-y) - sgn(x n - y m)); the linear form is c.J with
    # c.(C + ell f) = -y and c.f = x
    return Fraction(sgn(-y) - J.sign_mn(-y, x), 2)


def indef_theta(ell: int, alpha: int, beta: int, J: Polarization, qmax) -> QSeries:
    """``vartheta^{m,n}_{alpha,beta}(z, tau)`` exact up to ``q**qmax``.

    Terms are indexed by x = 2b - beta, y = 2a - alpha; a non-zero weight forces
    x y > 0 (or y = 0), so ell x^2/4 + |x||y|/2 <= qmax bounds the enumeration.
    """
    qmax = Fraction(qmax)
    terms: dict = {}
    xmax = 2 * math.isqrt(math.floor(4 * qmax / ell)) + 2
    for x in range(-xmax, xmax + 1):
        if (x + beta) % 2:
            continue
        base = Fraction(ell * x * x, 4)
        if base > qmax:
            continue
        if x == 0:
            # every y contributes q^0; only a vanishing weight is acceptable
            if _theta_weight(0, 1, J) or _theta_weight(0, -1, J):
                raise DivergentSum(f"theta^{J.m},{J.n} with beta=0 diverges at {J}")
            continue
        ymax = math.floor(2 * (qmax - base) / abs(x)) + 1
        for y in range(-ymax, ymax + 1):
            if (y + alpha) % 2:
                continue
            wt = _theta_weight(x, y, J)
            if not wt:
                continue
            e = base + Fraction(x * y, 2)
            if e > qmax:
                continue
            _accumulate(terms, e, (ell - 2) * x + 2 * y, wt)
    return QSeries(terms, qmax)


def indef_theta_box(ell: int, alpha: int, beta: int, J: Polarization, qmax,
                    box: int = 60) -> QSeries:
    """Brute-force ``vartheta`` over ``|a|, |b| <= box``."""
    qmax = Fraction(qmax)
    terms: dict = {}
    for a in range(-box, box + 1):
        y = 2 * a - alpha
        for b in range(-box, box + 1):
            x = 2 * b - beta
            e = Fraction(ell * x * x, 4) + Fraction(x * y, 2)
            if e > qmax:
                continue
            _accumulate(terms, e, (ell - 2) * x + 2 * y, _theta_weight(x, y, J))
    return QSeries(terms, qmax)


def f2_wall_sum(ell: int, alpha: int, J: Polarization, qmax, box: int | None = None) -> QSeries:
    """Rank-2, ``c1 = C - alpha f`` generating function as the direct wall sum.

    ``-1/2 sum 1/2 (sgn((2b+1)n - (2a-alpha)m) - sgn(2b+1)) (w^X - w^-X) q^Q``.
    With ``box`` set, every (a, b) in the box is visited (oracle mode).
    """
    qmax = Fraction(qmax)
    terms: dict = {}

    def visit(x, y):
        wt = Fraction(J.sign_mn(-y, x) - sgn(x), 4)
        if not wt:
            return
        e = Fraction(ell * x * x, 4) + Fraction(x * y, 2)
        if e > qmax:
            return
        X = (ell - 2) * x + 2 * y
        _accumulate(terms, e, X, -wt)
        _accumulate(terms, e, -X, wt)

    if box is not None:
        for a in range(-box, box + 1):
            for b in range(-box, box + 1):
                visit(2 * b + 1, 2 * a - alpha)
    else:
        xmax = 2 * math.isqrt(math.floor(4 * qmax / ell)) + 2
        for x in range(-xmax, xmax + 1, 1):
            if x % 2 == 0:
                continue
            base = Fraction(ell * x * x, 4)
            if base > qmax:
                continue
            ymax = math.floor(2 * (qmax - base) / abs(x)) + 1
            for y in range(-ymax, ymax + 1):
                if (y + alpha) % 2:
                    continue
                visit(x, y)
    return QSeries(terms, qmax)
