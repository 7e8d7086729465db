"""Generating functions f_r and h_r for ranks 1, 2 and 3."""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import lru_cache

from ..lattice import DivisorClass, Polarization, Side, Surface, UnsupportedRank, sgn
from ..qseries import PoleSeries, QSeries, WLaurent, eta_pow, theta1_inv
from .appell import appell_A
from .indefinite import indef_theta


class BetaDivisible(ValueError):
    pass


class ProvenanceWarning(UserWarning):
    """Wall-crossing for ell > 2 is not established for these surfaces."""


def _warn_ell(ell: int):
    if ell > 2:
        warnings.warn(
            f"ell={ell}: wall-crossing for ell > 2 lacks justification; "
            "results are conjectural",
            ProvenanceWarning,
            stacklevel=3,
        )


def f1(qmax=None) -> QSeries:
    return QSeries.one(qmax)


@lru_cache(maxsize=64)
def _appell_cached(ell, alpha, beta, qmax):
    return appell_A(ell, alpha, beta, qmax)


@lru_cache(maxsize=4096)
def _theta_cached(ell, alpha, beta, J, qmax):
    return indef_theta(ell, alpha, beta, J, qmax)


def f2(ell: int, alpha: int, beta: int, J: Polarization, qmax) -> QSeries | PoleSeries:
    """``f_{2, beta C - alpha f}(z, tau; Sigma_ell, J)``; alpha, beta taken mod 2."""
    alpha, beta = alpha % 2, beta % 2
    qmax = Fraction(qmax)
    A = _appell_cached(ell, alpha, beta, qmax)
    th = _theta_cached(ell, alpha, beta, J, qmax)
    return A + th


def f3(ell: int, alpha: int, beta: int, J: Polarization, qmax) -> PoleSeries:
    """``f_{3, beta C - alpha f}(z, tau; Sigma_ell, J)`` for beta not divisible by 3."""
    if beta % 3 == 0:
        raise BetaDivisible("rank-3 generating function needs beta != 0 mod 3")
    _warn_ell(ell)
    qmax = Fraction(qmax)
    # collect terms per inner polarization so each f2 is built once
    jobs: dict[tuple, list] = {}
    xmax = math.isqrt(math.floor(12 * qmax / ell)) + 2
    for b in range(-xmax, xmax + 1):
        x = 3 * b - 2 * beta
        base = Fraction(ell * x * x, 12)
        if base > qmax:
            continue
        ymax = math.floor(6 * (qmax - base) / abs(x)) + 3
        amin = (2 * alpha - ymax) // 3 - 1
        amax = (2 * alpha + ymax) // 3 + 1
        for a in range(amin, amax + 1):
            y = 3 * a - 2 * alpha
            wt = Fraction(J.sign_mn(-y, x) - sgn(x), 2)
            if not wt:
                continue
            e = base + Fraction(x * y, 6)
            if e > qmax:
                continue
            X = (ell - 2) * x + 2 * y
            if X == 0:
                continue
            inner = (a % 2, b % 2, abs(x), abs(y))
            jobs.setdefault(inner, []).append((e, X, wt))
    total = PoleSeries((), QSeries.zero(qmax))
    for (ai, bi, m, n), items in sorted(jobs.items()):
        need = qmax - min(e for e, _, _ in items)
        inner_f = PoleSeries.lift(f2(ell, ai, bi, Polarization(m, n, Side.EXACT), need))
        pref_terms: dict = {}
        for e, X, wt in items:
            p = WLaurent({X: -wt, -X: wt})
            pref_terms[e] = pref_terms[e] + p if e in pref_terms else p
        pref = QSeries(pref_terms)
        total = total + PoleSeries(inner_f.den, (pref * inner_f.body).truncate(qmax))
    return PoleSeries(total.den, total.body.truncate(qmax))


def hf_prefactor(r: int, qmax) -> PoleSeries:
    """``(i / (theta_1(2z) eta(tau)))**r`` exact up to ``q**qmax``.

    Denominator ``(w - w^-1)**r``; the body starts at ``q**(-r/6)``.
    """
    q1 = Fraction(qmax) + Fraction(r - 1, 6)
    inv = theta1_inv(2, q1 + Fraction(1, 24))
    one = PoleSeries(inv.den, inv.body * eta_pow(-1, q1 + Fraction(1, 8)))
    out = one
    for _ in range(r - 1):
        out = out * one
    return out.truncate(qmax)


def _unit_power(r: int, qmax) -> QSeries:
    """``(q^(1/8) U(w) eta)**r`` with ``theta_1(2z)/i = (w - w^-1) q^(1/8) U``."""
    from ..qseries import theta1_unit

    q1 = Fraction(qmax) - Fraction(r - 1, 6)
    one = theta1_unit(2, q1).shift(Fraction(1, 8)) * eta_pow(1, q1 + Fraction(1, 8))
    out = one
    for _ in range(r - 1):
        out = out * one
    return out.truncate(qmax)


def h_from_f(f, r: int, qmax=None) -> PoleSeries:
    """``h = (i / (theta_1(2z, tau) eta(tau)))**r * f``.

    Default truncation is ``qmax(f) - r/6``, the most the input supports.
    """
    f = PoleSeries.lift(f)
    if qmax is None:
        qmax = f.qmax - Fraction(r, 6)
    qmax = Fraction(qmax)
    lead_f = f.body.lead()
    pre = hf_prefactor(r, qmax - lead_f)
    return (pre * f).truncate(qmax)


def f_from_h(h, r: int, qmax=None) -> PoleSeries:
    """Inverse of :func:`h_from_f`."""
    h = PoleSeries.lift(h)
    if qmax is None:
        qmax = h.qmax + Fraction(r, 6)
    qmax = Fraction(qmax)
    den = list(h.den)
    body = h.body
    for _ in range(r):
        if 1 in den:
            den.remove(1)
        else:
            body = body.mul_laurent(WLaurent.sinh(1))
    out = PoleSeries(den, body * _unit_power(r, qmax - body.lead()))
    return out.truncate(qmax)


def residue_class(r: int, c1: DivisorClass) -> tuple[int, int]:
    """(alpha, beta) with ``c1 = beta C - alpha f`` reduced mod r."""
    return (-c1.cF) % r, c1.cC % r


def f_series(ell: int, r: int, c1: DivisorClass, J: Polarization, qmax) -> PoleSeries:
    """``f_{r,c1}(z, tau; Sigma_ell, J)`` for r = 1, 2, 3."""
    if r == 1:
        return PoleSeries.lift(f1(qmax))
    alpha, beta = residue_class(r, c1)
    if r == 2:
        return PoleSeries.lift(f2(ell, alpha, beta, J, qmax))
    if r == 3:
        return f3(ell, alpha, beta, J, qmax)
    raise UnsupportedRank(f"generating functions exist for r <= 3, got {r}")


@lru_cache(maxsize=256)
def h_series(ell: int, r: int, c1: DivisorClass, J: Polarization, qmax) -> PoleSeries:
    """``h_{r,c1}`` exact up to ``q**qmax``."""
    qmax = Fraction(qmax)
    f = f_series(ell, r, c1, J, qmax + Fraction(r, 6))
    return h_from_f(f, r, qmax)
