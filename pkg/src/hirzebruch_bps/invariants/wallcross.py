"""Wall-crossing: primitive jumps, series transport and a per-charge oracle.

Two independent routes compute how ``h_{r,c1}`` changes between two
polarizations.  ``wallcross_transport`` works with whole generating
functions.  ``transport_charge`` walks the walls returned by
:func:`lattice.walls` for a single charge and multiplies the constituent
invariants explicitly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..lattice import (
    ChernVector,
    DivisorClass,
    Polarization,
    Side,
    Surface,
    UnsupportedRank,
    discriminant,
    intersect,
    pairing,
    walls,
)
from ..qseries import PoleSeries, QSeries, WLaurent, WRational
from .extraction import extract_refined, h_exponent
from .genfun import BetaDivisible, f2, h_from_f, h_series, residue_class
from .indefinite import DivergentSum


def delta_omega_primitive(
    g1: ChernVector,
    g2: ChernVector,
    Jfrom: Polarization,
    Jto: Polarization,
    om1: WRational,
    om2: WRational,
    S: Surface,
) -> WRational:
    """Jump of ``Omega(g1 + g2, w)`` across the wall of two primitive charges."""
    d = g1.r * g2.c1 - g2.r * g1.c1
    jump = Jto.sign(d, S) - Jfrom.sign(d, S)
    k = pairing(g1, g2, S)
    if not jump or not k:
        return WRational(WLaurent())
    return om1 * om2 * WLaurent.sinh(k) * Fraction(-jump, 2)


# ---------------------------------------------------------------------------
# generating-function transport
# ---------------------------------------------------------------------------


def _pair_terms(ell, r, alpha, beta, Jfrom, Jto, qmax):
    """Splittings ``rank 1 + rank r-1`` whose sign flips between the two J.

    Yields ``(a, b, x, y, e, X, jump)`` with ``xi = x C - y f``,
    ``e = -xi^2 / (2 r (r-1))`` and ``X = xi . K``.
    """
    r2 = r - 1
    norm = 2 * r * r2
    # e = (ell x^2 + 2 x y) / norm and x y >= 0 whenever the sign flips
    xmax = math.isqrt(math.floor(norm * qmax / ell)) + 1 if qmax >= 0 else -1
    for x in range(-xmax, xmax + 1):
        if (x + r2 * beta) % r:
            continue
        b = (x + r2 * beta) // r
        if x == 0:
            # xi = -y f: the sign only sees sgn(y), and any flip repeats for all y
            if any(Jto.sign_mn(-y, 0) != Jfrom.sign_mn(-y, 0) for y in (1, -1)):
                raise DivergentSum("sign flips on the J_{0,1} boundary; the transport is infinite")
            continue
        ylim = math.floor((norm * qmax - ell * x * x) / (2 * abs(x))) + r
        for y in range(-ylim, ylim + 1):
            if (y + r2 * alpha) % r:
                continue
            jump = Jto.sign_mn(-y, x) - Jfrom.sign_mn(-y, x)
            if not jump:
                continue
            e = Fraction(ell * x * x + 2 * x * y, norm)
            if e > qmax:
                continue
            a = (y + r2 * alpha) // r
            yield a, b, x, y, e, (ell - 2) * x + 2 * y, jump


def wallcross_transport(
    ell: int, r: int, c1: DivisorClass, Jfrom: Polarization, Jto: Polarization, qmax
) -> PoleSeries:
    """``h_{r,c1}(Jto) - h_{r,c1}(Jfrom)`` exact up to ``q**qmax``.

    Rank 2 multiplies two rank-1 functions.  Rank 3 pairs rank 1 with the
    rank-2 function evaluated on the wall itself (``sgn(0) = 0``), which is
    what makes two- and three-constituent walls come out right.
    """
    qmax = Fraction(qmax)
    qf = qmax + Fraction(r, 6)
    if r == 1 or Jfrom == Jto:
        return PoleSeries((), QSeries.zero(qmax))
    alpha, beta = residue_class(r, c1)
    if r == 2:
        terms: dict = {}
        for a, b, x, y, e, X, jump in _pair_terms(ell, 2, alpha, beta, Jfrom, Jto, qf):
            # each unordered pair appears twice in the (a, b) sum
            c = Fraction(-jump, 4)
            p = WLaurent({X: c}) + WLaurent({-X: -c})
            terms[e] = terms[e] + p if e in terms else p
        df = PoleSeries((), QSeries(terms, qf))
    elif r == 3:
        if beta == 0:
            raise BetaDivisible("rank-3 transport needs beta != 0 mod 3")
        df = PoleSeries((), QSeries.zero(qf))
        for a, b, x, y, e, X, jump in _pair_terms(ell, 3, alpha, beta, Jfrom, Jto, qf):
            inner = PoleSeries.lift(f2(ell, a, b, Polarization(abs(x), abs(y), Side.EXACT), qf - e))
            c = Fraction(-jump, 2)
            p = WLaurent({X: c}) + WLaurent({-X: -c})
            df = df + PoleSeries(inner.den, inner.body.mul_laurent(p).shift(e)).truncate(qf)
    else:
        raise UnsupportedRank(f"transport needs r <= 3, got {r}")
    return h_from_f(df, r, qmax)


# ---------------------------------------------------------------------------
# per-charge oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _hilbert(c2: int) -> WRational:
    """Refined invariant of a rank-1 charge with second Chern class ``c2``."""
    if c2 < 0:
        return WRational(WLaurent())
    g = ChernVector(1, DivisorClass(0, 0), c2)
    S = Surface(1)  # rank-1 functions do not depend on ell or c1
    h = h_series(1, 1, DivisorClass(0, 0), Polarization(0, 1, Side.MINUS), h_exponent(g, S))
    return extract_refined(h, g, S)


def constituent_invariant(g: ChernVector, J: Polarization, S: Surface) -> WRational:
    """Rational invariant of a rank 1 or 2 constituent at ``J``."""
    if discriminant(g, S) < 0:
        return WRational(WLaurent())
    if g.r == 1:
        return _hilbert(int(g.c2))
    if g.r == 2:
        h = h_series(S.ell, 2, g.c1, J, h_exponent(g, S))
        return extract_refined(h, g, S)
    raise UnsupportedRank(g.r)


def transport_charge(g: ChernVector, Jfrom: Polarization, Jto: Polarization, S: Surface) -> WRational:
    """``Omega-bar(g; Jto) - Omega-bar(g; Jfrom)`` summed wall by wall.

    Each two-constituent wall crossed contributes the primitive jump; a rank-2
    constituent is evaluated exactly on the wall, where its own half-weighted
    sign accounts for any third constituent with the same slope.
    """
    if g.r not in (2, 3):
        raise UnsupportedRank(g.r)
    total = WRational(WLaurent())
    for wall in walls(g, S):
        if wall.kind not in ("1+1", "1+2"):
            continue
        cons = wall.constituents()
        g1, g2 = cons[0], cons[1]
        d = g1.r * g2.c1 - g2.r * g1.c1
        jump = Jto.sign(d, S) - Jfrom.sign(d, S)
        k = pairing(g1, g2, S)
        if not jump or not k:
            continue
        JW = Polarization(wall.m, wall.n, Side.EXACT)
        rest = g.c2 - intersect(g1.c1, g2.c1, S)
        # g1 has rank 1 (c2 >= 0); g2 may have negative c2 when its c1^2 < 0
        for k1 in range(0, int(rest - g2.c2) + 1):
            a = ChernVector(g1.r, g1.c1, k1)
            b = ChernVector(g2.r, g2.c1, rest - k1)
            if discriminant(b, S) < 0:
                continue
            om1 = constituent_invariant(a, JW, S)
            om2 = constituent_invariant(b, JW, S)
            if not om1 or not om2:
                continue
            total = total + om1 * om2 * WLaurent.sinh(k) * Fraction(-jump, 2)
    return total


def path_transport(g: ChernVector, path: list[Polarization], S: Surface) -> WRational:
    """Sum of :func:`transport_charge` over consecutive legs of ``path``."""
    total = WRational(WLaurent())
    for Ja, Jb in zip(path, path[1:]):
        total = total + transport_charge(g, Ja, Jb, S)
    return total
