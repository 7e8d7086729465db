"""Refined invariants, Poincare polynomials and Euler numbers from h_r."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..lattice import ChernVector, DivisorClass, Polarization, Surface, discriminant, moduli_dim
from ..qseries import NotDivisible, PoleSeries, QSeries, WLaurent, WRational, eta_pow


class ExtractionError(ArithmeticError):
    pass


class NotPolynomial(ExtractionError):
    pass


class NotPalindromic(ExtractionError):
    pass


class NegativeBetti(ExtractionError):
    pass


class MissingDivisorData(KeyError):
    pass


class EulerMismatch(ExtractionError):
    pass


def h_exponent(g: ChernVector, S: Surface) -> Fraction:
    """q-exponent ``r Delta - r chi(S) / 24`` carrying ``g`` in ``h_{r,c1}``."""
    return g.r * discriminant(g, S) - Fraction(g.r * S.chi_top, 24)


def extract_refined(h: PoleSeries, g: ChernVector, S: Surface) -> WRational:
    """Coefficient of ``h`` belonging to ``g``: the rational refined invariant."""
    h = PoleSeries.lift(h)
    num = h.body.coeff(h_exponent(g, S))
    return WRational(num, h.den)


# ---------------------------------------------------------------------------
# rational <-> integer invariants
# ---------------------------------------------------------------------------


def _divide(g: ChernVector, m: int, S: Surface) -> ChernVector | None:
    """``g / m`` as a charge (same ch2 per unit rank), or None if not integral."""
    if g.r % m or g.c1.cC % m or g.c1.cF % m:
        return None
    c1 = DivisorClass(g.c1.cC // m, g.c1.cF // m)
    # ch2 = c1^2/2 - c2 scales by 1/m
    from ..lattice import intersect

    ch2 = Fraction(intersect(g.c1, g.c1, S), 2) - g.c2
    c2 = Fraction(intersect(c1, c1, S), 2) - ch2 / m
    if c2.denominator != 1:
        return None
    return ChernVector(g.r // m, c1, c2)


def _divisors(g: ChernVector) -> list[int]:
    n = math.gcd(g.r, g.c1.cC, g.c1.cF)
    return [m for m in range(1, n + 1) if n % m == 0]


def integer_to_rational(omega: Mapping[ChernVector, WRational], g: ChernVector, S: Surface) -> WRational:
    """``sum_{m|g} Omega(g/m, -(-w)^m) / m``."""
    total = WRational(WLaurent())
    for m in _divisors(g):
        sub = _divide(g, m, S)
        if sub is None:
            continue
        if sub not in omega:
            raise MissingDivisorData(sub)
        total = total + omega[sub].subs_neg_power(m) * Fraction(1, m)
    return total


def rational_to_integer(omega_bar: Mapping[ChernVector, WRational], g: ChernVector, S: Surface) -> WRational:
    """Invert the multi-cover sum by recursion over the divisors of ``g``.

    ``omega_bar`` must hold the rational invariant of every ``g/m``.
    Divisors whose ``c2`` would be fractional carry no sheaves and are skipped.
    """
    cache: dict[ChernVector, WRational] = {}

    def solve(x: ChernVector) -> WRational:
        if x in cache:
            return cache[x]
        if x not in omega_bar:
            raise MissingDivisorData(x)
        out = omega_bar[x]
        for m in _divisors(x)[1:]:
            sub = _divide(x, m, S)
            if sub is None:
                continue
            out = out - solve(sub).subs_neg_power(m) * Fraction(1, m)
        cache[x] = out.reduce()
        return cache[x]

    return solve(g)


# ---------------------------------------------------------------------------
# expansion around w = -1
# ---------------------------------------------------------------------------


def _exp_series(p: WLaurent, order: int) -> list[Fraction]:
    """Taylor coefficients in t of ``p(-e^t)`` up to ``t**order``."""
    out = []
    fact = 1
    for j in range(order + 1):
        if j:
            fact *= j
        s = sum(((-1) ** (k % 2)) * v * Fraction(k) ** j for k, v in p.items())
        out.append(Fraction(s) / fact)
    return out


def _series_div(num: list[Fraction], den: list[Fraction], n: int) -> list[Fraction]:
    """Power-series quotient; ``den[0]`` must be nonzero."""
    out = []
    for j in range(n):
        s = num[j] if j < len(num) else Fraction(0)
        for i in range(1, j + 1):
            if i < len(den):
                s -= den[i] * out[j - i]
        out.append(s / den[0])
    return out


def laurent_at_minus_one(f: WRational, order: int) -> tuple[int, list[Fraction]]:
    """Expansion of ``f(-e^t)`` as ``t**v * (c_0 + c_1 t + ...)``.

    Returns ``(v, [c_0..])`` with enough terms to reach ``t**order``.
    Each ``w^m - w^-m`` becomes ``(-1)^m 2 sinh(m t)``, of valuation one.
    """
    poles = len(f.den)
    n = order + poles + 1
    num = _exp_series(f.num, n + poles)
    v = 0
    while v < len(num) and num[v] == 0:
        v += 1
    if v == len(num):
        return order + 1, []
    num = num[v:]
    den = [Fraction(1)]
    for m in f.den:
        # (-1)^m 2 sinh(m t) / t, only even powers of t
        sgn_m = -2 if m % 2 else 2
        fac = [
            Fraction(sgn_m * m ** (i + 1), math.factorial(i + 1)) if i % 2 == 0 else Fraction(0)
            for i in range(n)
        ]
        den = _mul_series(den, fac, n)
    return v - poles, _series_div(num, den, n)


def _mul_series(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def coefficient_at_minus_one(f: WRational, k: int) -> Fraction:
    """Coefficient of ``t**k`` in ``f(-e^t)``; a pole of higher order is an error."""
    v, cs = laurent_at_minus_one(f, k)
    if v < 0 and any(cs[: -v]):
        raise NotPolynomial(f"{f} has a pole of order {-v} at w = -1")
    idx = k - v
    if idx < 0 or idx >= len(cs):
        return Fraction(0)
    return cs[idx]


def limit_at_minus_one(f: WRational) -> Fraction:
    """``lim_{w -> -1} f(w)``."""
    return coefficient_at_minus_one(f, 0)


def numeric_from_f(f: PoleSeries, r: int, qmax=None) -> QSeries:
    """``f_r(tau)`` from ``f_r(z, tau)`` by ``r-1`` z-derivatives at ``z = 1/2``.

    ``d/dz = 2 pi i w d/dw = 2 pi i d/dt`` for ``w = -e^t``, so the
    ``(2 pi i)`` factors cancel and only ``(r-1)!`` times a Taylor coefficient
    survives.  Lower coefficients must vanish; a nonzero one raises.
    """
    f = PoleSeries.lift(f)
    pref = Fraction((-1) ** (r - 1), 2 ** (r - 1))
    terms = {}
    for e, p in f.body.items():
        if qmax is not None and e > qmax:
            continue
        rat = WRational(p, f.den)
        v, cs = laurent_at_minus_one(rat, r - 1)
        for k in range(0, r - 1):
            if k - v >= 0 and k - v < len(cs) and cs[k - v]:
                raise ExtractionError(f"q^{e}: Taylor term t^{k} of f does not vanish")
        if v < 0 and any(cs[: -v]):
            raise NotPolynomial(f"q^{e}: f has a pole at w = -1")
        idx = r - 1 - v
        c = cs[idx] if 0 <= idx < len(cs) else Fraction(0)
        c *= pref
        if c:
            terms[e] = c.numerator if c.denominator == 1 else c
    return QSeries(terms, f.qmax if qmax is None else min(Fraction(qmax), f.qmax))


def numeric_h(f: PoleSeries, r: int, S: Surface, qmax) -> QSeries:
    """``h_r(tau) = eta^{-chi(S) r} f_r(tau)`` up to ``q**qmax``."""
    qmax = Fraction(qmax)
    shift = Fraction(r * S.chi_top, 24)
    fnum = numeric_from_f(f, r, qmax + shift)
    lead = fnum.lead() if not fnum.is_zero() else Fraction(0)
    return (eta_pow(-S.chi_top * r, qmax - lead) * fnum).truncate(qmax)


# ---------------------------------------------------------------------------
# Betti numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantRecord:
    ell: int
    gamma: ChernVector
    J: Polarization | None
    refined: WRational
    poincare: tuple[int, ...]
    euler: int
    dim: int
    euler_routes: Mapping[str, int] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    @property
    def betti_even(self) -> list[int]:
        return list(self.poincare[::2])

    def to_json(self) -> dict:
        J = self.J
        return {
            "ell": self.ell,
            "r": self.gamma.r,
            "c1": [self.gamma.c1.cC, -self.gamma.c1.cF],
            "c2": _num_json(self.gamma.c2),
            "J": None if J is None else {"m": _num_json(J.m), "n": _num_json(J.n), "side": J.side.value},
            "dim": self.dim,
            "betti": list(self.poincare),
            "euler": self.euler,
            "warnings": list(self.warnings),
        }


def _num_json(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def poincare_polynomial(omega: WRational, d: int) -> WLaurent:
    """``p(M, w) = w^d (w - w^-1) Omega(w)``; must be an honest polynomial."""
    try:
        p = (omega * WLaurent.sinh(1)).to_laurent().shift(d)
    except NotDivisible as exc:
        raise NotPolynomial(f"refined invariant {omega} has extra poles") from exc
    return p


def betti_extract(
    omega: WRational,
    g: ChernVector,
    S: Surface,
    J: Polarization | None = None,
    euler_derivative=None,
    warnings: tuple[str, ...] = (),
) -> InvariantRecord:
    """Validate ``omega`` as the invariant of a smooth projective moduli space.

    ``euler_derivative`` is the signed numeric invariant from ``h_r(tau)``
    when the caller has it; all available Euler routes must agree.
    """
    d = moduli_dim(g, S)
    p = poincare_polynomial(omega, d)
    if p and (p.min_exp() < 0 or p.max_exp() > 2 * d):
        raise NotPolynomial(f"p(M, w) = {p} leaves degree range [0, {2 * d}]")
    betti = [p.coeff(i) for i in range(2 * d + 1)]
    if any(isinstance(b, Fraction) for b in betti):
        raise NotPolynomial(f"non-integral Betti numbers {betti}")
    if betti != betti[::-1]:
        raise NotPalindromic(f"Betti numbers {betti} are not palindromic")
    if any(b < 0 for b in betti):
        raise NegativeBetti(f"negative Betti number in {betti}")
    if any(betti[1::2]):
        raise NotPolynomial(f"odd Betti numbers {betti[1::2]} are nonzero")
    chi = sum(betti)
    sign = -1 if d % 2 else 1
    routes = {"poincare": chi, "limit": int(sign * limit_at_minus_one(omega * WLaurent.sinh(1)))}
    if euler_derivative is not None:
        routes["derivative"] = sign * euler_derivative
    if len(set(routes.values())) != 1:
        raise EulerMismatch(f"Euler routes disagree: {routes}")
    return InvariantRecord(S.ell, g, J, omega, tuple(int(b) for b in betti), chi, d, routes, tuple(warnings))


def invariant_records(
    ell: int,
    r: int,
    c1: DivisorClass,
    c2s,
    J: Polarization,
    derivative_route: bool = True,
) -> list[InvariantRecord]:
    """Records for every c2 in ``c2s`` from one generating function."""
    import warnings as _w

    from .genfun import ProvenanceWarning, f_series, h_from_f

    S = Surface(ell)
    gs = [ChernVector(r, c1, c2) for c2 in c2s]
    qh = max(h_exponent(g, S) for g in gs)
    with _w.catch_warnings(record=True) as caught:
        _w.simplefilter("always", ProvenanceWarning)
        f = f_series(ell, r, c1, J, qh + Fraction(r, 6))
    notes = tuple(sorted({str(c.message) for c in caught if issubclass(c.category, ProvenanceWarning)}))
    h = h_from_f(f, r, qh)
    hnum = numeric_h(f, r, S, qh) if derivative_route else None
    out = []
    for g in gs:
        omega = extract_refined(h, g, S).reduce()
        ed = None
        if hnum is not None:
            c = hnum.coeff(h_exponent(g, S)).coeff(0)
            ed = int(c)
            if c != ed:
                raise NotPolynomial(f"numeric invariant {c} of {g} is not an integer")
        out.append(betti_extract(omega, g, S, J, ed, notes))
    return out
