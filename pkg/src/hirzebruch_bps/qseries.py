"""Exact truncated q-series whose coefficients are Laurent polynomials in w.

Three value types live here:

``WLaurent``
    sparse Laurent polynomial in ``w`` with exact (int or Fraction) coefficients.
``QSeries``
    finite map ``q``-exponent (Fraction) -> ``WLaurent``, exact for every
    exponent ``<= qmax``.  ``qmax=None`` marks an exact finite expression.
``PoleSeries``
    a ``QSeries`` divided by ``prod_i (w**m_i - w**-m_i)``.

All values are immutable.  The eta/theta building blocks and the blow-up
factor are built on top of them at the bottom of the module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


class NotDivisible(ArithmeticError):
    """Raised when an exact division by ``w**m - w**-m`` leaves a remainder."""


class NotInvertible(ArithmeticError):
    pass


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# Laurent polynomials in w
# ---------------------------------------------------------------------------


class WLaurent:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, Number] | None = None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if v:
                    if not isinstance(k, int):
                        if isinstance(k, Fraction) and k.denominator == 1:
                            k = k.numerator
                        else:
                            raise ValueError(f"non-integer w exponent {k!r}")
                    c[k] = _norm(v)
        self._c = c

    @classmethod
    def _raw(cls, c: dict) -> "WLaurent":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "WLaurent":
        return cls({k: c})

    @classmethod
    def sinh(cls, m: int) -> "WLaurent":
        """``w**m - w**-m``."""
        if m == 0:
            return cls()
        return cls({m: 1, -m: -1})

    # -- inspection
    def items(self):
        return self._c.items()

    def coeff(self, k: int) -> Number:
        return self._c.get(k, 0)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = WLaurent({0: other})
        return isinstance(other, WLaurent) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def min_exp(self) -> int:
        return min(self._c)

    def max_exp(self) -> int:
        return max(self._c)

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    # -- ring operations
    def __add__(self, other: "WLaurent") -> "WLaurent":
        if isinstance(other, (int, Fraction)):
            other = WLaurent({0: other})
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = _norm(s)
            else:
                c.pop(k, None)
        return WLaurent._raw(c)

    __radd__ = __add__

    def __neg__(self) -> "WLaurent":
        return WLaurent._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other: "WLaurent") -> "WLaurent":
        return self + (-other)

    def __mul__(self, other) -> "WLaurent":
        if isinstance(other, (int, Fraction)):
            if not other:
                return WLaurent()
            return WLaurent._raw({k: _norm(v * other) for k, v in self._c.items()})
        if not self._c or not other._c:
            return WLaurent()
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Number] = {}
        for kb, vb in b.items():
            for ka, va in a.items():
                k = ka + kb
                out[k] = out.get(k, 0) + va * vb
        return WLaurent._raw({k: _norm(v) for k, v in out.items() if v})

    __rmul__ = __mul__

    def shift(self, k: int) -> "WLaurent":
        """Multiply by ``w**k``."""
        if k == 0:
            return self
        return WLaurent._raw({e + k: v for e, v in self._c.items()})

    def scale_exponents(self, a: int) -> "WLaurent":
        """Substitute ``w -> w**a``."""
        return WLaurent._raw({e * a: v for e, v in self._c.items()})

    def w_invert(self) -> "WLaurent":
        return WLaurent._raw({-e: v for e, v in self._c.items()})

    def w_log_deriv(self) -> "WLaurent":
        """Apply ``w d/dw``."""
        return WLaurent._raw({e: _norm(e * v) for e, v in self._c.items() if e})

    def subs_neg_power(self, m: int) -> "WLaurent":
        """Substitute ``w -> -(-w)**m``."""
        out = {}
        for e, v in self._c.items():
            # (-(-w)^m)^e = (-1)^e (-1)^(m e) w^(m e)
            sign = -1 if (e + m * e) % 2 else 1
            out[m * e] = sign * v
        return WLaurent._raw(out)

    def divmod_sinh(self, m: int) -> tuple["WLaurent", "WLaurent"]:
        """Divide by ``w**m - w**-m``; returns (quotient, remainder)."""
        if m <= 0:
            raise ValueError("m must be positive")
        rem = dict(self._c)
        quot: dict[int, Number] = {}
        # eliminate from the top: w^e = w^(e-m) (w^m - w^-m) + w^(e-2m)
        while rem:
            top = max(rem)
            bottom = min(rem)
            if top - bottom < 2 * m:
                break
            c = rem.pop(top)
            k = top - m
            quot[k] = quot.get(k, 0) + c
            lo = top - 2 * m
            s = rem.get(lo, 0) + c
            if s:
                rem[lo] = s
            else:
                rem.pop(lo, None)
        return (
            WLaurent({k: v for k, v in quot.items()}),
            WLaurent(rem),
        )

    def div_sinh(self, m: int) -> "WLaurent":
        q, r = self.divmod_sinh(m)
        if r:
            raise NotDivisible(f"w^{m} - w^-{m} does not divide {self}")
        return q

    def eval(self, at) -> "Number | Gaussian":
        """Exact substitution at ``w = 1``, ``-1`` or ``'i'``."""
        if at == 1:
            return _norm(sum(self._c.values(), 0))
        if at == -1:
            return _norm(sum((v if e % 2 == 0 else -v) for e, v in self._c.items()))
        if at in ("i", 1j):
            re = im = 0
            for e, v in self._c.items():
                r = e % 4
                if r == 0:
                    re += v
                elif r == 1:
                    im += v
                elif r == 2:
                    re -= v
                else:
                    im -= v
            return Gaussian(_norm(re), _norm(im))
        raise ValueError(f"unsupported evaluation point {at!r}")

    def evalf(self, w: complex) -> complex:
        return sum(complex(v) * w**e for e, v in self._c.items())

    def to_json(self) -> dict:
        return {str(k): _coeff_str(self._c[k]) for k in sorted(self._c)}

    @classmethod
    def from_json(cls, d: Mapping[str, str]) -> "WLaurent":
        return cls({int(k): _coeff_parse(v) for k, v in d.items()})

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c, reverse=True):
            v = self._c[k]
            parts.append(f"{v}*w^{k}" if k else f"{v}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Gaussian:
    re: Number
    im: Number

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))


def _coeff_str(v: Number) -> str:
    return str(v)


def _coeff_parse(s: str) -> Number:
    return _norm(Fraction(s))


# ---------------------------------------------------------------------------
# Truncated q-series
# ---------------------------------------------------------------------------


def _min_q(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class QSeries:
    """Truncated series ``sum_e c_e(w) q**e`` exact for ``e <= qmax``."""

    __slots__ = ("_t", "qmax")

    def __init__(self, terms: Mapping | None = None, qmax=None):
        self.qmax = None if qmax is None else _frac(qmax)
        t: dict[Fraction, WLaurent] = {}
        if terms:
            for e, p in terms.items():
                e = _frac(e)
                if not isinstance(p, WLaurent):
                    p = WLaurent({0: p})
                if self.qmax is not None and e > self.qmax:
                    continue
                if p:
                    t[e] = t[e] + p if e in t else p
                    if not t[e]:
                        del t[e]
        self._t = t

    @classmethod
    def _raw(cls, t: dict, qmax) -> "QSeries":
        obj = cls.__new__(cls)
        obj._t = t
        obj.qmax = qmax
        return obj

    @classmethod
    def one(cls, qmax=None) -> "QSeries":
        return cls({0: WLaurent({0: 1})}, qmax)

    @classmethod
    def zero(cls, qmax=None) -> "QSeries":
        return cls({}, qmax)

    @classmethod
    def monomial(cls, e, k: int = 0, c: Number = 1, qmax=None) -> "QSeries":
        return cls({e: WLaurent({k: c})}, qmax)

    @classmethod
    def from_laurent(cls, p: WLaurent, e=0, qmax=None) -> "QSeries":
        return cls({e: p}, qmax)

    # -- inspection
    def exponents(self) -> list[Fraction]:
        return sorted(self._t)

    def items(self):
        return sorted(self._t.items())

    def coeff(self, e) -> WLaurent:
        e = _frac(e)
        if self.qmax is not None and e > self.qmax:
            raise ExponentBeyondTruncation(f"q^{e} beyond truncation {self.qmax}")
        return self._t.get(e, WLaurent())

    def lead(self):
        """Smallest stored exponent (``qmax`` for an empty truncated series)."""
        if self._t:
            return min(self._t)
        return self.qmax

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._t == other._t and self.qmax == other.qmax

    def same_terms(self, other: "QSeries", upto=None) -> bool:
        """Coefficient equality up to ``upto`` (default: common qmax)."""
        lim = _min_q(self.qmax, other.qmax)
        lim = _min_q(lim, None if upto is None else _frac(upto))
        keys = set(self._t) | set(other._t)
        for e in keys:
            if lim is not None and e > lim:
                continue
            if self._t.get(e, WLaurent()) != other._t.get(e, WLaurent()):
                return False
        return True

    def first_difference(self, other: "QSeries"):
        lim = _min_q(self.qmax, other.qmax)
        for e in sorted(set(self._t) | set(other._t)):
            if lim is not None and e > lim:
                break
            if self._t.get(e, WLaurent()) != other._t.get(e, WLaurent()):
                return e
        return None

    def __hash__(self):
        return hash((self.qmax, frozenset((e, hash(p)) for e, p in self._t.items())))

    # -- ring operations
    def truncate(self, qmax) -> "QSeries":
        qmax = _min_q(self.qmax, None if qmax is None else _frac(qmax))
        if qmax is None:
            return self
        return QSeries._raw({e: p for e, p in self._t.items() if e <= qmax}, qmax)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, PoleSeries):
            return PoleSeries.lift(self) + other
        if not isinstance(other, QSeries):
            other = QSeries.one() * other
        qmax = _min_q(self.qmax, other.qmax)
        t = {e: p for e, p in self._t.items() if qmax is None or e <= qmax}
        for e, p in other._t.items():
            if qmax is not None and e > qmax:
                continue
            s = t[e] + p if e in t else p
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return QSeries._raw(t, qmax)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries._raw({e: -p for e, p in self._t.items()}, self.qmax)

    def __sub__(self, other) -> "QSeries":
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c: Number) -> "QSeries":
        if not c:
            return QSeries.zero(self.qmax)
        return QSeries._raw({e: p * c for e, p in self._t.items()}, self.qmax)

    def mul_laurent(self, p: WLaurent) -> "QSeries":
        if not p:
            return QSeries.zero(self.qmax)
        t = {}
        for e, c in self._t.items():
            r = c * p
            if r:
                t[e] = r
        return QSeries._raw(t, self.qmax)

    def shift(self, e=0, k: int = 0) -> "QSeries":
        """Multiply by the monomial ``q**e w**k``."""
        e = _frac(e)
        qmax = None if self.qmax is None else self.qmax + e
        return QSeries._raw(
            {x + e: p.shift(k) for x, p in self._t.items()}, qmax
        )

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, WLaurent):
            return self.mul_laurent(other)
        if isinstance(other, PoleSeries):
            return PoleSeries.lift(self) * other
        la, lb = self.lead(), other.lead()
        qa = None if self.qmax is None else self.qmax + (lb if lb is not None else 0)
        qb = None if other.qmax is None else other.qmax + (la if la is not None else 0)
        qmax = _min_q(qa, qb)
        out: dict[Fraction, WLaurent] = {}
        b_items = sorted(other._t.items())
        for ea, pa in sorted(self._t.items()):
            for eb, pb in b_items:
                e = ea + eb
                if qmax is not None and e > qmax:
                    break
                r = pa * pb
                if e in out:
                    out[e] = out[e] + r
                else:
                    out[e] = r
        return QSeries._raw({e: p for e, p in out.items() if p}, qmax)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = QSeries.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self, qmax=None) -> "QSeries":
        """Exact inverse; the leading coefficient must be ``+-w**k``.

        ``qmax`` bounds the result; for an exact input it is mandatory.
        """
        if not self._t:
            raise NotInvertible("zero series")
        e0 = min(self._t)
        lead = self._t[e0]
        if not lead.is_monomial():
            raise NotInvertible(f"leading coefficient {lead} is not a monomial")
        ((k0, c0),) = lead.items()
        if c0 not in (1, -1):
            raise NotInvertible(f"leading coefficient {c0} is not a unit")
        # self = c0 q^e0 w^k0 (1 + X), X in positive q powers
        rel_qmax = None if self.qmax is None else self.qmax - e0
        if qmax is not None:
            lim = _frac(qmax) + e0
            rel_qmax = lim if rel_qmax is None else min(rel_qmax, lim)
        if rel_qmax is None:
            raise ValueError("inverse of an exact series needs qmax")
        X = {
            e - e0: p.shift(-k0) * c0
            for e, p in self._t.items()
            if e != e0 and e - e0 <= rel_qmax
        }
        # common grid for the recurrence
        den = 1
        for e in X:
            den = math.lcm(den, e.denominator)
        den = math.lcm(den, rel_qmax.denominator)
        N = math.floor(rel_qmax * den)
        xs = [(int(e * den), p) for e, p in X.items()]
        v: list[WLaurent] = [WLaurent({0: 1})] + [WLaurent()] * N
        for n in range(1, N + 1):
            acc = WLaurent()
            for j, p in xs:
                if j <= n and v[n - j]:
                    acc = acc + p * v[n - j]
            v[n] = -acc
        inv_terms = {
            Fraction(n, den) - e0: p.shift(-k0) * c0 for n, p in enumerate(v) if p
        }
        return QSeries._raw(inv_terms, rel_qmax - e0)

    def w_invert(self) -> "QSeries":
        return QSeries._raw({e: p.w_invert() for e, p in self._t.items()}, self.qmax)

    def w_log_deriv(self) -> "QSeries":
        t = {}
        for e, p in self._t.items():
            d = p.w_log_deriv()
            if d:
                t[e] = d
        return QSeries._raw(t, self.qmax)

    def scale_w(self, a: int) -> "QSeries":
        return QSeries._raw(
            {e: p.scale_exponents(a) for e, p in self._t.items()}, self.qmax
        )

    def eval_w(self, at) -> "QSeries":
        """Substitute ``w`` exactly; result has constant coefficients."""
        t = {}
        for e, p in self._t.items():
            v = p.eval(at)
            if isinstance(v, Gaussian):
                raise ValueError("complex value; use WLaurent.eval directly")
            if v:
                t[e] = WLaurent({0: v})
        return QSeries._raw(t, self.qmax)

    def evalf(self, q_of, w: complex) -> complex:
        """Numeric value given ``q_of(e) = q**e`` and ``w``."""
        return sum(q_of(e) * p.evalf(w) for e, p in self._t.items())

    def to_json(self) -> dict:
        return {
            "qmax": None if self.qmax is None else str(self.qmax),
            "terms": [[str(e), self._t[e].to_json()] for e in sorted(self._t)],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "QSeries":
        qmax = None if d["qmax"] is None else Fraction(d["qmax"])
        return cls({Fraction(e): WLaurent.from_json(p) for e, p in d["terms"]}, qmax)

    def __repr__(self) -> str:
        body = " + ".join(f"({p})*q^{e}" for e, p in self.items()) or "0"
        tail = f" + O(q^>{self.qmax})" if self.qmax is not None else ""
        return body + tail


class ExponentBeyondTruncation(LookupError):
    pass


# ---------------------------------------------------------------------------
# Series with poles in w
# ---------------------------------------------------------------------------


def _merge_den(a: tuple, b: tuple) -> tuple:
    """Smallest multiset containing both (as multisets)."""
    from collections import Counter

    ca, cb = Counter(a), Counter(b)
    out = ca | cb
    return tuple(sorted(out.elements()))


def _missing(have: tuple, want: tuple) -> list[int]:
    from collections import Counter

    return list((Counter(want) - Counter(have)).elements())


class PoleSeries:
    """``body / prod(w**m - w**-m for m in den)``."""

    __slots__ = ("den", "body")

    def __init__(self, den: Iterable[int], body: QSeries):
        den = tuple(sorted(int(m) for m in den))
        if any(m <= 0 for m in den):
            raise ValueError("denominator factors must be positive")
        self.den = den
        self.body = body

    @classmethod
    def lift(cls, s: "QSeries | PoleSeries") -> "PoleSeries":
        return s if isinstance(s, PoleSeries) else cls((), s)

    @property
    def qmax(self):
        return self.body.qmax

    def with_den(self, den: tuple) -> "PoleSeries":
        """Rewrite over a larger denominator multiset."""
        extra = _missing(self.den, den)
        body = self.body
        for m in extra:
            body = body.mul_laurent(WLaurent.sinh(m))
        return PoleSeries(tuple(self.den) + tuple(extra), body)

    def __add__(self, other) -> "PoleSeries":
        other = PoleSeries.lift(other)
        den = _merge_den(self.den, other.den)
        a, b = self.with_den(den), other.with_den(den)
        return PoleSeries(den, a.body + b.body)

    __radd__ = __add__

    def __neg__(self) -> "PoleSeries":
        return PoleSeries(self.den, -self.body)

    def __sub__(self, other) -> "PoleSeries":
        return self + (-PoleSeries.lift(other))

    def __mul__(self, other) -> "PoleSeries":
        if isinstance(other, (int, Fraction)):
            return PoleSeries(self.den, self.body.scale(other))
        if isinstance(other, WLaurent):
            return PoleSeries(self.den, self.body.mul_laurent(other))
        other = PoleSeries.lift(other)
        return PoleSeries(self.den + other.den, self.body * other.body)

    __rmul__ = __mul__

    def scale(self, c: Number) -> "PoleSeries":
        return PoleSeries(self.den, self.body.scale(c))

    def shift(self, e=0, k: int = 0) -> "PoleSeries":
        return PoleSeries(self.den, self.body.shift(e, k))

    def truncate(self, qmax) -> "PoleSeries":
        return PoleSeries(self.den, self.body.truncate(qmax))

    def w_invert(self) -> "PoleSeries":
        # (w^-m - w^m) = -(w^m - w^-m)
        sign = -1 if len(self.den) % 2 else 1
        return PoleSeries(self.den, self.body.w_invert().scale(sign))

    def reduce_pole(self, m: int) -> "PoleSeries":
        if m not in self.den:
            raise NotDivisible(f"no factor {m} in denominator {self.den}")
        t = {}
        for e, p in self.body.items():
            try:
                t[e] = p.div_sinh(m)
            except NotDivisible as exc:
                raise NotDivisible(f"at q^{e}: {exc}") from None
        den = list(self.den)
        den.remove(m)
        return PoleSeries(den, QSeries(t, self.body.qmax))

    def reduce_all(self) -> "PoleSeries":
        """Cancel every denominator factor that divides the body exactly."""
        out = self
        for m in sorted(set(self.den), reverse=True):
            while m in out.den:
                try:
                    out = out.reduce_pole(m)
                except NotDivisible:
                    break
        return out

    def to_qseries(self) -> QSeries:
        red = self.reduce_all()
        if red.den:
            raise NotDivisible(f"poles {red.den} do not cancel")
        return red.body

    def coeff(self, e) -> tuple[WLaurent, tuple]:
        return self.body.coeff(e), self.den

    def same_terms(self, other, upto=None) -> bool:
        other = PoleSeries.lift(other)
        den = _merge_den(self.den, other.den)
        return self.with_den(den).body.same_terms(other.with_den(den).body, upto)

    def first_difference(self, other):
        other = PoleSeries.lift(other)
        den = _merge_den(self.den, other.den)
        return self.with_den(den).body.first_difference(other.with_den(den).body)

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def to_json(self) -> dict:
        return {"den": list(self.den), "body": self.body.to_json()}

    @classmethod
    def from_json(cls, d: Mapping) -> "PoleSeries":
        return cls(d["den"], QSeries.from_json(d["body"]))

    def __repr__(self) -> str:
        den = "".join(f"(w^{m}-w^-{m})" for m in self.den) or "1"
        return f"[{self.body}] / {den}"


class WRational:
    """Rational function ``num / prod(w**m - w**-m for m in den)`` in w."""

    __slots__ = ("num", "den")

    def __init__(self, num: WLaurent, den: Iterable[int] = ()):
        self.num = num if isinstance(num, WLaurent) else WLaurent({0: num})
        self.den = tuple(sorted(int(m) for m in den))

    def with_den(self, den: tuple) -> "WRational":
        num = self.num
        extra = _missing(self.den, den)
        for m in extra:
            num = num * WLaurent.sinh(m)
        return WRational(num, self.den + tuple(extra))

    def __add__(self, other) -> "WRational":
        if not isinstance(other, WRational):
            other = WRational(other)
        den = _merge_den(self.den, other.den)
        return WRational(self.with_den(den).num + other.with_den(den).num, den).reduce()

    __radd__ = __add__

    def __neg__(self) -> "WRational":
        return WRational(-self.num, self.den)

    def __sub__(self, other) -> "WRational":
        return self + (-other)

    def __mul__(self, other) -> "WRational":
        if isinstance(other, (int, Fraction)):
            return WRational(self.num * other, self.den)
        if isinstance(other, WLaurent):
            return WRational(self.num * other, self.den).reduce()
        return WRational(self.num * other.num, self.den + other.den).reduce()

    __rmul__ = __mul__

    def reduce(self) -> "WRational":
        num, den = self.num, list(self.den)
        if not num:
            return WRational(WLaurent(), ())
        for m in sorted(set(den), reverse=True):
            while m in den:
                q, r = num.divmod_sinh(m)
                if r:
                    break
                num = q
                den.remove(m)
        return WRational(num, den)

    def subs_neg_power(self, m: int) -> "WRational":
        """Substitute ``w -> -(-w)**m``."""
        num = self.num.subs_neg_power(m)
        sign = 1
        den = []
        for k in self.den:
            # (-(-w)^m)^k - (-(-w)^m)^-k = (-1)^(k(m+1)) (w^(mk) - w^-(mk))
            if (k * (m + 1)) % 2:
                sign = -sign
            den.append(m * k)
        return WRational(num * sign, den)

    def w_invert(self) -> "WRational":
        sign = -1 if len(self.den) % 2 else 1
        return WRational(self.num.w_invert() * sign, self.den)

    def is_laurent(self) -> bool:
        return not self.reduce().den

    def to_laurent(self) -> WLaurent:
        red = self.reduce()
        if red.den:
            raise NotDivisible(f"{self} is not a Laurent polynomial")
        return red.num

    def __eq__(self, other) -> bool:
        if not isinstance(other, WRational):
            other = WRational(other if isinstance(other, WLaurent) else WLaurent({0: other}))
        den = _merge_den(self.den, other.den)
        return self.with_den(den).num == other.with_den(den).num

    def __hash__(self):
        return hash(self.reduce().num)

    def __bool__(self) -> bool:
        return bool(self.num)

    def evalf(self, w: complex) -> complex:
        v = self.num.evalf(w)
        for m in self.den:
            v /= w**m - w ** (-m)
        return v

    def __repr__(self) -> str:
        den = "".join(f"(w^{m}-w^-{m})" for m in self.den) or "1"
        return f"({self.num})/{den}"


Series = Union[QSeries, PoleSeries]


def dumps(s: Series) -> str:
    """Canonical JSON text (sorted exponents, decimal-string coefficients)."""
    if isinstance(s, PoleSeries):
        payload = {"type": "PoleSeries", **s.to_json()}
    else:
        payload = {"type": "QSeries", **s.to_json()}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Series:
    d = json.loads(text)
    if d["type"] == "PoleSeries":
        return PoleSeries.from_json(d)
    return QSeries.from_json(d)


# ---------------------------------------------------------------------------
# eta, theta and friends
# ---------------------------------------------------------------------------


def euler_product(qmax, k: int = 1) -> QSeries:
    """``prod_{n>=1} (1 - q**n)**k`` for integer ``k`` (possibly negative)."""
    qmax = _frac(qmax)
    N = math.floor(qmax)
    if k >= 0:
        # pentagonal-number sum for k=1, then powers
        coeffs = [0] * (N + 1)
        j = 0
        while True:
            done = True
            for g in (j * (3 * j - 1) // 2, j * (3 * j + 1) // 2):
                if g <= N:
                    done = False
                    coeffs[g] = (-1) ** j
            if done:
                break
            j += 1
        base = QSeries({n: c for n, c in enumerate(coeffs) if c}, qmax)
        return base**k if k != 1 else base
    return euler_product(qmax, -k).inverse()


def eta(qmax) -> QSeries:
    """Dedekind eta ``q**(1/24) prod(1 - q**n)`` exact up to ``qmax``."""
    qmax = _frac(qmax)
    s = Fraction(1, 24)
    return euler_product(qmax - s).shift(s)


def eta_pow(k: int, qmax) -> QSeries:
    qmax = _frac(qmax)
    s = Fraction(k, 24)
    return euler_product(qmax - s, k).shift(s)


def theta(kind: int, z_scale: int, tau_scale: int, qmax) -> QSeries:
    """``theta_kind(a z, b tau)`` as a sum over its lattice.

    For ``kind == 1`` the overall factor ``i`` is dropped: the returned series
    is ``theta_1 / i = sum_r (-1)**(r-1/2) q**(b r^2/2) w**(a r)``.
    Half-integral ``r`` requires even ``z_scale`` for kinds 1 and 2.
    """
    a, b = int(z_scale), int(tau_scale)
    if a < 0 or b < 1:
        raise ValueError("need z_scale >= 0 and tau_scale >= 1")
    qmax = _frac(qmax)
    terms: dict[Fraction, WLaurent] = {}
    bound = math.isqrt(int(2 * qmax / b) + 1) + 2

    def add(e, k, c):
        p = WLaurent({k: c})
        terms[e] = terms[e] + p if e in terms else p

    if kind == 3:
        for n in range(-bound, bound + 1):
            e = Fraction(b * n * n, 2)
            if e <= qmax:
                add(e, a * n, 1)
    elif kind in (1, 2):
        if a % 2:
            raise ValueError("theta_1, theta_2 need an even z_scale (integer w powers)")
        for j in range(-bound, bound):
            r = Fraction(2 * j + 1, 2)
            e = b * r * r / 2
            if e > qmax:
                continue
            c = 1 if kind == 2 or int(r - Fraction(1, 2)) % 2 == 0 else -1
            add(e, int(a * r), c)
    else:
        raise ValueError(f"unknown theta kind {kind}")
    return QSeries({e: p for e, p in terms.items() if p}, qmax)


def theta1_product(z_scale: int, qmax) -> QSeries:
    """Triple-product form of ``theta_1(a z, tau) / i``."""
    a = int(z_scale)
    if a % 2:
        raise ValueError("even z_scale required")
    qmax = _frac(qmax)
    lead = Fraction(1, 8)
    rest = qmax - lead
    body = QSeries.from_laurent(WLaurent.sinh(a // 2), 0, None)
    N = math.floor(rest)
    prod = QSeries.one(rest)
    for n in range(1, N + 1):
        fac = QSeries(
            {0: 1, n: WLaurent({0: -1}),}, rest
        ) * QSeries({0: 1, n: WLaurent({a: -1})}, rest) * QSeries(
            {0: 1, n: WLaurent({-a: -1})}, rest
        )
        prod = prod * fac
    return (body * prod).shift(lead)


def theta1_unit(z_scale: int, qmax) -> QSeries:
    """``prod_n (1-q^n)(1-q^n w^a)(1-q^n w^-a)`` up to ``qmax``."""
    a = int(z_scale)
    s = theta(1, a, 1, qmax + Fraction(1, 8))
    t = {}
    for e, p in s.items():
        t[e - Fraction(1, 8)] = p.div_sinh(a // 2)
    return QSeries(t, s.qmax - Fraction(1, 8))


def theta1_inv(z_scale: int, qmax) -> PoleSeries:
    """``i / theta_1(a z, tau)`` for ``a`` in {2, 4} (any even ``a`` works).

    Denominator is the single factor ``w**(a/2) - w**(-a/2)``; the body is the
    integral inverse of the triple-product unit times ``q**(-1/8)``.
    """
    a = int(z_scale)
    if a <= 0 or a % 2:
        raise ValueError("theta1_inv needs a positive even z_scale")
    qmax = _frac(qmax)
    unit = theta1_unit(a, qmax + Fraction(1, 8))
    body = unit.inverse(qmax + Fraction(1, 8)).shift(Fraction(-1, 8))
    return PoleSeries((a // 2,), body)


def blowup_factor(r: int, k: int, qmax, refined: bool = True) -> QSeries:
    """``B_{r,k}``: eta**-r times the sum over ``a_i in Z + k/r``, ``sum a_i = 0``.

    ``refined=False`` sets ``w = 1``.
    """
    if r not in (1, 2, 3):
        raise ValueError("rank must be 1, 2 or 3")
    qmax = _frac(qmax)
    shift = Fraction(k % r, r)
    inner_qmax = qmax + Fraction(r, 24)
    terms: dict[Fraction, WLaurent] = {}
    B = math.isqrt(int(2 * inner_qmax) + 2) + 2
    rng = range(-B - 1, B + 2)
    if r == 1:
        vecs = [(Fraction(0),)]
    elif r == 2:
        vecs = [(n + shift, -(n + shift)) for n in rng]
    else:
        vecs = []
        for n1 in rng:
            for n2 in rng:
                a1, a2 = n1 + shift, n2 + shift
                vecs.append((a1, a2, -a1 - a2))
    for a in vecs:
        e = sum(x * x for x in a) / 2
        if e > inner_qmax:
            continue
        wexp = sum((r + 1 - 2 * (i + 1)) * x for i, x in enumerate(a))
        wexp = int(wexp) if refined else 0
        p = WLaurent({wexp: 1})
        terms[e] = terms[e] + p if e in terms else p
    lattice = QSeries({e: p for e, p in terms.items() if p}, inner_qmax)
    return lattice * eta_pow(-r, qmax - lattice.lead())
