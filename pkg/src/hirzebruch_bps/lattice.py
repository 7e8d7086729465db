"""Intersection theory on the Hirzebruch surface Sigma_ell.

Classes are written in the basis (C, f) of H_2: C is the base curve with
C^2 = -ell, f the fibre with f^2 = 0 and C.f = 1.  Polarizations are
``J_{m,n} = m (C + ell f) + n f``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Union


class LatticeError(ValueError):
    pass


class NonIntegerDimension(LatticeError):
    pass


class NegativeDimension(LatticeError):
    pass


class DegeneratePolarization(LatticeError):
    pass


class UnsupportedRank(LatticeError):
    pass


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Surface:
    ell: int

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 1:
            raise LatticeError(f"need ell >= 1, got {self.ell}")

    chi_O = 1
    chi_top = 4
    b2 = 2

    @property
    def K(self) -> "DivisorClass":
        return DivisorClass(-2, -2 - self.ell)

    @property
    def K2(self) -> int:
        return intersect(self.K, self.K, self)


@dataclass(frozen=True)
class DivisorClass:
    cC: int
    cF: int

    def __add__(self, other):
        if isinstance(other, SlopeVector) and not isinstance(other, DivisorClass):
            return other + self
        return DivisorClass(self.cC + other.cC, self.cF + other.cF)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DivisorClass(-self.cC, -self.cF)

    def __mul__(self, k: int):
        if isinstance(k, Fraction) and k.denominator != 1:
            return SlopeVector(self.cC * k, self.cF * k)
        return DivisorClass(self.cC * int(k), self.cF * int(k))

    __rmul__ = __mul__

    def __str__(self):
        return f"{self.cC}C{self.cF:+d}f"


@dataclass(frozen=True)
class SlopeVector:
    cC: Fraction
    cF: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cC", _q(self.cC))
        object.__setattr__(self, "cF", _q(self.cF))

    def __add__(self, other):
        return SlopeVector(self.cC + other.cC, self.cF + other.cF)

    def __sub__(self, other):
        return SlopeVector(self.cC - other.cC, self.cF - other.cF)

    def __neg__(self):
        return SlopeVector(-self.cC, -self.cF)

    def __mul__(self, k):
        return SlopeVector(self.cC * k, self.cF * k)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.cC == 0 and self.cF == 0


Cls = Union[DivisorClass, SlopeVector]

C = DivisorClass(1, 0)
F = DivisorClass(0, 1)


def intersect(x: Cls, y: Cls, S: Surface):
    v = -S.ell * x.cC * y.cC + x.cC * y.cF + x.cF * y.cC
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


class Side(str, enum.Enum):
    MINUS = "minus"
    EXACT = "exact"
    PLUS = "plus"


@dataclass(frozen=True)
class Polarization:
    """``J_{m,n}`` plus a tie-break direction for sign evaluations.

    ``side=plus`` evaluates at ``J + eps f``; ``side=minus`` at
    ``J + eps (C + ell f)``.  For ``m > 0`` the latter has the same sign as
    ``J - eps f`` on the wall, and it also reaches the chamber next to
    ``J_{0,1}``.
    """

    m: Fraction
    n: Fraction
    side: Side = Side.EXACT

    def __post_init__(self):
        object.__setattr__(self, "m", _q(self.m))
        object.__setattr__(self, "n", _q(self.n))
        object.__setattr__(self, "side", Side(self.side))
        if self.m < 0 or self.n < 0 or (self.m == 0 and self.n == 0):
            raise LatticeError(f"J_({self.m},{self.n}) is outside the closed ample cone")

    def vector(self, S: Surface) -> SlopeVector:
        return SlopeVector(self.m, self.m * S.ell + self.n)

    def square(self, S: Surface) -> Fraction:
        return self.m * (S.ell * self.m + 2 * self.n)

    @property
    def is_ample(self) -> bool:
        return self.m > 0 and self.n > 0

    def dot(self, c: Cls, S: Surface):
        return intersect(c, self.vector(S), S)

    def sign(self, c: Cls, S: Surface) -> int:
        """``sgn(c . J)`` with the tie-break of ``side``."""
        s = sgn(self.dot(c, S))
        if s or self.side is Side.EXACT:
            return s
        if self.side is Side.PLUS:
            return sgn(intersect(c, F, S))
        return sgn(intersect(c, C + S.ell * F, S))

    def sign_mn(self, cm, cn) -> int:
        """Sign of the linear form ``cm*m + cn*n`` at this J (same tie-break).

        ``cm`` is ``c.(C+ell f)`` and ``cn`` is ``c.f``.
        """
        s = sgn(cm * self.m + cn * self.n)
        if s or self.side is Side.EXACT:
            return s
        return sgn(cn) if self.side is Side.PLUS else sgn(cm)

    def with_side(self, side) -> "Polarization":
        return Polarization(self.m, self.n, side)

    def __str__(self):
        return f"J({self.m},{self.n},{self.side.value})"


def as_polarization(J) -> Polarization:
    if isinstance(J, Polarization):
        return J
    if isinstance(J, str):
        parts = [p.strip() for p in J.split(",")]
        side = parts[2] if len(parts) > 2 else "exact"
        return Polarization(Fraction(parts[0]), Fraction(parts[1]), side)
    return Polarization(*J)


@dataclass(frozen=True)
class ChernVector:
    r: int
    c1: DivisorClass
    c2: Fraction

    def __post_init__(self):
        if self.r < 1:
            raise LatticeError("rank must be positive")
        object.__setattr__(self, "c2", _q(self.c2))

    @property
    def mu(self) -> SlopeVector:
        return SlopeVector(Fraction(self.c1.cC, self.r), Fraction(self.c1.cF, self.r))

    def is_primitive(self) -> bool:
        return math.gcd(self.r, self.c1.cC, self.c1.cF) == 1

    def __str__(self):
        return f"({self.r}, {self.c1}, {self.c2})"


def discriminant(g: ChernVector, S: Surface) -> Fraction:
    c1sq = intersect(g.c1, g.c1, S)
    return (g.c2 - Fraction(g.r - 1, 2 * g.r) * c1sq) / g.r


def moduli_dim(g: ChernVector, S: Surface) -> int:
    d = 2 * g.r**2 * discriminant(g, S) - g.r**2 * S.chi_O + 1
    if d.denominator != 1:
        raise NonIntegerDimension(f"dimension {d} of {g} is not an integer")
    if d < 0:
        raise NegativeDimension(f"dimension {d} of {g} is negative")
    return int(d)


def project_pm(c: Cls, J: Polarization, S: Surface) -> tuple[SlopeVector, SlopeVector]:
    J2 = J.square(S)
    if J2 == 0:
        raise DegeneratePolarization(f"{J} has J^2 = 0")
    Jv = J.vector(S)
    plus = Jv * (Fraction(intersect(c, Jv, S)) / J2)
    minus = SlopeVector(c.cC, c.cF) - plus
    return plus, minus


def pairing(g1: ChernVector, g2: ChernVector, S: Surface) -> int:
    """``<G1, G2> = r1 r2 (mu2 - mu1) . K``."""
    d = g1.r * g2.c1 - g2.r * g1.c1
    return intersect(d, S.K, S)


def ical(g1: ChernVector, g2: ChernVector, J: Polarization, S: Surface):
    """``I(G1, G2; J) = r1 r2 (mu2 - mu1) . J``."""
    d = g1.r * g2.c1 - g2.r * g1.c1
    return intersect(d, J.vector(S), S)


def filtration_discriminant(parts: list[ChernVector], S: Surface) -> Fraction:
    """Right-hand side of the discriminant decomposition for a filtration.

    ``parts`` are the successive quotients ``E_1, ..., E_s``.
    """
    r = sum(p.r for p in parts)
    total = sum(Fraction(p.r, r) * discriminant(p, S) for p in parts)
    rank_F = 0
    c1_F = DivisorClass(0, 0)
    prev = None
    for p in parts:
        rank_F += p.r
        c1_F = c1_F + p.c1
        cur = (rank_F, c1_F)
        if prev is not None:
            (ra, ca), (rb, cb) = prev, cur
            dmu = SlopeVector(Fraction(ca.cC, ra) - Fraction(cb.cC, rb),
                              Fraction(ca.cF, ra) - Fraction(cb.cF, rb))
            total -= Fraction(ra * rb, 2 * r * p.r) * intersect(dmu, dmu, S)
        prev = cur
    return total


def extension_c2(parts: list[ChernVector], S: Surface) -> Fraction:
    """c2 of a sheaf filtered by ``parts`` (Whitney sum formula)."""
    total = sum((p.c2 for p in parts), Fraction(0))
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            total += intersect(parts[i].c1, parts[j].c1, S)
    return total


# ---------------------------------------------------------------------------
# walls
# ---------------------------------------------------------------------------


def _min_c2(r: int, c1: DivisorClass, S: Surface) -> int:
    """Smallest integer c2 with non-negative discriminant."""
    if r == 1:
        return 0
    need = Fraction(r - 1, 2 * r) * intersect(c1, c1, S)
    return math.ceil(need)


@dataclass(frozen=True)
class Wall:
    """A wall ``m:n`` together with one decomposition of the charge.

    Constituents carry the smallest admissible c2, so that ``extension_c2`` of
    the decomposition never exceeds the c2 of the decomposed charge.
    """

    m: int
    n: int
    decomposition: tuple[tuple[ChernVector, int], ...] = field(default=())

    @property
    def ratio(self):
        return math.inf if self.n == 0 else Fraction(self.m, self.n)

    @property
    def polarization(self) -> Polarization:
        return Polarization(self.m, self.n)

    @property
    def kind(self) -> str:
        ranks = sorted(g.r for g, k in self.decomposition for _ in range(k))
        return "+".join(str(x) for x in ranks)

    def constituents(self) -> list[ChernVector]:
        return [g for g, k in self.decomposition for _ in range(k)]


def _wall_ratio(d: DivisorClass, S: Surface):
    """(m, n) with d.J_{m,n} = 0, m, n >= 0, J^2 > 0; or None."""
    # d.J_{m,n} = m * d.(C + ell f) + n * d.f
    cm = intersect(d, C + S.ell * F, S)
    cn = intersect(d, F, S)
    if cm == 0 and cn == 0:
        return None
    # m cm + n cn = 0 with m, n >= 0
    if cm == 0:
        m, n = 1, 0
    elif cn == 0:
        m, n = 0, 1
    elif (cm > 0) == (cn > 0):
        return None
    else:
        m, n = abs(cn), abs(cm)
    g = math.gcd(m, n)
    m, n = m // g, n // g
    if m == 0:
        # J_{0,1} has J^2 = 0: not a wall of the ample cone
        return None
    return m, n


def _pair_bound(r1: int, r2: int, delta: Fraction, S: Surface):
    """Enumeration box for ``xi = r1 c1(E2) - r2 c1(E1) = x C + y f``.

    Non-negative constituent discriminants force ``-xi^2 <= 2 r^2 r1 r2 Delta``.
    On a wall of the closed cone ``x y <= 0``, so ``-xi^2 = ell x^2 + 2|x||y|``.
    """
    r = r1 + r2
    lim = 2 * r * r * r1 * r2 * delta
    xmax = math.isqrt(math.floor(lim / S.ell)) + 1
    return lim, xmax


def walls(g: ChernVector, S: Surface) -> list[Wall]:
    """All walls of marginal stability for ``g`` (rank 2 or 3)."""
    if g.r not in (2, 3):
        raise UnsupportedRank(f"walls need rank 2 or 3, got {g.r}")
    delta = discriminant(g, S)
    if delta < 0:
        return []
    out: dict[tuple, Wall] = {}
    if g.r == 2:
        splits = [(1, 1)]
    else:
        splits = [(1, 2), (2, 1)]
    for r1, r2 in splits:
        lim, xmax = _pair_bound(r1, r2, delta, S)
        for x in range(-xmax, xmax + 1):
            ymax = math.floor(lim / (2 * abs(x))) + 1 if x else 0
            for y in range(-ymax, ymax + 1):
                xi = DivisorClass(x, y)
                # xi = r1 c1(E2) - r2 c1(E1), c1(E1) + c1(E2) = c1
                # => c1(E2) = (xi + r2 c1) / r
                numC, numF = x + r2 * g.c1.cC, y + r2 * g.c1.cF
                if numC % g.r or numF % g.r:
                    continue
                u2 = DivisorClass(numC // g.r, numF // g.r)
                u1 = g.c1 - u2
                _add_wall(out, g, S, [(r1, u1), (r2, u2)])
    if g.r == 3:
        _triple_walls(out, g, S, delta)
    return sorted(out.values(), key=lambda w: (w.ratio, w.kind, repr(w.decomposition)))


def _constituents(parts, S):
    return [ChernVector(r, c1, _min_c2(r, c1, S)) for r, c1 in parts]


def _add_wall(out, g, S, parts):
    cons = _constituents(parts, S)
    # slopes must coincide on a wall with J^2 > 0
    ratio = None
    for i in range(len(cons)):
        for j in range(i + 1, len(cons)):
            d = cons[i].r * cons[j].c1 - cons[j].r * cons[i].c1
            rr = _wall_ratio(d, S)
            if rr is None:
                return
            if ratio is None:
                ratio = rr
            elif rr != ratio:
                return
    if extension_c2(cons, S) > g.c2:
        return
    key_parts = tuple(sorted((c.r, c.c1.cC, c.c1.cF) for c in cons))
    key = (ratio, key_parts)
    if key in out:
        return
    counts: dict[ChernVector, int] = {}
    for c in cons:
        counts[c] = counts.get(c, 0) + 1
    dec = tuple(sorted(counts.items(), key=lambda kv: (kv[0].r, kv[0].c1.cC, kv[0].c1.cF)))
    out[key] = Wall(ratio[0], ratio[1], dec)


def _triple_walls(out, g, S, delta):
    # A triple wall u1+u2+u3 also shows up as the 1+2 wall u1 + (u2+u3) at the
    # same ratio, and u2+u3 is then a rank-2 wall of the remaining charge.
    pairs = [w for w in out.values() if w.kind == "1+2"]
    for w in pairs:
        (g1, _), (g2, _) = w.decomposition
        u1 = g1.c1
        rest = ChernVector(2, g.c1 - u1, g.c2 - intersect(u1, g.c1 - u1, S))
        if discriminant(rest, S) < 0:
            continue
        for inner in walls(rest, S):
            if (inner.m, inner.n) != (w.m, w.n):
                continue
            u2, u3 = [c.c1 for c in inner.constituents()]
            _add_wall(out, g, S, [(1, u1), (1, u2), (1, u3)])


def walls_bruteforce(g: ChernVector, S: Surface, box: int = 50) -> list[Wall]:
    """Same walls by scanning every constituent c1 in a fixed box."""
    if g.r not in (2, 3):
        raise UnsupportedRank(g.r)
    if discriminant(g, S) < 0:
        return []
    out: dict[tuple, Wall] = {}
    rng = range(-box, box + 1)
    if g.r == 2:
        for b, a in product(rng, rng):
            u2 = DivisorClass(b, -a)
            _add_wall(out, g, S, [(1, g.c1 - u2), (1, u2)])
    else:
        for b, a in product(rng, rng):
            u = DivisorClass(b, -a)
            _add_wall(out, g, S, [(1, u), (2, g.c1 - u)])
            _add_wall(out, g, S, [(2, g.c1 - u), (1, u)])
        small = range(-box // 5, box // 5 + 1)
        for b1, a1, b2, a2 in product(small, small, small, small):
            u1, u2 = DivisorClass(b1, -a1), DivisorClass(b2, -a2)
            _add_wall(out, g, S, [(1, u1), (1, u2), (1, g.c1 - u1 - u2)])
    return sorted(out.values(), key=lambda w: (w.ratio, w.kind, repr(w.decomposition)))
