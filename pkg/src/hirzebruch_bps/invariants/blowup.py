"""Blow-up relations between the rank-2 Appell functions at level one.

``Sigma_1`` is the blow-up of ``P^2`` in a point, so the ``beta = 0`` and
``beta = 1`` functions differ by the ratio ``B_{2,1} / B_{2,0}``.  For
``ell > 1`` the relation has no reason to hold and the check reports it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..lattice import UnsupportedRank
from ..qseries import PoleSeries, blowup_factor, theta
from .appell import appell_A


@dataclass(frozen=True)
class IdentityResult:
    name: str
    holds: bool
    first_difference: Fraction | None = None

    def to_json(self) -> dict:
        fd = self.first_difference
        return {"identity": self.name, "holds": self.holds, "first_difference": None if fd is None else str(fd)}


@dataclass(frozen=True)
class BlowupReport:
    ell: int
    qmax: Fraction
    results: tuple[IdentityResult, ...] = field(default=())

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.results)

    def to_json(self) -> dict:
        return {
            "check": "blowup",
            "ell": self.ell,
            "qmax": str(self.qmax),
            "pass": self.holds,
            "identities": [r.to_json() for r in self.results],
        }


def _compare(name: str, lhs, rhs, qmax) -> IdentityResult:
    lhs = PoleSeries.lift(lhs).truncate(qmax)
    rhs = PoleSeries.lift(rhs).truncate(qmax)
    top = min(lhs.qmax, rhs.qmax)
    if lhs.same_terms(rhs, top):
        return IdentityResult(name, True)
    return IdentityResult(name, False, lhs.first_difference(rhs))


def blowup_check(ell: int = 1, qmax=6, r: int = 2) -> BlowupReport:
    """Check ``A_{ell,(a,0)} = (theta_2 / theta_3)^(+-1) A_{ell,(a,1)}`` to ``qmax``.

    Both sides are cross-multiplied by the theta functions at ``(2z, 2tau)``
    so no division is needed.
    """
    if r != 2:
        raise UnsupportedRank("the Appell blow-up identities concern rank 2")
    qmax = Fraction(qmax)
    pad = qmax + 1
    th2 = theta(2, 2, 2, pad)
    th3 = theta(3, 2, 2, pad)
    out = [
        _compare(
            "A(1,0) theta3 = theta2 A(1,1)",
            PoleSeries.lift(appell_A(ell, 1, 0, pad)) * th3,
            PoleSeries.lift(appell_A(ell, 1, 1, pad)) * th2,
            qmax,
        ),
        _compare(
            "A(0,0) theta2 = theta3 A(0,1)",
            PoleSeries.lift(appell_A(ell, 0, 0, pad)) * th2,
            PoleSeries.lift(appell_A(ell, 0, 1, pad)) * th3,
            qmax,
        ),
        _compare(
            "B(2,1) theta3 = B(2,0) theta2",
            blowup_factor(2, 1, pad) * th3,
            blowup_factor(2, 0, pad) * th2,
            qmax,
        ),
    ]
    return BlowupReport(ell, qmax, tuple(out))
