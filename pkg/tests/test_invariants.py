import json
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hirzebruch_bps.invariants.appell import appell_A, appell_oracle_agrees
from hirzebruch_bps.invariants.blowup import blowup_check
from hirzebruch_bps.invariants.extraction import (
    NotPalindromic,
    NotPolynomial,
    betti_extract,
    integer_to_rational,
    invariant_records,
    rational_to_integer,
)
from hirzebruch_bps.invariants.genfun import (
    BetaDivisible,
    ProvenanceWarning,
    f2,
    f3,
    f_from_h,
    f_series,
    h_from_f,
    h_series,
    residue_class,
)
from hirzebruch_bps.invariants.indefinite import DivergentSum, f2_wall_sum, indef_theta
from hirzebruch_bps.invariants.wallcross import transport_charge, wallcross_transport
from hirzebruch_bps.lattice import ChernVector, DivisorClass, Polarization, Surface, UnsupportedRank
from hirzebruch_bps.qseries import PoleSeries, WLaurent, WRational

J_EDGE = Polarization(1, 0, "plus")
J_VANISH = Polarization(0, 1, "minus")


def goettsche_betti(n: int) -> list[int]:
    """Even Betti numbers of Hilb^n of a surface with b2 = 2 and b1 = b3 = 0.

    Coefficient of q^n in prod_k 1/((1 - t^(k-1) q^k)(1 - t^k q^k)^2 (1 - t^(k+1) q^k)),
    t = w^2, computed with plain dict polynomials.
    """
    series = {(0, 0): 1}  # (q power, t power) -> coefficient
    for k in range(1, n + 1):
        for shift in (k - 1, k, k, k + 1):
            new: dict = {}
            for (a, b), c in series.items():
                j = 0
                while a + j * k <= n:
                    key = (a + j * k, b + j * shift)
                    new[key] = new.get(key, 0) + c
                    j += 1
            series = new
    out = [0] * (2 * n + 1)
    for (a, b), c in series.items():
        if a == n:
            out[b] += c
    return out


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_rank1_is_hilbert_scheme(n):
    (rec,) = invariant_records(1, 1, DivisorClass(0, 0), [n], J_EDGE)
    want = goettsche_betti(n)
    assert rec.betti_even == want
    assert rec.euler == sum(want)


def test_goettsche_euler_numbers():
    # prod (1 - q^n)^-4
    assert [sum(goettsche_betti(n)) for n in range(5)] == [1, 4, 14, 40, 105]


def test_residue_class():
    assert residue_class(3, DivisorClass(-1, -2)) == (2, 2)
    assert residue_class(2, DivisorClass(1, 1)) == (1, 1)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_h_f_roundtrip(r):
    f = f_series(1, r, DivisorClass(1, 0), J_EDGE, 3)
    h = h_from_f(f, r)
    assert f_from_h(h, r).same_terms(f, h.qmax + Fraction(r, 6))


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0, 1])
def test_rank2_closed_form_matches_wall_sum(ell, alpha):
    for J in (J_EDGE, Polarization(1, 1, "plus"), Polarization(2, 1, "minus")):
        closed = PoleSeries.lift(f2(ell, alpha, 1, J, 4))
        walls = f2_wall_sum(ell, alpha, J, 4)
        assert closed.same_terms(PoleSeries.lift(walls), 4)
        assert walls.same_terms(f2_wall_sum(ell, alpha, J, 4, box=40), 4)


def test_theta_divergence_is_reported():
    with pytest.raises(DivergentSum):
        indef_theta(1, 0, 0, Polarization(0, 1, "plus"), 2)


@pytest.mark.parametrize("ell,alpha,beta", [(1, 0, 0), (1, 1, 1), (2, 1, 0), (3, 0, 1)])
def test_appell_against_box(ell, alpha, beta):
    assert appell_oracle_agrees(ell, alpha, beta, 3, 40)


def test_appell_pole_only_for_beta_zero():
    assert PoleSeries.lift(appell_A(1, 0, 1, 3)).den == ()
    assert PoleSeries.lift(appell_A(1, 0, 0, 3)).den != ()


def test_rank3_needs_beta_nonzero():
    with pytest.raises(BetaDivisible):
        f3(1, 1, 0, J_EDGE, 2)


def test_rank4_unsupported():
    with pytest.raises(UnsupportedRank):
        f_series(1, 4, DivisorClass(1, 0), J_EDGE, 2)


def test_provenance_warning_for_large_ell():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f3(3, 0, 1, Polarization(1, 1, "plus"), 1)
    assert any(issubclass(c.category, ProvenanceWarning) for c in caught)


def test_blowup_report_json():
    rep = blowup_check(1, 3).to_json()
    assert rep["check"] == "blowup" and rep["pass"] is True
    assert json.loads(json.dumps(rep)) == rep
    assert blowup_check(2, 3).to_json()["pass"] is False


def test_record_json_schema():
    (rec,) = invariant_records(1, 3, DivisorClass(-1, 0), [3], J_EDGE)
    d = rec.to_json()
    assert set(d) == {"ell", "r", "c1", "c2", "J", "dim", "betti", "euler", "warnings"}
    assert d["c1"] == [-1, 0]
    assert d["J"] == {"m": 1, "n": 0, "side": "plus"}
    assert d["euler"] == 305


def test_extraction_rejects_bad_polynomials():
    S = Surface(1)
    g = ChernVector(2, DivisorClass(1, 0), 1)  # dim 1
    lopsided = WRational(WLaurent({1: 2, -1: 1}), (1,))  # p = 2 w^2 + 1
    with pytest.raises(NotPalindromic):
        betti_extract(lopsided, g, S)
    with pytest.raises(NotPolynomial):
        betti_extract(WRational(WLaurent({0: 1}), (1, 1)), g, S)


def test_multicover_roundtrip():
    S = Surface(1)
    g = ChernVector(2, DivisorClass(0, 0), 2)
    half = ChernVector(1, DivisorClass(0, 0), 1)  # ch2 halves
    omega = {g: WRational(WLaurent({2: 1, 0: 3, -2: 1}), (1,)), half: WRational(WLaurent({0: 1}), (1,))}
    bar = {x: integer_to_rational(omega, x, S) for x in omega}
    assert rational_to_integer(bar, g, S) == omega[g].reduce()


def test_transport_series_vs_closed_forms():
    c1 = DivisorClass(1, 0)
    Ja, Jb = Polarization(1, 2, "plus"), Polarization(3, 1, "minus")
    d = wallcross_transport(2, 2, c1, Ja, Jb, 3)
    assert d.same_terms(h_series(2, 2, c1, Jb, 3) - h_series(2, 2, c1, Ja, 3))


@given(st.integers(0, 1), st.integers(1, 4))
@settings(max_examples=10, deadline=None)
def test_transport_is_antisymmetric(a, c2):
    S = Surface(1)
    g = ChernVector(2, DivisorClass(1, -a), c2)
    fwd = transport_charge(g, J_VANISH, J_EDGE, S)
    back = transport_charge(g, J_EDGE, J_VANISH, S)
    assert not (fwd + back).reduce()
