"""The ten acceptance criteria, each with its stated tolerance and time budget.

Every test appends one ``PASS``/``FAIL`` line that the terminal summary
prints at the end of the run.  Run the file alone with ``python
tests/test_acceptance.py`` to get the same lines without pytest.
"""

from __future__ import annotations

import math
import time

import pytest

from hirzebruch_bps.completions.checks import anomaly_reports, modularity_reports, quasi_periodicity_reports
from hirzebruch_bps.invariants.appell import appell_oracle_agrees
from hirzebruch_bps.invariants.blowup import blowup_check
from hirzebruch_bps.invariants.extraction import extract_refined, h_exponent, invariant_records
from hirzebruch_bps.invariants.genfun import BetaDivisible, f2, f3, h_series
from hirzebruch_bps.invariants.indefinite import indef_theta, indef_theta_box
from hirzebruch_bps.invariants.wallcross import path_transport, transport_charge, wallcross_transport
from hirzebruch_bps.lattice import ChernVector, DivisorClass, Polarization, Surface, discriminant, moduli_dim
from hirzebruch_bps.lattice import NegativeDimension

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

J_EDGE = Polarization(1, 0, "plus")  # chamber next to J_{1,0} = C + f
J_VANISH = Polarization(0, 1, "minus")  # chamber next to J_{0,1} = f
GENERIC_J = (Polarization(1, 1, "plus"), Polarization(2, 1, "minus"), Polarization(1, 3, "plus"))

TABLE1 = {
    2: ([1, 2, 4, 4], 18),
    3: ([1, 3, 9, 20, 37, 53, 59], 305),
    4: ([1, 3, 10, 25, 59, 119, 218, 338, 450, 490], 2936),
    5: ([1, 3, 10, 26, 64, 141, 294, 562, 997, 1602, 2301, 2886, 3117], 20891),
}
TABLE2 = {
    2: ([1, 1], 3),
    3: ([1, 3, 8, 14, 17], 69),
    4: ([1, 3, 10, 24, 53, 93, 136, 152], 792),
    5: ([1, 3, 10, 26, 63, 135, 268, 470, 725, 950, 1043], 6345),
    6: ([1, 3, 10, 26, 65, 145, 310, 612, 1144, 1970, 3113, 4391, 5462, 5873], 40377),
}
TABLE3 = {
    3: ([1, 2, 3], 9),
    4: ([1, 3, 9, 19, 31, 36], 162),
    5: ([1, 3, 10, 25, 58, 113, 192, 264, 297], 1629),
    6: ([1, 3, 10, 26, 64, 140, 288, 536, 907, 1348, 1733, 1885], 11997),
}


def record(n: int, title: str, ok: bool, seconds: float, budget: float, detail: str = "") -> None:
    status = "PASS" if ok and seconds < budget else "FAIL"
    line = f"[{status}] criterion {n:2d} {title}: {seconds:.2f}s (budget {budget:g}s)"
    if detail:
        line += f"; {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert seconds < budget, line


def _table(n, title, a, expected, budget):
    t = time.perf_counter()
    recs = invariant_records(1, 3, DivisorClass(-1, -a), sorted(expected), J_EDGE)
    got = {int(r.gamma.c2): (r.betti_even[: r.dim // 2 + 1], r.euler) for r in recs}
    dt = time.perf_counter() - t
    bad = [c2 for c2 in expected if got.get(c2) != expected[c2]]
    record(n, title, not bad, dt, budget, f"euler {[got[c][1] for c in sorted(got)]}" + (f", mismatched c2 {bad}" if bad else ""))


def test_criterion_01_table1():
    _table(1, "Table 1 (c1 = -C)", 0, TABLE1, 60)


def test_criterion_02_table2():
    _table(2, "Table 2 (c1 = -C-f)", 1, TABLE2, 120)


def test_criterion_03_table3():
    _table(3, "Table 3 (c1 = -C-2f)", 2, TABLE3, 120)


def test_criterion_04_blowup():
    t = time.perf_counter()
    r1 = blowup_check(1, 6)
    r2 = blowup_check(2, 6)
    dt = time.perf_counter() - t
    failing = [x.name for x in r2.results if not x.holds]
    record(4, "rank-2 blow-up identities", r1.holds and not r2.holds, dt, 10,
           f"ell=1 holds={r1.holds}, ell=2 failing: {failing}")


def test_criterion_05_vanishing_chamber():
    t = time.perf_counter()
    nonzero = []
    for ell in (1, 2, 3):
        for a in (0, 1):
            if not f2(ell, a, 1, J_VANISH, 5).is_zero():
                nonzero.append(("f2", ell, a, 1))
        for a in (0, 1, 2):
            for b in (1, 2):
                if not f3(ell, a, b, J_VANISH, 5).is_zero():
                    nonzero.append(("f3", ell, a, b))
    dt = time.perf_counter() - t
    record(5, "vanishing chamber next to J_{0,1}", not nonzero, dt, 10, f"nonzero: {nonzero}" if nonzero else "")


def test_criterion_06_wall_crossing():
    t = time.perf_counter()
    S = Surface(1)
    problems = []
    # rank 2, c1 = C - f: wall sum equals the difference of closed forms
    c1 = DivisorClass(1, -1)
    d = wallcross_transport(1, 2, c1, J_VANISH, J_EDGE, 4)
    if not d.same_terms(h_series(1, 2, c1, J_EDGE, 4) - h_series(1, 2, c1, J_VANISH, 4)):
        problems.append("rank-2 series")
    h = h_series(1, 2, c1, J_EDGE, 4)
    for c2 in range(0, 6):
        g = ChernVector(2, c1, c2)
        if discriminant(g, S) < 0 or h_exponent(g, S) > 4:
            continue
        if transport_charge(g, J_VANISH, J_EDGE, S) != extract_refined(h, g, S):
            problems.append(f"rank-2 c2={c2}")
    # rank 3: two paths through the cone agree
    checked = 0
    for a in (0, 1, 2):
        c1 = DivisorClass(-1, -a)
        for c2 in range(0, 7):
            g = ChernVector(3, c1, c2)
            if discriminant(g, S) < 0 or h_exponent(g, S) > 4:
                continue
            direct = path_transport(g, [J_VANISH, J_EDGE], S)
            detour = path_transport(g, [J_VANISH, Polarization(1, 3, "minus"), Polarization(2, 1, "plus"), J_EDGE], S)
            exact = extract_refined(h_series(1, 3, c1, J_EDGE, 4), g, S)
            checked += 1
            if direct != detour or direct != exact:
                problems.append(f"rank-3 c1=-C-{a}f c2={c2}")
    dt = time.perf_counter() - t
    record(6, "wall-crossing consistency", not problems, dt, 60, f"{checked} rank-3 charges; {problems or 'all exact'}")


def sweep_charges():
    """(ell, r, c1, [c2...]) with primitive c1 and 0 <= r Delta <= 5."""
    for ell in (1, 2, 3):
        S = Surface(ell)
        for r in (2, 3):
            for b in range(r):
                for a in range(r):
                    if math.gcd(r, b, a) != 1:
                        continue
                    c1 = DivisorClass(b, -a)
                    c2s = []
                    for c2 in range(-6, 12):
                        g = ChernVector(r, c1, c2)
                        if not 0 <= r * discriminant(g, S) <= 5:
                            continue
                        try:
                            moduli_dim(g, S)
                        except NegativeDimension:
                            continue
                        c2s.append(c2)
                    yield ell, r, c1, c2s


def test_criterion_07_property_sweep():
    t = time.perf_counter()
    bad, n, unsupported = [], 0, 0
    for ell, r, c1, c2s in sweep_charges():
        for J in GENERIC_J:
            if r == 3 and c1.cC % 3 == 0:
                with pytest.raises(BetaDivisible):
                    invariant_records(ell, r, c1, c2s, J)
                unsupported += 1
                continue
            for rec in invariant_records(ell, r, c1, c2s, J):
                n += 1
                p, d = rec.poincare, rec.dim
                ok = (
                    len(p) == 2 * d + 1
                    and not any(p[1::2])
                    and list(p) == list(p[::-1])
                    and min(p) >= 0
                    and (not any(p) or p[0] == 1)
                    and set(rec.euler_routes) == {"poincare", "limit", "derivative"}
                    and len(set(rec.euler_routes.values())) == 1
                )
                if not ok:
                    bad.append((ell, r, str(c1), str(rec.gamma.c2), str(J)))
    dt = time.perf_counter() - t
    record(7, "Poincare polynomial properties", not bad and n > 0, dt, 300,
           f"{n} records, {unsupported} (c1, J) with beta = 0 mod 3 skipped" + (f", bad {bad[:5]}" if bad else ""))


def test_criterion_08_lattice_oracles():
    t = time.perf_counter()
    bad = []
    Js = GENERIC_J + (J_EDGE, Polarization(3, 1, "minus"))
    for ell in (1, 2, 3):
        for a in (0, 1):
            for b in (0, 1):
                for J in Js:
                    if not indef_theta(ell, a, b, J, 4).same_terms(indef_theta_box(ell, a, b, J, 4, 60), 4):
                        bad.append(("theta", ell, a, b, str(J)))
                if not appell_oracle_agrees(ell, a, b, 4, 60):
                    bad.append(("appell", ell, a, b))
    dt = time.perf_counter() - t
    record(8, "lattice sums vs box enumeration", not bad, dt, 60, f"mismatches {bad}" if bad else "")


def test_criterion_09_numeric_modularity():
    t = time.perf_counter()
    mod = modularity_reports(seed=0, points=20)
    qp = quasi_periodicity_reports(seed=0, points=100)
    dt = time.perf_counter() - t
    T = [r for r in mod if r.check == "T-law"]
    S = [r for r in mod if r.check == "S-law"]
    ok = all(r.residual < 1e-8 for r in T) and all(r.residual < 1e-6 for r in S) and all(r.residual < 1e-8 for r in qp)
    ok = ok and len(T) == len(S) == 240 and len(qp) == 100
    detail = (
        f"max T {max(r.residual for r in T):.1e}, max S {max(r.residual for r in S):.1e}, "
        f"max quasi-period {max(r.residual for r in qp):.1e}; "
        f"variant checks: T multiplier without ell fails at {sum(r.extra['residual_without_ell'] > 1e-8 for r in T)} points, "
        f"quasi-period without the factor i has min residual {min(r.extra['residual_without_i'] for r in qp):.1e}"
    )
    record(9, "numeric modularity", ok, dt, 120, detail)


def test_criterion_10_anomaly():
    t = time.perf_counter()
    reps = anomaly_reports()
    dt = time.perf_counter() - t
    by = {}
    for r in reps:
        by.setdefault(r.check, []).append(r)
    dtb = by["dtaubar"][0]
    anom = by["anomaly"]
    ups = by["upsilon"]
    ok = (
        dtb.residual < 1e-4
        and len(anom) == 5
        and all(r.residual < 1e-4 for r in anom)
        and len(ups) == 2
        and all(r.passed for r in ups)
    )
    detail = (
        f"d/dtaubar rel err {dtb.residual:.1e}, max anomaly residual {max(r.residual for r in anom):.1e}, "
        f"Upsilon at J=-K and J=C+f {[r.residual for r in ups]}; "
        f"opposite sign gives {dtb.extra['residual_opposite_sign']:.1e} and "
        f"{min(r.extra['residual_opposite_sign'] for r in anom):.1e}"
    )
    record(10, "anomaly structure", ok, dt, 120, detail)


if __name__ == "__main__":
    import sys
    import warnings

    warnings.simplefilter("ignore")
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
