import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hirzebruch_bps.completions import completion as cp
from hirzebruch_bps.completions import jacobi as jc
from hirzebruch_bps.completions.checks import anomaly_reports, modularity_reports, quasi_periodicity_reports, sample_tau
from hirzebruch_bps.completions.special import (
    E,
    DomainError,
    NumericResult,
    beta_half,
    beta_nu,
    beta_three_halves,
    gaussian_tail,
    t_beta_three_halves,
)
from hirzebruch_bps.invariants.appell import appell_A
from hirzebruch_bps.invariants.indefinite import indef_theta
from hirzebruch_bps.lattice import Polarization, Surface
from hirzebruch_bps.qseries import PoleSeries

TAU = 0.13 + 0.91j
Z = 0.031 - 0.012j


# --- special functions -----------------------------------------------------


def test_E_sign_identity_on_grid():
    for k in range(-300, 301):
        x = k / 100
        sgn = (x > 0) - (x < 0)
        assert abs(E(x) - sgn * (1 - beta_half(x * x))) < 1e-10


@given(st.floats(0.01, 6))
@settings(deadline=None)
def test_beta_against_quadrature(x):
    # beta_nu(x) = int_x^oo u^-nu exp(-pi u) du
    for nu, fn in ((0.5, beta_half), (1.5, beta_three_halves)):
        want, _ = integrate.quad(lambda u: u**-nu * math.exp(-math.pi * u), x, math.inf, epsabs=0, epsrel=1e-12)
        assert fn(x) == pytest.approx(want, rel=1e-9)


def test_beta_domains():
    with pytest.raises(DomainError):
        beta_half(-1.0)
    with pytest.raises(DomainError):
        beta_three_halves(0.0)
    with pytest.raises(DomainError):
        beta_nu(2.5, 1.0)
    assert beta_nu("1/2", 0.3) == beta_half(0.3)


def test_t_beta_limit():
    y = 0.8
    assert t_beta_three_halves(0.0, y) == pytest.approx(2 / math.sqrt(y))
    t = 1e-7
    assert t_beta_three_halves(t, y) == pytest.approx(t * beta_three_halves(t * t * y), rel=1e-9)


def test_gaussian_tail_bounds_sum():
    a, b, start = 0.3, 1.1, 4
    exact = sum(math.exp(-a * n * n + b * n) for n in range(start, 400))
    assert exact <= gaussian_tail(a, b, start) <= 2 * exact


def test_numeric_result_propagates_bounds():
    x = NumericResult(1 + 1j, 1e-9)
    y = NumericResult(2.0, 1e-8)
    assert (x + y).tail_bound == pytest.approx(1.1e-8)
    assert (x * y).tail_bound >= 2e-9


# --- theta, eta and Appell functions ---------------------------------------


def test_theta1_odd_and_zero():
    assert abs(jc.theta1(0, TAU).value) < 1e-15
    assert jc.theta1(-Z, TAU).value == pytest.approx(-jc.theta1(Z, TAU).value, abs=1e-14)


def test_eta_modular_s():
    tau = TAU
    lhs = jc.eta(-1 / tau)
    rhs = cmath.sqrt(-1j * tau) * jc.eta(tau)
    assert abs(lhs - rhs) < 1e-13


def test_jacobi_derivative_identity():
    # theta_1'(0) = -2 pi eta^3 with the factor i in theta_1
    h = 1e-5
    d = (jc.theta1(h, TAU).value - jc.theta1(-h, TAU).value) / (2 * h)
    assert abs(d + 2 * math.pi * jc.eta(TAU) ** 3) < 1e-7


def test_near_pole_raises():
    with pytest.raises(jc.NearPole):
        jc.appell_numeric(1, 0.0, 0.3, TAU)


def test_tau_must_be_in_upper_half_plane():
    with pytest.raises(ValueError):
        jc.theta1(0.1, 0.3 - 0.1j)


def _honors(fn, loose, tight):
    a = fn(loose)
    b = fn(tight)
    assert abs(a.value - b.value) <= a.tail_bound + 1e-15 * max(1.0, abs(b.value))


@pytest.mark.parametrize(
    "fn",
    [
        lambda tol: jc.theta1(Z, TAU, tol),
        lambda tol: jc.theta_half(2, Z, TAU, tol),
        lambda tol: jc.R(0.2 + 0.3j, TAU, tol),
        lambda tol: jc.appell_numeric(2, 0.2 + 0.1j, 0.1 - 0.2j, TAU, tol),
        lambda tol: cp.appell_nonholomorphic(1, 1, 0, Z, TAU, tol),
        lambda tol: cp.theta_hat(2, 1, 1, 1, 2, Z, TAU, tol),
        lambda tol: cp.f2hat_nonholomorphic(1, (1, -1), 1, 1, TAU, tol),
        lambda tol: cp.siegel_narain_theta(2, (1, 0), (0.01, 0.02j), TAU, Surface(1), Polarization(1, 2), tol),
    ],
)
def test_tail_bounds_are_honest(fn):
    _honors(fn, 1e-5, 1e-17)


# --- holomorphic limit -----------------------------------------------------

TAU_HIGH = 0.21 + 30j


@pytest.mark.parametrize("ell,alpha,beta", [(1, 0, 1), (2, 1, 1), (3, 1, 0), (1, 0, 0)])
def test_appell_completion_tends_to_exact_series(ell, alpha, beta):
    z = 0.013
    exact = PoleSeries.lift(appell_A(ell, alpha, beta, 2))
    w = cmath.exp(2j * math.pi * z)
    q_of = lambda ex: cmath.exp(2j * math.pi * TAU_HIGH * float(ex))
    series = exact.body.evalf(q_of, w)
    for m in exact.den:
        series /= w**m - w**-m
    assert abs(cp.A_hat_spec(ell, alpha, beta, z, TAU_HIGH).value - series) < 1e-10


@pytest.mark.parametrize("ell,alpha,beta,m,n", [(1, 1, 1, 1, 1), (2, 0, 1, 2, 1), (3, 1, 1, 1, 3)])
def test_theta_hat_tends_to_exact_series(ell, alpha, beta, m, n):
    z = 0.017
    exact = indef_theta(ell, alpha, beta, Polarization(m, n), 2)
    q_of = lambda ex: cmath.exp(2j * math.pi * TAU_HIGH * float(ex))
    series = exact.evalf(q_of, cmath.exp(2j * math.pi * z))
    assert abs(cp.theta_hat(ell, alpha, beta, m, n, z, TAU_HIGH).value - series) < 1e-10


def test_f2hat_tends_to_exact_series():
    val = cp.f2hat_euler(1, (1, -1), 1, 2, TAU_HIGH).value
    assert abs(val - cp.holomorphic_f2(1, (1, -1), 1, 2, TAU_HIGH)) < 1e-10


# --- transformation laws ---------------------------------------------------


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_modular_laws_random(seed):
    rng = random.Random(seed)
    tau = sample_tau(rng)
    z = complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.02, 0.02))
    for ell in (1, 2):
        for a in (0, 1):
            for b in (0, 1):
                assert cp.t_law_residual(ell, a, b, z, tau) < 1e-8
                assert cp.s_law_residual(ell, a, b, z, tau) < 1e-6


def test_t_multiplier_needs_ell():
    # the two agree exactly when (ell - 1) beta^2 / 4 is an integer
    assert cp.t_multiplier(2, 0, 1) != pytest.approx(cp.t_multiplier(2, 0, 1, with_ell=False))
    assert cp.t_multiplier(5, 1, 1) == pytest.approx(cp.t_multiplier(5, 1, 1, with_ell=False))
    assert cp.t_multiplier(3, 1, 0) == pytest.approx(cp.t_multiplier(3, 1, 0, with_ell=False))


def test_quasi_periodicity_needs_i():
    u, v, z = 0.11 + 0.05j, -0.23 + 0.1j, 0.07 - 0.03j
    assert jc.quasi_periodicity_residual(u, v, z, TAU) < 1e-12
    assert jc.quasi_periodicity_residual(u, v, z, TAU, with_i=False) > 1e-3


def test_suites_are_seeded():
    a = [r.to_json() for r in modularity_reports(seed=3, points=2)]
    b = [r.to_json() for r in modularity_reports(seed=3, points=2)]
    assert a == b
    assert len(quasi_periodicity_reports(seed=1, points=5)) == 5


# --- anomaly ---------------------------------------------------------------


def test_dtaubar_closed_form():
    tau = 0.05 + 1.1j
    fd = cp.dtaubar_fd(lambda t: cp.f2hat_euler(2, (1, 0), 1, 1, t).value, tau)
    cf = cp.dtaubar_f2hat(2, (1, 0), 1, 1, tau).value
    assert abs(fd - cf) < 1e-6 * abs(fd)


def test_f2hat_holomorphic_part_has_zero_tau_bar_derivative():
    tau = 0.05 + 1.1j
    d = cp.dtaubar_fd(lambda t: cp.holomorphic_f2(1, (1, 1), 1, 1, t), tau)
    assert abs(d) < 1e-8


def test_upsilon_is_not_identically_zero():
    assert abs(cp.upsilon(1, (1, 0), 1, 2, TAU)) > 1e-6


def test_upsilon_vanishes_at_special_polarizations():
    assert cp.upsilon_vanishing(1, 2, 1, TAU).passed
    assert cp.upsilon_vanishing(1, 1, 0, TAU).passed


def test_anomaly_report_json():
    reps = anomaly_reports()
    d = reps[0].to_json()
    assert {"check", "point", "residual", "tolerance", "pass"} <= set(d)
    assert all(r.passed for r in reps)
    # the opposite overall sign is clearly ruled out
    assert all(r.extra["residual_opposite_sign"] > 1 for r in reps if r.check == "anomaly")


def test_degenerate_polarization():
    from hirzebruch_bps.lattice import DegeneratePolarization

    with pytest.raises(DegeneratePolarization):
        cp.theta_hat(1, 1, 1, 0, 1, Z, TAU)
