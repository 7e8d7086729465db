"""Non-holomorphic completions of the rank-2 functions and the anomaly.

Classes on ``Sigma_ell`` are written ``k = p C + s f``; then
``k^2 = -ell p^2 + 2 p s``, ``k.J_{m,n} = p n + s m`` and
``k.K = (ell - 2) p - 2 s``.  Every lattice sum here is dominated by
``exp(-pi y P(k) / 2)`` (or ``exp(-pi y P(k) / r)``) with the positive form
``P = k_+^2 - k_-^2 = 2 k_+^2 - k^2``; its smallest eigenvalue fixes the
square box that is summed and bounds what is left outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..lattice import DegeneratePolarization, DivisorClass, Polarization, Side, Surface, sgn
from ..qseries import PoleSeries
from .jacobi import appell_spec, e, eta
from .special import NumericResult, beta_half, gaussian_tail, sgn_minus_E, sgn_minus_E_exp, t_beta_three_halves

TOL = 1e-17


# ---------------------------------------------------------------------------
# lattice helpers
# ---------------------------------------------------------------------------


def _J(ell: int, m, n) -> tuple[float, float, float]:
    """``(m, n, J^2)`` as floats; raises on ``J^2 <= 0``."""
    m, n = float(m), float(n)
    J2 = m * (ell * m + 2 * n)
    if J2 <= 0 or m < 0 or n < 0:
        raise DegeneratePolarization(f"J_({m},{n}) has J^2 = {J2} on Sigma_{ell}")
    return m, n, J2


def _P(ell, m, n, J2, p, s) -> float:
    return 2 * (p * n + s * m) ** 2 / J2 + ell * p * p - 2 * p * s


def _min_eig(ell: int, m: float, n: float, J2: float) -> float:
    a = 2 * n * n / J2 + ell
    b = 2 * n * m / J2 - 1
    c = 2 * m * m / J2
    return (a + c) / 2 - math.sqrt(((a - c) / 2) ** 2 + b * b)


def _box(decay: float, slope: float, tol: float, scale: float = 1.0) -> tuple[int, float]:
    """Half-width ``N`` of a square box and a bound on the sum outside it.

    Terms are assumed below ``scale * exp(-decay (p^2 + s^2) + slope (|p| + |s|))``.
    """
    full = 1 + 2 * gaussian_tail(decay, slope, 1)
    N = 1
    while True:
        out = 2 * (2 * gaussian_tail(decay, slope, N + 1)) * full * scale
        if out < tol:
            return N, out
        N += 1


def _classes(N: int, pmod: int, smod: int, step: int = 1):
    """``(p, s)`` with ``|p|, |s| <= N`` in the given residue classes."""
    for p in range(-N, N + 1):
        if (p - pmod) % step:
            continue
        for s in range(-N, N + 1):
            if (s - smod) % step:
                continue
            yield p, s


def _class_pair(c1) -> tuple[int, int]:
    if isinstance(c1, DivisorClass):
        return int(c1.cC), int(c1.cF)
    p, s = c1
    return int(p), int(s)


def _KJ(ell, m, n) -> float:
    # J = m C + (m ell + n) f
    return (ell - 2) * m - 2 * (m * ell + n)


# ---------------------------------------------------------------------------
# completed Appell functions
# ---------------------------------------------------------------------------


def appell_nonholomorphic(ell: int, alpha: int, beta: int, z: complex, tau: complex, tol: float = TOL) -> NumericResult:
    """``A-hat - A`` for ``A_{ell,(alpha,beta)}``.

    Half the sum over ``k mod ell`` of a theta series in ``n1`` times an
    E-weighted series in ``n2`` whose weights kill the growth of ``q^(-n2^2/4 ell)``.
    """
    y = tau.imag
    iz = z.imag / y
    two_l = 2 * ell
    shift = 2 * (ell + 2) * iz
    a1 = math.pi * y / (2 * ell)
    b1 = 2 * math.pi * abs((ell - 2) * z.imag) / ell
    b2 = 2 * math.pi * (ell + 2) * abs(z.imag) / ell + 2 * math.pi * abs(shift) * y / ell
    full1 = 1 + 2 * gaussian_tail(a1, b1, 1)
    N1 = 1
    while 2 * gaussian_tail(a1, b1, N1 + 1) * 2 * full1 * ell > tol:
        N1 += 1
    N2 = int(abs(shift)) + 1
    while 2 * gaussian_tail(a1, b2, N2 + 1) * 2 * full1 * ell > tol:
        N2 += 1
    full2 = 2 * (N2 + 1) + 2 * gaussian_tail(a1, b2, N2 + 1)
    total = 0j
    for k in range(ell):
        r1 = (2 * k + beta * ell + alpha) % two_l
        r2 = (-2 * k - alpha) % two_l
        th = sum(
            e(z * (ell - 2) * n1 / ell + tau * n1 * n1 / (4 * ell))
            for n1 in range(-N1, N1 + 1)
            if n1 % two_l == r1
        )
        ns = 0j
        for n2 in range(-N2, N2 + 1):
            if n2 % two_l != r2:
                continue
            # |e(-z (ell+2) n2 / ell - tau n2^2 / 4 ell)| = exp(grow)
            grow = math.pi * y * n2 * n2 / (2 * ell) + 2 * math.pi * (ell + 2) * n2 * z.imag / ell
            wgt = sgn_minus_E_exp(sgn(n2), (n2 + shift) * math.sqrt(y / ell), grow)
            ns += wgt * e(-z.real * (ell + 2) * n2 / ell - tau.real * n2 * n2 / (4 * ell))
        total += th * ns
    bound = ell * (2 * gaussian_tail(a1, b1, N1 + 1) * full2 + 2 * gaussian_tail(a1, b2, N2 + 1) * full1)
    return NumericResult(0.5 * total, 0.5 * bound)


def A_hat_spec(ell: int, alpha: int, beta: int, z: complex, tau: complex, tol: float = TOL) -> NumericResult:
    """``A-hat_{ell,(alpha,beta)}(z, tau)``.

    The holomorphic part is the closed Appell form, which agrees with the
    exact q-series to rounding and converges for every ``tau``.
    """
    return appell_nonholomorphic(ell, alpha, beta, z, tau, tol) + appell_spec(ell, alpha, beta, z, tau)


def t_multiplier(ell: int, alpha: int, beta: int, with_ell: bool = True) -> complex:
    """Phase of ``A-hat_{ell,(alpha,beta)}`` under ``tau -> tau + 1``.

    The leading powers ``q^((ell+2)/4)`` and ``q^(ell/4)`` of the ``beta = 1``
    functions give ``e((ell beta^2 + 2 alpha beta)/4)``; ``with_ell=False``
    drops the ``ell``.
    """
    lead = ell if with_ell else 1
    return e((lead * beta * beta + 2 * alpha * beta) / 4)


def t_law_residual(ell: int, alpha: int, beta: int, z: complex, tau: complex, with_ell: bool = True) -> float:
    lhs = A_hat_spec(ell, alpha, beta, z, tau + 1).value
    rhs = t_multiplier(ell, alpha, beta, with_ell) * A_hat_spec(ell, alpha, beta, z, tau).value
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def s_law_residual(ell: int, alpha: int, beta: int, z: complex, tau: complex) -> float:
    """``A-hat(z/tau, -1/tau)`` against ``tau/2 e(-8 z^2/tau)`` times the signed sum."""
    lhs = A_hat_spec(ell, alpha, beta, z / tau, -1 / tau).value
    acc = 0j
    for at in (0, 1):
        for bt in (0, 1):
            sign = (-1) ** (ell * beta * bt + alpha * bt + beta * at)
            acc += sign * A_hat_spec(ell, at, bt, z, tau).value
    rhs = tau / 2 * e(-8 * z * z / tau) * acc
    return abs(lhs - rhs) / max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# completed indefinite theta function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaHatParts:
    """``theta-hat = holomorphic + first + second``.

    ``first`` carries ``E(...) - sgn(...)`` of the first argument and
    ``second`` carries ``sgn(...) - E(...)`` of the second.
    """

    holomorphic: NumericResult
    first: NumericResult
    second: NumericResult

    @property
    def total(self) -> NumericResult:
        return self.holomorphic + self.first + self.second


def _cone_ratio(ell, m, n, J2, samples: int = 3600) -> float:
    """Lower bound of ``-k^2 / P(k)`` where the two signs of theta differ.

    There ``k = p C + s f`` has ``sgn(s) != sgn(k.J)``; the ratio is
    minimised on a fine angular grid and lowered by 10% for safety.
    """
    best = 1.0
    for i in range(samples):
        th = 2 * math.pi * i / samples
        p, s = math.cos(th), math.sin(th)
        if sgn(round(s, 12)) == sgn(round(p * n + s * m, 12)):
            continue
        best = min(best, (ell * p * p - 2 * p * s) / _P(ell, m, n, J2, p, s))
    return max(0.9 * best, 1e-3)


def theta_hat_parts(ell: int, alpha: int, beta: int, m, n, z: complex, tau: complex, tol: float = TOL) -> ThetaHatParts:
    m, n, J2 = _J(ell, m, n)
    y = tau.imag
    iz = z.imag / y
    c1 = 2 * (ell + 2) * iz
    c2 = 2 * (2 * n + (ell + 2) * m) * iz
    kappa = min(1.0, _cone_ratio(ell, m, n, J2))
    decay = math.pi * y / 2 * _min_eig(ell, m, n, J2) * kappa
    slope = (
        2 * math.pi * abs(z.imag) * (ell + 2)
        + 2 * math.pi * abs(c1) * y / ell
        + 2 * math.pi * abs(c2) * y * (m + n) / J2
    )
    N, tail = _box(decay, slope, tol, scale=1.5)
    N += int(abs(c1) + abs(c2)) + 2
    hol = first = second = 0j
    for a in range(-(N // 2) - 1, N // 2 + 2):
        yy = 2 * a - alpha
        s1 = sgn(-yy)
        w1 = sgn_minus_E(s1, (-yy + c1) * math.sqrt(y / ell))
        for b in range(-(N // 2) - 1, N // 2 + 2):
            x = 2 * b - beta
            D = x * n - yy * m
            s2 = sgn(D)
            w2 = sgn_minus_E(s2, (D + c2) * math.sqrt(y / J2))
            if s1 == s2 and not w1 and not w2:
                continue
            mono = e(z * ((ell - 2) * x + 2 * yy) + tau * (ell * x * x / 4 + x * yy / 2))
            hol += 0.5 * (s1 - s2) * mono
            first -= 0.5 * w1 * mono
            second += 0.5 * w2 * mono
    return ThetaHatParts(NumericResult(hol, tail), NumericResult(first, tail), NumericResult(second, tail))


def theta_hat(ell: int, alpha: int, beta: int, m, n, z: complex, tau: complex, tol: float = TOL) -> NumericResult:
    """``theta-hat^{m,n}_{alpha,beta}(z, tau)``: the E-difference lattice sum."""
    return theta_hat_parts(ell, alpha, beta, m, n, z, tau, tol).total


# ---------------------------------------------------------------------------
# f-hat_2(tau) and its tau-bar derivative
# ---------------------------------------------------------------------------


def holomorphic_f2(ell: int, c1, m, n, tau: complex, qmax=None) -> complex:
    """Numeric ``f_{2,c1}(tau; J_{m,n})`` from the exact series (``sgn(0) = 0``)."""
    from ..invariants.extraction import numeric_from_f
    from ..invariants.genfun import f_series

    p, s = _class_pair(c1)
    if qmax is None:
        # coefficients grow slowly; |q|^qmax below 1e-17 is plenty
        qmax = max(3, math.ceil(17 * math.log(10) / (2 * math.pi * tau.imag)))
    J = Polarization(Fraction(m), Fraction(n), Side.EXACT)
    f = f_series(ell, 2, DivisorClass(p, s), J, Fraction(qmax))
    fn = numeric_from_f(PoleSeries.lift(f), 2, qmax)
    return sum(complex(cf.coeff(0)) * e(tau * float(ex)) for ex, cf in fn.items())


@dataclass(frozen=True)
class _Term:
    p: int
    s: int
    cJ: float
    cp2: float
    cm2: float
    Kc: int
    Kcm: float


def _completion_terms(ell: int, c1, m, n, y: float, tol: float):
    """Classes ``c = p C + s f`` in ``-c1 + 2 H^2`` and the box tail bound.

    Every summand below is at most ``A (|p| + |s|) exp(-pi y P / 2)``, and
    ``|p| + |s| <= exp(|p| + |s|)`` is absorbed into the slope.
    """
    m, n, J2 = _J(ell, m, n)
    KJ = _KJ(ell, m, n)
    A = abs(KJ) / (4 * math.pi * math.sqrt(J2 * y)) + max(abs(ell - 2), 2) + abs(KJ) * (m + n) / J2
    N, tail = _box(math.pi * y / 2 * _min_eig(ell, m, n, J2), 1.0, tol, scale=A)
    p0, s0 = _class_pair(c1)
    terms = []
    for p, s in _classes(N, -p0, -s0, 2):
        cJ = p * n + s * m
        cp2 = cJ * cJ / J2
        Kc = (ell - 2) * p - 2 * s
        terms.append(_Term(p, s, cJ, cp2, -ell * p * p + 2 * p * s - cp2, Kc, Kc - KJ * cJ / J2))
    return terms, tail, KJ, J2


def f2hat_nonholomorphic(ell: int, c1, m, n, tau: complex, tol: float = TOL) -> NumericResult:
    """Completion term of ``f-hat_{2,c1}``.

    ``sum_c (K.J |c.J| beta_{3/2}(c_+^2 y) / (8 pi J^2) - K.c_- sgn(c.J) beta_{1/2}(c_+^2 y) / 4) (-1)^{K.c} q^{-c^2/4}``;
    at ``c.J = 0`` the first weight is its limit ``K.J / (4 pi sqrt(J^2 y))``.
    """
    y = tau.imag
    terms, tail, KJ, J2 = _completion_terms(ell, c1, m, n, y, tol)
    acc = 0j
    for t in terms:
        w = KJ / (8 * math.pi * math.sqrt(J2)) * t_beta_three_halves(math.sqrt(t.cp2), y)
        w -= 0.25 * t.Kcm * sgn(t.cJ) * beta_half(t.cp2 * y)
        acc += w * (-1) ** t.Kc * e(-tau * (t.cp2 + t.cm2) / 4)
    return NumericResult(acc, tail)


def f2hat_euler(ell: int, c1, m, n, tau: complex, qmax=None) -> NumericResult:
    """``f-hat_{2,c1}(tau; J_{m,n})``: exact holomorphic part plus the completion."""
    return f2hat_nonholomorphic(ell, c1, m, n, tau) + holomorphic_f2(ell, c1, m, n, tau, qmax)


def dtaubar_f2hat(ell: int, c1, m, n, tau: complex, opposite: bool = False) -> NumericResult:
    """Closed form of ``d f-hat_{2,c1} / d tau-bar``.

    Term-by-term differentiation gives
    ``-i K.J / (16 pi sqrt(J^2) y^{3/2}) sum_c (-1)^{K.c} q^{-c_-^2/4} qbar^{c_+^2/4}``
    ``+ i / (8 sqrt y) sum_c K.c_- (c.J / sqrt J^2) (-1)^{K.c} q^{-c_-^2/4} qbar^{c_+^2/4}``.
    ``opposite=True`` returns the same expression with both signs flipped.
    """
    y = tau.imag
    terms, tail, KJ, J2 = _completion_terms(ell, c1, m, n, y, TOL)
    sq = math.sqrt(J2)
    A = B = 0j
    for t in terms:
        # qbar = e(-tau-bar)
        mono = (-1) ** t.Kc * e(-tau * t.cm2 / 4 - tau.conjugate() * t.cp2 / 4)
        A += mono
        B += t.Kcm * t.cJ / sq * mono
    val = -1j * KJ / (16 * math.pi * sq * y ** 1.5) * A + 1j / (8 * math.sqrt(y)) * B
    return NumericResult(-val if opposite else val, tail)


def _central(func, tau: complex, step: float, sign: int) -> complex:
    dx = (func(tau + step) - func(tau - step)) / (2 * step)
    dy = (func(tau + 1j * step) - func(tau - 1j * step)) / (2 * step)
    return 0.5 * (dx + sign * 1j * dy)


def dtaubar_fd(func, tau: complex, h: float = 1e-4) -> complex:
    """``(d_x + i d_y) / 2`` by central differences and one Richardson step."""
    hh = h * max(1.0, abs(tau))
    return (4 * _central(func, tau, hh / 2, 1) - _central(func, tau, hh, 1)) / 3


def dtau_fd(func, tau: complex, h: float = 1e-4) -> complex:
    """``(d_x - i d_y) / 2``, same stencil."""
    hh = h * max(1.0, abs(tau))
    return (4 * _central(func, tau, hh / 2, -1) - _central(func, tau, hh, -1)) / 3


# ---------------------------------------------------------------------------
# Siegel-Narain theta function
# ---------------------------------------------------------------------------


def siegel_narain_theta(r: int, mu, rho, tau: complex, S: Surface, J: Polarization, tol: float = TOL) -> NumericResult:
    """``Theta_{r,mu}(rho, tau) = sum_k (-1)^{r k.K} q^{k_+^2/2r} qbar^{-k_-^2/2r} e(rho.k)``.

    ``k`` runs over ``r H^2 + r K / 2 + mu``; ``mu`` is a class ``(p, s)``
    (or a :class:`DivisorClass`) and ``rho`` a pair of complex components
    along ``C`` and ``f``.
    """
    ell = S.ell
    m, n, J2 = _J(ell, J.m, J.n)
    y = tau.imag
    mp, ms = _class_pair(mu)
    # r K / 2 = -r C - r (2 + ell) / 2 f
    off_p = Fraction(-r + mp)
    off_s = Fraction(-r * (2 + ell), 2) + ms
    rc, rf = complex(rho[0]), complex(rho[1])
    slope = 2 * math.pi * (abs(rc.imag) * (ell + 1) + abs(rf.imag))
    N, tail = _box(math.pi * y * _min_eig(ell, m, n, J2) / r, slope, tol)
    lim = N // r + abs(int(off_p)) + abs(int(off_s)) + 2
    acc = 0j
    for i in range(-lim, lim + 1):
        p = off_p + r * i
        pf = float(p)
        for j in range(-lim, lim + 1):
            s = off_s + r * j
            sf = float(s)
            kJ = pf * n + sf * m
            kp2 = kJ * kJ / J2
            km2 = -ell * pf * pf + 2 * pf * sf - kp2
            rKK = r * ((ell - 2) * p - 2 * s)
            phase = (-1) ** int(rKK) if rKK.denominator == 1 else e(float(rKK) / 2)
            rk = -ell * rc * pf + rc * sf + rf * pf  # rho.k
            acc += phase * e(tau * kp2 / (2 * r) + tau.conjugate() * km2 / (2 * r) + rk)
    return NumericResult(acc, tail)


def d_r_theta_residual(r: int, mu, rho, tau: complex, S: Surface, J: Polarization, h: float = 1e-3) -> float:
    """``|D_r Theta| / |d_tau Theta|`` for ``D_r = d_tau + i/(4 pi r) d^2_{rho_+}``.

    ``rho_+`` moves ``rho`` along ``J / sqrt(J^2)``.
    """
    ell = S.ell
    m, n, J2 = _J(ell, J.m, J.n)
    jc, jf = m / math.sqrt(J2), (m * ell + n) / math.sqrt(J2)
    rc, rf = rho

    def th_tau(t):
        return siegel_narain_theta(r, mu, rho, t, S, J).value

    def th_rho(x):
        return siegel_narain_theta(r, mu, (rc + x * jc, rf + x * jf), tau, S, J).value

    f0 = th_rho(0.0)

    def d2(k):
        return (th_rho(k) - 2 * f0 + th_rho(-k)) / (k * k)

    dt = dtau_fd(th_tau, tau)
    D = dt + 1j / (4 * math.pi * r) * (4 * d2(h / 2) - d2(h)) / 3
    return abs(D) / max(abs(dt), 1e-300)


# ---------------------------------------------------------------------------
# holomorphic anomaly
# ---------------------------------------------------------------------------

RESIDUES = ((0, 0), (1, 0), (0, 1), (1, 1))  # classes p C + s f mod 2


def upsilon_terms(ell: int, c1, m, n, tau: complex) -> dict:
    """``K.c_- (c.J / sqrt J^2) (-1)^{K.c} q^{c_+^2/4} qbar^{-c_-^2/4}`` keyed by ``(p, s)``."""
    terms, tail, KJ, J2 = _completion_terms(ell, c1, m, n, tau.imag, TOL)
    sq = math.sqrt(J2)
    return {
        (t.p, t.s): t.Kcm * t.cJ / sq * (-1) ** t.Kc * e(tau * t.cp2 / 4 + tau.conjugate() * t.cm2 / 4)
        for t in terms
    }


def upsilon(ell: int, c1, m, n, tau: complex) -> complex:
    return sum(upsilon_terms(ell, c1, m, n, tau).values())


def anomaly_sides(ell: int, J: Polarization, rho, tau: complex, fd: bool = True) -> dict:
    """Both sides of the rank-2 anomaly equation at one point.

    ``lhs = sum_mu conj(eta^-8 d_taubar f-hat_{2,mu}) Theta_{2,mu}(rho, tau)``
    with the derivative by finite differences (``fd=True``) or closed form.
    ``rhs = c_term + r_term`` where
    ``c_term = i K.J / (16 pi sqrt(J^2) y^{3/2}) Z_1^2`` and
    ``r_term = -i / (8 sqrt y) conj(eta^-8) sum_mu Upsilon_mu Theta_{2,mu}``;
    ``rhs_opposite`` flips both.
    """
    S = Surface(ell)
    m, n, J2 = _J(ell, J.m, J.n)
    y = tau.imag
    eta8 = eta(tau) ** -8
    lhs = ups = 0j
    for mu in RESIDUES:
        th2 = siegel_narain_theta(2, mu, rho, tau, S, J).value
        if fd:
            d = dtaubar_fd(lambda t: f2hat_nonholomorphic(ell, mu, m, n, t).value, tau)
        else:
            d = dtaubar_f2hat(ell, mu, m, n, tau).value
        lhs += (eta8 * d).conjugate() * th2
        ups += upsilon(ell, mu, m, n, tau) * th2
    Z1 = (eta(tau) ** -4).conjugate() * siegel_narain_theta(1, (0, 0), rho, tau, S, J).value
    c_term = 1j * _KJ(ell, m, n) / (16 * math.pi * math.sqrt(J2) * y ** 1.5) * Z1 * Z1
    r_term = -1j / (8 * math.sqrt(y)) * eta8.conjugate() * ups
    return {"lhs": lhs, "rhs": c_term + r_term, "rhs_opposite": -(c_term + r_term), "c_term": c_term, "r_term": r_term}


@dataclass(frozen=True)
class CheckReport:
    check: str
    point: dict
    residual: float
    tolerance: float
    extra: dict | None = None

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def to_json(self) -> dict:
        d = {
            "check": self.check,
            "point": self.point,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.extra:
            d.update(self.extra)
        return d


def _num(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def cplx(x: complex) -> list[float]:
    return [x.real, x.imag]


def anomaly_check(ell: int, J: Polarization, rho, tau: complex, tol: float = 1e-4) -> CheckReport:
    """Relative residual of the anomaly equation, derivative taken numerically.

    ``residual_opposite_sign`` reports the same comparison with the right
    side negated.
    """
    sides = anomaly_sides(ell, J, rho, tau)
    scale = max(abs(sides["lhs"]), abs(sides["rhs"]), 1e-300)
    res = abs(sides["lhs"] - sides["rhs"]) / scale
    opp = abs(sides["lhs"] - sides["rhs_opposite"]) / scale
    point = {"ell": ell, "J": [_num(J.m), _num(J.n)], "rho": [cplx(complex(x)) for x in rho], "tau": cplx(tau)}
    return CheckReport("anomaly", point, res, tol, {"residual_opposite_sign": opp})


def upsilon_vanishing(ell: int, m, n, tau: complex, tol: float = 1e-10) -> CheckReport:
    """Largest ``|Upsilon|`` contribution once each ``c`` is paired with its
    reflection ``c + 2 (c.C) C`` (its own partner when ``c.C = 0``).

    With ``K`` proportional to ``J`` each term is already zero; with
    ``J.C = 0`` and ``K_- = C`` the reflected pairs cancel.
    """
    worst = 0.0
    for mu in RESIDUES:
        terms = upsilon_terms(ell, mu, m, n, tau)
        seen = set()
        for (p, s), v in terms.items():
            if (p, s) in seen:
                continue
            cC = -ell * p + s
            partner = (p + 2 * cC, s)
            seen.add((p, s))
            if partner == (p, s) or partner not in terms:
                # unpaired terms sit at the box edge where they are negligible
                worst = max(worst, abs(v))
                continue
            seen.add(partner)
            worst = max(worst, abs(v + terms[partner]))
    point = {"ell": ell, "J": [_num(m), _num(n)], "tau": cplx(tau)}
    return CheckReport("upsilon", point, worst, tol)
