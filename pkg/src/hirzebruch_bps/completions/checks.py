"""Seeded numerical check suites: modularity, quasi-periodicity and anomaly."""

from __future__ import annotations

import random

from ..lattice import Polarization, Surface
from .completion import (
    CheckReport,
    anomaly_check,
    cplx,
    d_r_theta_residual,
    dtaubar_f2hat,
    dtaubar_fd,
    f2hat_euler,
    s_law_residual,
    t_law_residual,
    upsilon_vanishing,
)
from .jacobi import NearPole, min_theta_distance, quasi_periodicity_residual

EXCLUSION = 1e-8


def sample_tau(rng: random.Random) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.4))


def sample_z(rng: random.Random, tau: complex) -> complex:
    """Small ``z`` away from the poles of ``1/theta_1(4z)``."""
    while True:
        z = complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.05, 0.05) * tau.imag)
        if min_theta_distance(4 * z, tau) > 1e-3:
            return z


def modularity_reports(seed: int = 0, points: int = 20, ells=(1, 2, 3)) -> list[CheckReport]:
    """T and S laws for every ``(alpha, beta)`` and ``ell`` at ``points`` random points.

    The T report carries the residual of the multiplier without ``ell`` as
    ``residual_without_ell``.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(points):
        tau = sample_tau(rng)
        z = sample_z(rng, tau)
        for ell in ells:
            for alpha in (0, 1):
                for beta in (0, 1):
                    pt = {"ell": ell, "alpha": alpha, "beta": beta, "z": cplx(z), "tau": cplx(tau)}
                    t = t_law_residual(ell, alpha, beta, z, tau)
                    t0 = t_law_residual(ell, alpha, beta, z, tau, with_ell=False)
                    out.append(CheckReport("T-law", pt, t, 1e-8, {"residual_without_ell": t0}))
                    out.append(CheckReport("S-law", pt, s_law_residual(ell, alpha, beta, z, tau), 1e-6))
    return out


def quasi_periodicity_reports(seed: int = 0, points: int = 100) -> list[CheckReport]:
    rng = random.Random(seed)
    out = []
    while len(out) < points:
        tau = sample_tau(rng)
        u, v, z = (complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4) * tau.imag) for _ in range(3))
        if min(min_theta_distance(x, tau) for x in (u, v, z, u + z, v + z, u + v + z)) < EXCLUSION:
            continue
        try:
            res = quasi_periodicity_residual(u, v, z, tau)
            res_no_i = quasi_periodicity_residual(u, v, z, tau, with_i=False)
        except NearPole:
            continue
        pt = {"u": cplx(u), "v": cplx(v), "z": cplx(z), "tau": cplx(tau)}
        out.append(CheckReport("quasi-periodicity", pt, res, 1e-8, {"residual_without_i": res_no_i}))
    return out


def dtaubar_report(ell: int = 1, c1=(1, -1), m=1, n=1, tau: complex = 0.11 + 0.93j) -> CheckReport:
    """Closed-form ``d/d tau-bar`` of ``f-hat_2`` against a finite difference."""
    fd = dtaubar_fd(lambda t: f2hat_euler(ell, c1, m, n, t).value, tau)
    cf = dtaubar_f2hat(ell, c1, m, n, tau).value
    opp = dtaubar_f2hat(ell, c1, m, n, tau, opposite=True).value
    pt = {"ell": ell, "c1": list(c1), "J": [m, n], "tau": cplx(tau)}
    return CheckReport(
        "dtaubar", pt, abs(fd - cf) / abs(fd), 1e-4, {"residual_opposite_sign": abs(fd - opp) / abs(fd)}
    )


ANOMALY_POINTS = (
    (1, (1, 1), (0.03 + 0.01j, -0.02 + 0.015j), 0.11 + 0.93j),
    (1, (2, 3), (0.01 - 0.02j, 0.04 + 0.01j), -0.23 + 1.07j),
    (2, (1, 2), (-0.05 + 0.02j, 0.01 - 0.01j), 0.31 + 0.88j),
    (3, (2, 1), (0.02 + 0.0j, 0.03 + 0.02j), -0.07 + 0.97j),
    (1, (3, 1), (0.0 + 0.01j, -0.01 + 0.0j), 0.42 + 1.21j),
)


def anomaly_reports(seed: int | None = None) -> list[CheckReport]:
    """Full anomaly equation at five points, D_r annihilation and Upsilon vanishing."""
    points = ANOMALY_POINTS
    if seed is not None:
        rng = random.Random(seed)
        points = tuple(
            (ell, J, (complex(rng.uniform(-0.05, 0.05), rng.uniform(-0.02, 0.02)),
                      complex(rng.uniform(-0.05, 0.05), rng.uniform(-0.02, 0.02))), sample_tau(rng))
            for ell, J, _, _ in ANOMALY_POINTS
        )
    out = [anomaly_check(ell, Polarization(*J), rho, tau) for ell, J, rho, tau in points]
    tau = points[0][3]
    rho = points[0][2]
    for r, mu in ((1, (0, 0)), (2, (0, 0)), (2, (1, 0)), (2, (0, 1)), (2, (1, 1))):
        res = d_r_theta_residual(r, mu, rho, tau, Surface(1), Polarization(1, 2))
        out.append(CheckReport("D_r Theta", {"r": r, "mu": list(mu), "tau": cplx(tau)}, res, 1e-6))
    out.append(upsilon_vanishing(1, 2, 1, tau))
    out.append(upsilon_vanishing(1, 1, 0, tau))
    out.append(dtaubar_report())
    return out
