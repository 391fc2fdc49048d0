"""Quick invariant suite behind ``xi-spectra verify``."""
from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np

from .arithmetic import build_lambda_table
from .config import ExperimentConfig
from .kernel import xi, zeta
from .mfunction import m_density, mtilde_complex, mtilde_dirichlet, mu_sigma
from .spacing import build_samples, rho_omega, telescoping_residual
from .zeros import (
    ScanReport,
    interlacing_check,
    read_cache,
    scan,
    target_value,
    verify_completeness,
)

Result = tuple[str, bool, str]


def _timed(name: str, func) -> Result:
    t0 = time.perf_counter()
    ok, detail = func()
    return name, ok, f"{detail} [{time.perf_counter() - t0:.2f} s]"


def functional_equation() -> tuple[bool, str]:
    worst = 0.0
    for sigma in np.linspace(-2.0, 3.0, 10):
        for t in np.linspace(0.5, 100.0, 20):
            s = complex(sigma, t)
            worst = max(worst, abs(xi(s).ratio(xi(1.0 - s)) - 1.0))
    return worst <= 1e-10, f"max |xi(s)/xi(1-s) - 1| = {worst:.2e}"


def zeta_series(seed: int = 7) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    n = np.arange(1, 200_001, dtype=float)
    worst = 0.0
    for _ in range(50):
        s = complex(rng.uniform(1.1, 3.0), rng.uniform(-30.0, 30.0))
        # tail beyond N is below N^(1-sigma)/(sigma-1); add the Euler-Maclaurin head of it
        big_n = n[-1]
        series = np.sum(n ** (-s)) + big_n ** (1 - s) / (s - 1) - 0.5 * big_n ** (-s)
        worst = max(worst, abs(series / zeta(s) - 1.0))
    return worst <= 1e-10, f"max relative difference {worst:.2e}"


def zero_records(report: ScanReport) -> tuple[bool, str]:
    bad = []
    for z in report.positive_zeros:
        f_lo = target_value(report.omega, report.family, z.bracket_lo)
        f_hi = target_value(report.omega, report.family, z.bracket_hi)
        res = abs(target_value(report.omega, report.family, z.gamma))
        if not (z.bracket_lo < z.gamma < z.bracket_hi and f_lo * f_hi < 0 and res <= 1e-6):
            bad.append(z.index_n)
    return not bad, f"{len(report.positive_zeros)} zeros, violations at {bad[:5]}" if bad else (
        f"{len(report.positive_zeros)} zeros bracketed with residual <= 1e-6"
    )


def run_suite(cfg: ExperimentConfig, zeros_cache: str | None = None, perturb: int | None = None) -> list[Result]:
    results = [
        _timed("kernel functional equation", functional_equation),
        _timed("zeta vs Dirichlet series", zeta_series),
    ]
    if zeros_cache is not None:
        report = read_cache(zeros_cache)
        if perturb is not None:
            zs = list(report.zeros)
            for i, z in enumerate(zs):
                if z.index_n == perturb:
                    zs[i] = replace(z, gamma=z.gamma + 1e-3)
            report.zeros = zs
        reports = [report]
    else:
        t_top = min(cfg.T, 300.0) if cfg.T >= 2.0 else 300.0
        reports = [scan(cfg.omega, fam, t_top, cfg.step_factor, beyond=10.0) for fam in ("A", "B")]
        results.append(
            _timed(
                "interlacing",
                lambda: (
                    interlacing_check(reports[0].ordinates(), reports[1].ordinates()),
                    f"omega={cfg.omega:g}, T={reports[0].T:g}",
                ),
            )
        )
    for rep in reports:
        results.append(_timed(f"zero records {rep.family}", lambda rep=rep: zero_records(rep)))
        results.append(
            _timed(
                f"completeness {rep.family}",
                lambda rep=rep: (
                    verify_completeness(rep),
                    f"{rep.count_scanned} zeros, formula {rep.count_formula:.4f}",
                ),
            )
        )
        rho = rho_omega(rep.omega)

        def telescope(rep=rep, rho=rho):
            res = telescoping_residual(build_samples(rep, rho))
            return res <= 1e-9, f"residual {res:.2e}"

        results.append(_timed(f"telescoping {rep.family}", telescope))

    def euler_vs_dirichlet():
        table = build_lambda_table(10**6, 19)
        worst = 0.0
        for sigma in (1.1, 1.5, 2.0):
            for x in (0.3, 1.0, 3.0):
                e = mtilde_complex(sigma, x, 5, tail_correction=False)
                d = mtilde_dirichlet(sigma, x, table, smooth_bound=5)
                worst = max(worst, abs(e - d))
        return worst <= 1e-8, f"max difference {worst:.2e} (primes <= 5, n <= 1e6)"

    results.append(_timed("Euler product vs Dirichlet series", euler_vs_dirichlet))

    def density():
        table = m_density(1.0)
        norm = table.normalization()
        ripple = float(np.min(table.m_values) / np.max(table.m_values))
        moment = table.second_moment() / (mu_sigma(1.0) / 2.0)
        ok = abs(norm - 1.0) <= 1e-3 and ripple >= -1e-4 and abs(moment - 1.0) <= 0.02
        return ok, f"sigma=1: normalization {norm:.6f}, min/max {ripple:.1e}, 2nd moment / (mu/2) {moment:.5f}"

    results.append(_timed("m-density normalization and moments", density))

    def variance_routes():
        a = rho_omega(1.0)
        b = rho_omega(1.0, method="direct")
        c = mu_sigma(1.5) / (2.0 * math.pi**2)
        worst = max(abs(a / b - 1.0), abs(a / c - 1.0))
        return worst <= 1e-9, f"rho_1 by sieve, direct sum and mu_sigma agree to {worst:.1e}"

    results.append(_timed("variance normalizer routes", variance_routes))
    return results
