"""Acceptance suite: one PASS/FAIL line per criterion, at the contract tolerances.

Criteria that are red at desk scale stay red: their aggregate test is a strict
xfail carrying the measured numbers, and the parts that do hold are asserted
separately.
"""
import math
import time

import numpy as np
import pytest
from conftest import get_gap_table, get_scan, get_table, record

from xi_spectra import phi as phi_mod
from xi_spectra.arithmetic import build_lambda_table
from xi_spectra.cli import _build_table, compare_payload
from xi_spectra.config import ExperimentConfig
from xi_spectra.kernel import xi, zeta
from xi_spectra.mfunction import (
    gap_density,
    gap_density_support,
    gaussian_limit_error,
    mtilde_complex,
    mtilde_dirichlet,
    mu_sigma,
    tail_variance,
)
from xi_spectra.spacing import (
    build_samples,
    empirical_gap_functional,
    line_average_functional,
    logderiv_gap_statistic,
    mean_first_gap,
    rho_omega,
)
from xi_spectra.zeros import expected_count, interlacing_check, scan, verify_completeness


def verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


@pytest.fixture(scope="module")
def lambda_table():
    return build_lambda_table(10**6, 19)


@pytest.fixture(scope="module")
def desk_scan():
    return get_scan(1.0, "A", 2000.0)


@pytest.fixture(scope="module")
def compare_doc(desk_scan):
    cfg = ExperimentConfig(omega=1.0, T=2000.0, family="A")
    t0 = time.perf_counter()
    table = _build_table(cfg)
    doc, _ = compare_payload(cfg, desk_scan, table)
    return doc, time.perf_counter() - t0


# -- 1 ----------------------------------------------------------------------------


def test_criterion_1_kernel():
    t0 = time.perf_counter()
    fe = 0.0
    for sigma in np.linspace(-2.0, 3.0, 10):
        for t in np.linspace(0.5, 100.0, 20):
            s = complex(sigma, t)
            fe = max(fe, abs(xi(s).ratio(xi(1.0 - s)) - 1.0))
    rng = np.random.default_rng(1)
    n = np.arange(1, 200_001, dtype=float)
    series_err = 0.0
    for _ in range(50):
        s = complex(rng.uniform(1.1, 3.0), rng.uniform(-30.0, 30.0))
        series = np.sum(n ** (-s)) + n[-1] ** (1 - s) / (s - 1) - 0.5 * n[-1] ** (-s)
        series_err = max(series_err, abs(series / zeta(s) - 1.0))
    elapsed = time.perf_counter() - t0
    ok = fe <= 1e-10 and series_err <= 1e-10 and elapsed < 10.0
    record(
        f"{verdict(ok)} criterion 1: xi functional equation residual {fe:.2e} (200 points), "
        f"zeta vs series {series_err:.2e} (50 points), {elapsed:.1f} s"
    )
    assert ok


# -- 2 ----------------------------------------------------------------------------

CASES_2 = [(0.5, "A"), (0.5, "B"), (1.0, "A"), (1.0, "B")]


def _completeness_rows():
    rows = []
    for omega, fam in CASES_2:
        t0 = time.perf_counter()
        rep = scan(omega, fam, 500.0)
        rows.append((omega, fam, rep, time.perf_counter() - t0))
    return rows


@pytest.fixture(scope="module")
def completeness_rows():
    return _completeness_rows()


@pytest.mark.xfail(
    strict=True,
    reason="omega=1 family B: 269 zeros against round(269.6952) = 270; the B count is the floor of the phase",
)
def test_criterion_2_completeness(completeness_rows):
    parts, ok = [], True
    for omega, fam, rep, dt in completeness_rows:
        good = rep.count_scanned == round(rep.count_formula) and dt < 300.0
        ok &= good
        parts.append(f"w={omega:g} {fam}: {rep.count_scanned} vs round({rep.count_formula:.4f})" + ("" if good else " MISMATCH"))
    record(f"{verdict(ok)} criterion 2: " + "; ".join(parts))
    assert ok


@pytest.mark.parametrize("omega,family", CASES_2)
def test_criterion_2_phase_rule(completeness_rows, omega, family):
    rep = next(r for w, f, r, _ in completeness_rows if (w, f) == (omega, family))
    assert rep.count_scanned == expected_count(family, rep.count_formula)
    assert verify_completeness(rep)


# -- 3 ----------------------------------------------------------------------------


def test_criterion_3_interlacing():
    a = get_scan(1.0, "A", 300.0).ordinates()
    b = get_scan(1.0, "B", 300.0).ordinates()
    ok = interlacing_check(a, b)
    record(f"{verdict(ok)} criterion 3: {len(a)} A and {len(b)} B zeros up to T=300 interlace strictly")
    assert ok


# -- 4 ----------------------------------------------------------------------------


def test_criterion_4_equal_spacing(desk_scan):
    samples = build_samples(desk_scan, rho_omega(1.0))
    m = mean_first_gap(samples, 1000.0, 2000.0)
    ok = abs(m - 1.0) <= 0.05
    record(f"{verdict(ok)} criterion 4: mean first-normalized gap over (1000, 2000] = {m:.5f}")
    assert ok


# -- 5 ----------------------------------------------------------------------------

GRID_5 = [(s, x) for s in (1.1, 1.5, 2.0) for x in (0.3, 1.0, 3.0)]


@pytest.fixture(scope="module")
def euler_dirichlet(lambda_table):
    t0 = time.perf_counter()
    matched, full = {}, {}
    for sigma, x in GRID_5:
        e5 = mtilde_complex(sigma, x, 5, tail_correction=False)
        matched[(sigma, x)] = abs(e5 - mtilde_dirichlet(sigma, x, lambda_table, smooth_bound=5))
        e_all = mtilde_complex(sigma, x, 10**6)
        full[(sigma, x)] = abs(e_all - mtilde_dirichlet(sigma, x, lambda_table))
    return matched, full, time.perf_counter() - t0


@pytest.mark.xfail(strict=True, reason="full product vs the n <= 1e6 series misses up to 1.4e-5 at sigma = 1.1")
def test_criterion_5_euler_vs_dirichlet(euler_dirichlet):
    matched, full, dt = euler_dirichlet
    m_worst, f_worst = max(matched.values()), max(full.values())
    bad = sorted({s for (s, x), v in full.items() if v > 1e-8})
    ok = m_worst <= 1e-8 and f_worst <= 1e-8 and dt < 60.0
    record(
        f"{verdict(ok)} criterion 5: primes <= 5 vs 5-smooth n <= 1e6 max {m_worst:.1e}; "
        f"primes <= 1e6 vs all n <= 1e6 max {f_worst:.1e} (over 1e-8 at sigma {bad}); {dt:.1f} s"
    )
    assert ok


def test_criterion_5_matched_truncation(euler_dirichlet):
    matched, full, dt = euler_dirichlet
    assert max(matched.values()) <= 1e-8 and dt < 60.0
    for sigma in (1.5, 2.0):
        assert max(v for (s, _), v in full.items() if s == sigma) <= 1e-8


# -- 6 ----------------------------------------------------------------------------


def test_criterion_6_m_density():
    parts, ok = [], True
    for sigma in (0.8, 1.0, 1.5):
        t = get_table(sigma)
        norm = t.normalization()
        even = np.array_equal(t.m_values, t.m_values[::-1])
        ripple = float(np.min(t.m_values) / np.max(t.m_values))
        good = abs(norm - 1.0) <= 1e-3 and even and ripple >= -1e-4
        ok &= good
        parts.append(f"sigma={sigma:g}: norm-1 {norm - 1:.1e}, even {even}, min/max {ripple:.1e}")
    record(f"{verdict(ok)} criterion 6: " + "; ".join(parts))
    assert ok


# -- 7 ----------------------------------------------------------------------------


def test_criterion_7_unit_variance():
    parts, ok = [], True
    for omega in (0.3, 0.5, 1.0):
        table = get_gap_table(omega)
        u = np.linspace(*gap_density_support(omega, table), 4001)
        var = float(np.trapezoid(u * u * gap_density(omega, u, table), u))
        ok &= abs(var - 1.0) <= 0.02
        parts.append(f"w={omega:g}: {var:.5f}")
    record(f"{verdict(ok)} criterion 7: int u^2 g du " + ", ".join(parts))
    assert ok


# -- 8 ----------------------------------------------------------------------------


@pytest.mark.xfail(
    strict=True,
    reason="asymptotic regime not reached: gap2 spread is 0.51 of the limit at T = 2000 (see band trend)",
)
def test_criterion_8_theorem_at_desk_scale(compare_doc):
    doc, dt = compare_doc
    worst = max(doc["functionals"], key=lambda r: r["abs_diff"])
    breaches = [r["phi"] for r in doc["functionals"] if not r["pass"]]
    ok = not breaches and doc["histogram_l1"] <= 0.2 and dt < 1800
    record(
        f"{verdict(ok)} criterion 8: {doc['verdict']}; worst phi {worst['phi']} "
        f"|lhs-rhs| = {worst['abs_diff']:.3f}; breaches {breaches}; histogram L1 {doc['histogram_l1']:.3f}"
    )
    assert ok


@pytest.mark.parametrize("name", sorted(phi_mod.WHITELIST))
def test_criterion_8_per_phi(compare_doc, name):
    doc, _ = compare_doc
    row = next(r for r in doc["functionals"] if r["phi"] == name)
    record(f"  criterion 8 detail {name}: lhs {row['lhs']:.4f} rhs {row['rhs']:.4f} diff {row['abs_diff']:.4f}")
    if row["abs_diff"] > 0.1:
        pytest.xfail(f"{name}: |lhs - rhs| = {row['abs_diff']:.3f} > 0.1")
    assert row["abs_diff"] <= 0.1


def test_criterion_8_breach_is_reported(compare_doc):
    doc, _ = compare_doc
    breached = any(not r["pass"] for r in doc["functionals"]) or doc["histogram_l1"] > 0.2
    assert doc["verdict"] == ("asymptotic regime not reached" if breached else "pass")


def test_criterion_8_trend_toward_limit(desk_scan):
    samples = build_samples(desk_scan, rho_omega(1.0))
    bands = [(100, 500), (500, 1000), (1000, 2000)]
    vals = [empirical_gap_functional([s for s in samples if lo < s.gamma <= hi], lambda u: u * u) for lo, hi in bands]
    record("  criterion 8 trend: u^2 functional by band " + ", ".join(f"({lo},{hi}] {v:.3f}" for (lo, hi), v in zip(bands, vals)))
    assert vals[0] < vals[1] < vals[2] < 1.0


# -- 9 ----------------------------------------------------------------------------


def test_criterion_9_gaussian_limit():
    t0 = time.perf_counter()
    errs, shares = [], []
    for omega in (0.2, 0.1, 0.05):
        table = get_gap_table(omega, prime_cutoff=10**6)
        errs.append(gaussian_limit_error(omega, table))
        shares.append(tail_variance(0.5 + omega, 10**6) / mu_sigma(0.5 + omega))
    dt = time.perf_counter() - t0
    ok = errs[0] > errs[1] > errs[2] and errs[2] <= 0.05 and dt < 1200
    record(
        f"{verdict(ok)} criterion 9: sup error "
        + ", ".join(f"w={w:g} {e:.2e}" for w, e in zip((0.2, 0.1, 0.05), errs))
        + "; variance share beyond 1e6 primes "
        + ", ".join(f"{s:.2f}" for s in shares)
        + f"; {dt:.1f} s"
    )
    assert ok


# -- 10 ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def bridge(desk_scan):
    clipped = phi_mod.get("clipped_square")
    rho = rho_omega(1.0)
    samples = build_samples(desk_scan, rho)
    emp = empirical_gap_functional(samples, clipped)
    at_zeros = logderiv_gap_statistic(1.0, [s.gamma for s in samples], clipped, rho=rho)
    line = line_average_functional(1.0, 2000.0, clipped, rho=rho)
    return {"empirical": emp, "logderiv": at_zeros, "line": line}


@pytest.mark.xfail(strict=True, reason="asymptotic regime not reached: the empirical side is 0.51, the other two near 1")
def test_criterion_10_bridge(bridge):
    pairs = [("empirical", "logderiv"), ("empirical", "line"), ("logderiv", "line")]
    diffs = {p: abs(bridge[p[0]] - bridge[p[1]]) for p in pairs}
    ok = all(d <= 0.15 for d in diffs.values())
    record(
        f"{verdict(ok)} criterion 10: empirical {bridge['empirical']:.4f}, logderiv {bridge['logderiv']:.4f}, "
        f"line {bridge['line']:.4f}; pair diffs "
        + ", ".join(f"{a}-{b} {d:.3f}" for (a, b), d in diffs.items())
    )
    assert ok


def test_criterion_10_logderiv_and_line_average_agree(bridge):
    assert abs(bridge["logderiv"] - bridge["line"]) <= 0.15


def test_criterion_10_empirical_gap_vs_logderiv_pairing(desk_scan):
    # the empirical gap is close to -S' L/(L' + S') times the mean spacing, so it
    # correlates with the log-derivative statistic at the zero even at desk scale
    rho = rho_omega(1.0)
    samples = [s for s in build_samples(desk_scan, rho) if s.gap2 is not None and s.gamma > 500]
    gaps = np.array([s.gap2 for s in samples])
    y = np.array([logderiv_gap_statistic(1.0, [s.gamma], lambda u: u, rho=rho) for s in samples])
    corr = float(np.corrcoef(gaps, y)[0, 1])
    record(f"  criterion 10 diagnostic: corr(gap2, -Re zeta'/zeta / (pi sqrt rho)) above t=500 is {corr:.3f}")
    assert corr > 0.3
