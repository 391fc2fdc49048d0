import math
from dataclasses import replace

import numpy as np
import pytest
from conftest import get_scan

from xi_spectra.arithmetic import mangoldt_array
from xi_spectra.errors import LoadError, LostBracket
from xi_spectra.kernel import xi_shifted
from xi_spectra.zeros import (
    count_formula,
    error_envelope,
    expected_count,
    interlacing_check,
    phase_residuals,
    read_cache,
    refine_root,
    refine_zero,
    s_omega,
    scan,
    scan_grid,
    scan_zeros,
    smooth_count,
    verify_completeness,
    write_cache,
)


def test_refine_linear_stub():
    root, lo, hi, res = refine_root(lambda t: t - 3.0, 2.0, 4.0, 1e-9)
    assert abs(root - 3.0) <= 1e-9
    assert lo < 3.0 < hi and hi - lo <= 1e-9
    assert res <= 1e-9


def test_refine_rejects_same_signs_and_tiny_tol():
    with pytest.raises(LostBracket):
        refine_root(lambda t: t * t + 1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        refine_root(lambda t: t, -1.0, 1.0, abs_tol=1e-12)


def test_b_family_zero_at_origin():
    brackets = scan_zeros(0.5, "B", -0.1, 0.1)
    assert len(brackets) == 1
    lo, hi = brackets[0]
    assert lo < 0.0 < hi
    rec = refine_zero(0.5, "B", brackets[0], abs_tol=1e-9)
    assert abs(rec.gamma) <= 1e-9


def test_empty_window():
    g = get_scan(0.5, "A", 100.0).ordinates()
    # a window of width 1e-6 centred halfway between two zeros
    mid = 0.5 * (g[10] + g[11])
    assert scan_zeros(0.5, "A", mid - 1e-6, mid) == []


def test_scan_argument_checks():
    with pytest.raises(ValueError):
        scan_zeros(0.5, "A", 10.0, 5001.0)
    with pytest.raises(ValueError):
        scan_zeros(0.5, "A", 10.0, 20.0, step_factor=0.6)
    with pytest.raises(ValueError):
        scan_zeros(0.5, "C", 10.0, 20.0)


def test_grid_step_follows_mean_gap():
    grid = scan_grid(100.0, 200.0, 0.2)
    steps = np.diff(grid[:-1])
    expected = 0.2 * 2 * math.pi / np.log(grid[:-2] / (2 * math.pi))
    assert np.allclose(steps, expected, rtol=1e-12)


def _fine_sign_changes(omega, family, t_hi, step):
    ts = np.arange(step, t_hi + step / 2, step)
    vals = np.array([xi_shifted(omega, float(t))[0 if family == "A" else 1] for t in ts])
    return int(np.count_nonzero(vals[:-1] * vals[1:] < 0))


def test_bracket_count_against_fine_scan():
    coarse = len(scan_zeros(0.5, "A", 1e-3, 100.0))
    fine = _fine_sign_changes(0.5, "A", 100.0, 1e-3)
    assert coarse == fine
    assert coarse == round(count_formula(0.5, 100.0))


def test_first_zero_stable_across_step_factors():
    firsts = []
    for sf in (0.2, 0.1, 0.05):
        br = scan_zeros(1.0, "A", 1e-3, 20.0, step_factor=sf)[0]
        firsts.append(refine_zero(1.0, "A", br).gamma)
    assert max(firsts) - min(firsts) <= 1e-9


def test_zero_record_invariants():
    rep = get_scan(1.0, "A", 500.0)
    g = rep.ordinates()
    assert np.all(np.diff(g) > 0)
    assert [z.index_n for z in rep.positive_zeros] == list(range(1, len(g) + 1))
    for z in rep.positive_zeros:
        assert z.bracket_lo < z.gamma < z.bracket_hi
        assert z.bracket_hi - z.bracket_lo <= 1e-9
        assert z.residual <= 1e-6
        a = xi_shifted(1.0, z.bracket_lo)[0]
        b = xi_shifted(1.0, z.bracket_hi)[0]
        assert a * b < 0


def test_b_scan_stores_origin_with_index_zero():
    rep = get_scan(1.0, "B", 500.0)
    assert rep.zeros[0].index_n == 0 and rep.zeros[0].gamma == 0.0
    assert all(z.gamma > 0 for z in rep.positive_zeros)


def test_s_omega_trivial_and_odd():
    assert s_omega(0.7, 0.0) == 0.0
    assert s_omega(0.7, -41.3) == pytest.approx(-s_omega(0.7, 41.3), abs=1e-15)


def test_s_omega_dirichlet_bound():
    lam = mangoldt_array(10**6)
    n = np.nonzero(lam)[0]
    bound = np.sum(lam[n] / (n**1.1 * np.log(n))) / math.pi
    # the log zeta series converges absolutely at sigma = 1.1; add the tail bound
    bound += 1.1 * 10 / (1e6**0.1 * math.log(1e6)) / math.pi
    for t in np.linspace(1.0, 2000.0, 60):
        assert abs(s_omega(0.6, float(t))) <= bound


def test_count_formula_identities():
    assert smooth_count(2 * math.pi * math.e) == pytest.approx(0.0, abs=1e-14)
    for omega, T in ((0.5, 100.0), (1.0, 321.7)):
        f = count_formula(omega, T)
        assert f - smooth_count(T) - (7 + 2 * omega) / 8 == pytest.approx(s_omega(omega, T), abs=1e-12)


def test_count_formula_domain():
    with pytest.raises(ValueError):
        count_formula(0.5, 1.0)


def test_count_at_100_matches_scan():
    for fam in ("A", "B"):
        rep = get_scan(0.5, fam, 100.0)
        assert rep.count_scanned == round(rep.count_formula)


@pytest.mark.parametrize("family", ["A", "B"])
def test_completeness_omega_one_t500(family):
    assert verify_completeness(get_scan(1.0, family, 500.0))


def test_completeness_detects_deleted_zero():
    rep = get_scan(1.0, "A", 500.0)
    zs = [z for z in rep.zeros if z.index_n != 100]
    broken = replace(rep, zeros=zs, count_scanned=rep.count_scanned - 1)
    assert not verify_completeness(broken)
    assert not verify_completeness(broken, rule="round")


def test_expected_count_rules():
    assert expected_count("A", 269.6952) == 270
    assert expected_count("B", 269.6952) == 269
    assert expected_count("A", 269.4686) == 269
    assert expected_count("B", 269.4686) == 269


@pytest.mark.parametrize("family", ["A", "B"])
def test_phase_residuals_are_small(family):
    res = phase_residuals(get_scan(1.0, family, 500.0), stride=5)
    assert np.max(np.abs(res)) < 0.1


@pytest.mark.parametrize("omega", [1.0, 0.5])
def test_interlacing_t300(omega):
    a = get_scan(omega, "A", 300.0).ordinates()
    b = get_scan(omega, "B", 300.0).ordinates()
    assert interlacing_check(a, b)


def test_interlacing_swap_detected():
    a = list(get_scan(1.0, "A", 300.0).ordinates())
    b = list(get_scan(1.0, "B", 300.0).ordinates())
    a[5], b[5] = b[5], a[5]
    assert not interlacing_check(a, b)


def test_interlacing_small_cases():
    assert interlacing_check([1.0, 3.0], [2.0, 4.0])
    assert not interlacing_check([2.0], [1.0])
    assert not interlacing_check([1.0, 2.0], [3.0])


def test_error_envelope_branches():
    assert error_envelope(0.75, 100.0)[0] == 1.0
    e1, e2 = error_envelope(0.5, math.exp(math.e), rh_mode=False)
    assert e1 == pytest.approx(math.e) and e2 == pytest.approx(1.0)
    assert error_envelope(0.25, math.exp(4.0))[0] == pytest.approx(2.0)
    assert error_envelope(0.5, math.exp(math.e), rh_mode=True)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        error_envelope(1.0, 2.0)


def test_cache_round_trip(tmp_path):
    rep = get_scan(0.5, "B", 100.0)
    path = tmp_path / "z.csv"
    write_cache(rep, path)
    back = read_cache(path)
    assert back.family == "B" and back.T == 100.0 and back.count_scanned == rep.count_scanned
    assert back.count_formula == pytest.approx(rep.count_formula, abs=1e-12)
    for z0, z1 in zip(rep.zeros + rep.beyond, back.zeros + back.beyond):
        assert z0.index_n == z1.index_n
        assert abs(z0.gamma - z1.gamma) <= 1e-14 * max(1.0, z0.gamma)
    assert verify_completeness(back)
    header = path.read_text().splitlines()[0]
    assert header == "# xi-spectra zeros v1, family=B, omega=0.5, T=100, step_factor=0.2"


def test_cache_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("hello\n")
    with pytest.raises(LoadError):
        read_cache(path)
    with pytest.raises(LoadError):
        read_cache(tmp_path / "missing.csv")


def test_window_partition_is_bit_identical():
    one = scan(1.0, "A", 400.0, windows=1)
    many = scan(1.0, "A", 400.0, windows=7)
    assert one.zeros == many.zeros


def test_scan_is_deterministic():
    a = scan(0.5, "B", 150.0)
    b = scan(0.5, "B", 150.0)
    assert a.zeros == b.zeros


def test_gap_shrinkage_as_t_doubles():
    tops = (250.0, 500.0, 1000.0, 2000.0)
    maxima = []
    for T in tops:
        g = get_scan(1.0, "A", T).ordinates()
        maxima.append(np.max(np.diff(g[g > T / 2])))
    assert all(b <= a for a, b in zip(maxima, maxima[1:]))
