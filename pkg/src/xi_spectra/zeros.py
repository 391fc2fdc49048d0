"""Zeros of A_omega and B_omega on the critical line.

The scanner samples the sign of ``a_scaled`` / ``b_scaled`` from
:func:`xi_spectra.kernel.xi_shifted` on a grid whose step is a fixed fraction
of the local mean gap ``2*pi / log(t / 2*pi)``, refines every sign change to a
bracket of width ``abs_tol`` and certifies the result against the zero
counting function.
"""
from __future__ import annotations

import cmath
import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import LoadError, LostBracket, PathSingularity, StepTooCoarse
from .kernel import log_deriv_zeta, xi_shifted, zeta

FAMILIES = ("A", "B")
MAX_SCAN_HEIGHT = 5000.0
DEFAULT_STEP_FACTOR = 0.2
DEFAULT_ABS_TOL = 1e-9
ENDPOINT_ZERO_TOL = 1e-12
ENDPOINT_NUDGE = 1e-10
CACHE_MAGIC = "# xi-spectra zeros v1"


@dataclass(frozen=True)
class ZeroRecord:
    family: str
    omega: float
    index_n: int
    gamma: float
    bracket_lo: float
    bracket_hi: float
    residual: float


@dataclass
class ScanReport:
    omega: float
    family: str
    T: float
    zeros: list[ZeroRecord]
    count_scanned: int
    count_formula: float
    s_omega_at_T: float
    step_factor: float = DEFAULT_STEP_FACTOR
    # zeros above T kept so that the gap after the last zero <= T is known
    beyond: list[ZeroRecord] = field(default_factory=list)

    @property
    def positive_zeros(self) -> list[ZeroRecord]:
        return [z for z in self.zeros if z.index_n >= 1]

    def ordinates(self) -> np.ndarray:
        return np.array([z.gamma for z in self.positive_zeros], dtype=float)

    def ordinates_with_next(self) -> np.ndarray:
        """Ordinates up to T followed by the scanned zeros just above T."""
        return np.array([z.gamma for z in self.positive_zeros + self.beyond], dtype=float)


def _check_family(family: str) -> str:
    family = family.upper()
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    return family


def target_value(omega: float, family: str, t: float) -> float:
    """Scaled A_omega or B_omega at ``1/2 + it``; sign-exact."""
    a, b, _ = xi_shifted(omega, t)
    return a if family == "A" else b


def mean_gap(t: float) -> float:
    return 2.0 * math.pi / math.log(max(t, 10.0) / (2.0 * math.pi))


def scan_grid(t_lo: float, t_hi: float, step_factor: float = DEFAULT_STEP_FACTOR) -> np.ndarray:
    """Sample points from ``t_lo`` to ``t_hi`` with step ``step_factor * mean_gap(|t|)``."""
    pts = [t_lo]
    t = t_lo
    while True:
        t = t + step_factor * mean_gap(abs(t))
        if t >= t_hi:
            break
        pts.append(t)
    pts.append(t_hi)
    return np.array(pts, dtype=float)


def _sample_signs(omega: float, family: str, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = grid.copy()
    vals = np.empty_like(pts)
    for i, t in enumerate(pts):
        v = target_value(omega, family, float(t))
        if abs(v) < ENDPOINT_ZERO_TOL:
            pts[i] = t + ENDPOINT_NUDGE
            v = target_value(omega, family, float(pts[i]))
        vals[i] = v
    return pts, vals


def _window_brackets(args: tuple) -> list[tuple[float, float]]:
    omega, family, grid = args
    pts, vals = _sample_signs(omega, family, grid)
    out = []
    for i in range(len(pts) - 1):
        if vals[i] * vals[i + 1] < 0.0:
            out.append((float(pts[i]), float(pts[i + 1])))
    return out


def _partition(grid: np.ndarray, windows: int) -> list[np.ndarray]:
    windows = max(1, min(windows, len(grid) - 1))
    cuts = np.linspace(0, len(grid) - 1, windows + 1).round().astype(int)
    # consecutive windows share their boundary sample
    return [grid[cuts[k] : cuts[k + 1] + 1] for k in range(windows)]


def scan_zeros(
    omega: float,
    family: str,
    t_lo: float,
    t_hi: float,
    step_factor: float = DEFAULT_STEP_FACTOR,
    windows: int = 1,
    workers: int = 1,
) -> list[tuple[float, float]]:
    """Every grid interval on which the scaled target changes sign.

    The grid is fixed by ``(t_lo, t_hi, step_factor)`` alone, so the result
    does not depend on how it is split into ``windows``.
    """
    family = _check_family(family)
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    if max(abs(t_lo), abs(t_hi)) > MAX_SCAN_HEIGHT:
        raise ValueError(f"scan heights are limited to |t| <= {MAX_SCAN_HEIGHT:g}")
    if not 0.0 < step_factor <= 0.5:
        raise ValueError("step_factor must lie in (0, 0.5]")
    return _brackets(omega, family, t_lo, t_hi, step_factor, windows, workers)


def _brackets(omega, family, t_lo, t_hi, step_factor, windows, workers) -> list[tuple[float, float]]:
    grid = scan_grid(t_lo, t_hi, step_factor)
    jobs = [(omega, family, g) for g in _partition(grid, windows)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_window_brackets, jobs))
    else:
        parts = [_window_brackets(j) for j in jobs]
    merged = sorted({b for part in parts for b in part})
    return merged


def refine_root(
    func: Callable[[float], float], lo: float, hi: float, abs_tol: float = DEFAULT_ABS_TOL
) -> tuple[float, float, float, float]:
    """Shrink a sign-change bracket of ``func`` to width ``<= abs_tol``.

    Returns ``(root, bracket_lo, bracket_hi, |func(root)|)``.  Brent's method
    proposes the root; the bracket is then closed around it with two probes,
    falling back to plain bisection if the probes do not straddle a sign change.
    """
    if abs_tol < 1e-11:
        raise ValueError("abs_tol must be >= 1e-11")
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo, lo - abs_tol / 4, lo + abs_tol / 4, 0.0
    if f_hi == 0.0:
        return hi, hi - abs_tol / 4, hi + abs_tol / 4, 0.0
    if f_lo * f_hi > 0.0:
        raise LostBracket(f"no sign change on [{lo!r}, {hi!r}]")
    root = brentq(func, lo, hi, xtol=abs_tol / 8, rtol=4 * np.finfo(float).eps)
    half = 0.45 * abs_tol
    p_lo, p_hi = max(lo, root - half), min(hi, root + half)
    g_lo, g_hi = func(p_lo), func(p_hi)
    if g_lo * f_lo > 0.0 and g_hi * f_hi > 0.0:
        lo, hi, f_lo = p_lo, p_hi, g_lo
    else:
        while hi - lo > abs_tol:
            mid = 0.5 * (lo + hi)
            f_mid = func(mid)
            if f_mid == 0.0:
                lo, hi = mid - abs_tol / 4, mid + abs_tol / 4
                break
            if f_mid * f_lo > 0.0:
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
    return root, lo, hi, abs(func(root))


def refine_zero(
    omega: float,
    family: str,
    bracket: tuple[float, float],
    abs_tol: float = DEFAULT_ABS_TOL,
    index_n: int = 0,
) -> ZeroRecord:
    family = _check_family(family)
    root, lo, hi, res = refine_root(lambda t: target_value(omega, family, t), bracket[0], bracket[1], abs_tol)
    return ZeroRecord(family, omega, index_n, root, lo, hi, res)


# -- counting function ------------------------------------------------------


def _romberg(func: Callable[[float], float], a: float, b: float, tol: float, max_level: int = 16) -> float:
    h = b - a
    prev_row = [0.5 * h * (func(a) + func(b))]
    n_new = 1
    for level in range(1, max_level + 1):
        h *= 0.5
        mids = a + h * (2 * np.arange(n_new) + 1)
        row = [0.5 * prev_row[0] + h * math.fsum(func(float(x)) for x in mids)]
        for k in range(1, level + 1):
            row.append(row[k - 1] + (row[k - 1] - prev_row[k - 1]) / (4**k - 1))
        if level >= 3 and abs(row[-1] - prev_row[-1]) < tol:
            return row[-1]
        prev_row = row
        n_new *= 2
    return prev_row[-1]


def s_omega(omega: float, t: float, tol: float = 1e-9) -> float:
    """``S_omega(t) = arg zeta(1/2 + omega + it) / pi`` by continuous variation.

    The argument is followed from 2 to 2+it (where Re zeta > 0) and then
    horizontally to 1/2+omega+it by integrating ``Im zeta'/zeta``; the
    integral fixes the branch of the principal argument at the end point.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if abs(t) > MAX_SCAN_HEIGHT:
        raise ValueError(f"|t| must be <= {MAX_SCAN_HEIGHT:g}")
    if t == 0.0:
        return 0.0
    if t < 0.0:
        return -s_omega(omega, -t, tol)
    sigma = 0.5 + omega
    start = cmath.phase(zeta(complex(2.0, t)))
    if sigma == 2.0:
        return start / math.pi

    def d_arg(x: float) -> float:
        z = zeta(complex(x, t))
        if abs(z) < 1e-12:
            raise PathSingularity(f"|zeta| < 1e-12 at {x}+{t}i")
        return log_deriv_zeta(complex(x, t)).imag

    estimate = start + _romberg(d_arg, 2.0, sigma, tol)
    end = cmath.phase(zeta(complex(sigma, t)))
    turns = round((estimate - end) / (2.0 * math.pi))
    exact = end + 2.0 * math.pi * turns
    if abs(exact - estimate) > 0.5:
        raise PathSingularity(f"argument integration unreliable at t={t} (mismatch {exact - estimate:.3g})")
    return exact / math.pi


def smooth_count(T: float) -> float:
    return T / (2.0 * math.pi) * math.log(T / (2.0 * math.pi * math.e))


def count_formula(omega: float, T: float) -> float:
    """``(T/2pi) log(T/2pi e) + S_omega(T) + (7 + 2 omega)/8``, without the O(1/T) term."""
    if T < 2.0:
        raise ValueError("count_formula requires T >= 2")
    return smooth_count(T) + s_omega(omega, T) + (7.0 + 2.0 * omega) / 8.0


def expected_count(family: str, formula_value: float) -> int:
    """Integer zero count implied by the counting formula.

    The formula value is the continuous phase of xi(1/2+omega+iT) divided by
    pi.  Zeros of A sit at half-integer phase multiples, so their count is the
    rounded value; zeros of B sit at integer multiples, and the one at t = 0
    is not counted, so their count is the floor.
    """
    family = _check_family(family)
    if family == "A":
        return math.floor(formula_value + 0.5)
    return math.floor(formula_value)


def phase_residuals(report: ScanReport, stride: int = 1) -> np.ndarray:
    """Counting-formula value at each zero minus its phase position.

    At an A zero the formula equals ``n - 1/2`` and at a B zero ``n``, up to
    O(1/gamma), so the residuals should all be small.  ``stride`` thins the
    zeros (each residual needs one S_omega evaluation).
    """
    offset = 0.5 if report.family == "A" else 0.0
    out = []
    for z in report.positive_zeros[::stride]:
        if z.gamma < 2.0:
            continue
        f = smooth_count(z.gamma) + s_omega(report.omega, z.gamma) + (7.0 + 2.0 * report.omega) / 8.0
        out.append(f - (z.index_n - offset))
    return np.array(out)


def verify_completeness(report: ScanReport, rule: str = "phase") -> bool:
    """Completeness certificate for a scan over (0, T].

    ``rule="phase"`` compares with :func:`expected_count`; ``rule="round"``
    compares with ``round(count_formula)`` for both families.  Either way every
    gap must also stay below five times ``4*pi / log(T / 2*pi)``.
    """
    if rule == "phase":
        target = expected_count(report.family, report.count_formula)
    elif rule == "round":
        target = round(report.count_formula)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    if report.count_scanned != target:
        return False
    g = report.ordinates()
    if len(g) >= 2 and report.T > 2.0 * math.pi:
        cap = 5.0 * 4.0 * math.pi / math.log(report.T / (2.0 * math.pi))
        if np.max(np.diff(g)) >= cap:
            return False
    return True


def scan(
    omega: float,
    family: str,
    T: float,
    step_factor: float = DEFAULT_STEP_FACTOR,
    abs_tol: float = DEFAULT_ABS_TOL,
    beyond: float = 0.0,
    windows: int = 1,
    workers: int = 1,
) -> ScanReport:
    """Scan and refine all zeros with ``0 < t <= T`` (plus ``(T, T+beyond]``)."""
    family = _check_family(family)
    if not 0.0 <= T <= MAX_SCAN_HEIGHT:
        raise ValueError(f"T must lie in [0, {MAX_SCAN_HEIGHT:g}]")
    if not 0.0 < step_factor <= 0.5:
        raise ValueError("step_factor must lie in (0, 0.5]")
    # the look-ahead past T may exceed the scan limit slightly
    t_top = T + min(beyond, 100.0)
    zeros: list[ZeroRecord] = []
    if family == "B":
        zeros.append(ZeroRecord("B", omega, 0, 0.0, -abs_tol / 4, abs_tol / 4, 0.0))
    refined: list[ZeroRecord] = []
    if t_top > 0.0:
        for br in _brackets(omega, family, 0.0, t_top, step_factor, windows, workers):
            refined.append(refine_zero(omega, family, br, abs_tol))
    refined.sort(key=lambda z: z.gamma)
    for i, z in enumerate(refined, start=1):
        z = replace(z, index_n=i)
        refined[i - 1] = z
        if z.gamma <= T:
            zeros.append(z)
    above = [z for z in refined if z.gamma > T]
    n_pos = sum(1 for z in zeros if z.index_n >= 1)
    if T >= 2.0:
        s_T = s_omega(omega, T)
        formula = smooth_count(T) + s_T + (7.0 + 2.0 * omega) / 8.0
    else:
        s_T = s_omega(omega, T) if T > 0 else 0.0
        formula = 0.0
    return ScanReport(omega, family, T, zeros, n_pos, formula, s_T, step_factor, above)


def scan_certified(
    omega: float,
    family: str,
    T: float,
    step_factor: float = DEFAULT_STEP_FACTOR,
    retries: int = 1,
    **kwargs,
) -> ScanReport:
    """:func:`scan`, rescanning with half the step when the certificate fails."""
    for attempt in range(retries + 1):
        report = scan(omega, family, T, step_factor, **kwargs)
        if T < 2.0 or verify_completeness(report):
            return report
        step_factor *= 0.5
    raise StepTooCoarse(
        f"omega={omega} family={family} T={T}: {report.count_scanned} zeros found, "
        f"formula {report.count_formula:.4f}"
    )


def interlacing_check(zeros_a: Sequence[float], zeros_b: Sequence[float]) -> bool:
    """True iff ``0 < a_1 < b_1 < a_2 < b_2 < ...`` over the common range."""
    a = sorted(float(x) for x in zeros_a if x > 0.0)
    b = sorted(float(x) for x in zeros_b if x > 0.0)
    if not a or not b:
        return len(a) <= 1 and not b
    limit = min(a[-1], b[-1])
    seq = sorted([(x, "A") for x in a if x <= limit] + [(x, "B") for x in b if x <= limit])
    if seq[0][1] != "A":
        return False
    return all(f0 != f1 and x0 < x1 for (x0, f0), (x1, f1) in zip(seq, seq[1:]))


def error_envelope(omega: float, t: float, rh_mode: bool = True) -> tuple[float, float]:
    """``(E1, E2)`` diagnostic scales for the gap regularity of the zeros.

    E1 is 1 for omega > 1/2, log t / log log t for omega = 1/2 (log log t
    with ``rh_mode``), and (log t)^(1 - 2 omega) for omega < 1/2 under
    ``rh_mode``.  ``E2 = E1 / log t``.
    """
    # log log t must be positive
    if t <= math.e:
        raise ValueError("error_envelope requires t > e")
    lt = math.log(t)
    if omega > 0.5:
        e1 = 1.0
    elif omega == 0.5:
        e1 = math.log(lt) if rh_mode else lt / math.log(lt)
    else:
        if not rh_mode:
            raise ValueError("no unconditional envelope is available for omega < 1/2")
        e1 = lt ** (1.0 - 2.0 * omega)
    return e1, e1 / lt


# -- zero cache -------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def write_cache(report: ScanReport, path: str | Path, extra: dict | None = None) -> None:
    """Write ``report`` as the zero-cache CSV; ``extra`` items join the header line."""
    path = Path(path)
    tail = "".join(f", {k}={v}" for k, v in (extra or {}).items())
    lines = [
        f"{CACHE_MAGIC}, family={report.family}, omega={_fmt(report.omega)}, "
        f"T={_fmt(report.T)}, step_factor={_fmt(report.step_factor)}{tail}",
        "index,gamma,bracket_lo,bracket_hi,residual",
    ]
    for z in report.zeros + report.beyond:
        lines.append(
            ",".join([str(z.index_n), _fmt(z.gamma), _fmt(z.bracket_lo), _fmt(z.bracket_hi), _fmt(z.residual)])
        )
    path.write_text("\n".join(lines) + "\n")


def read_cache(path: str | Path) -> ScanReport:
    """Rebuild a :class:`ScanReport` from a cache file without rescanning.

    ``count_formula`` is recomputed (it only needs S_omega at T).
    """
    path = Path(path)
    try:
        text = path.read_text().splitlines()
        header = text[0]
        if not header.startswith(CACHE_MAGIC):
            raise LoadError(f"{path}: not a zero cache")
        meta = dict(part.strip().split("=", 1) for part in header[len(CACHE_MAGIC) :].split(",") if "=" in part)
        family = _check_family(meta["family"])
        omega, T, step = float(meta["omega"]), float(meta["T"]), float(meta["step_factor"])
        rows = list(csv.DictReader(text[1:]))
        records = [
            ZeroRecord(
                family,
                omega,
                int(r["index"]),
                float(r["gamma"]),
                float(r["bracket_lo"]),
                float(r["bracket_hi"]),
                float(r["residual"]),
            )
            for r in rows
        ]
    except LoadError:
        raise
    except (OSError, IndexError, KeyError, ValueError, TypeError) as exc:
        raise LoadError(f"{path}: {exc}") from exc
    zeros = [z for z in records if z.gamma <= T]
    beyond = [z for z in records if z.gamma > T]
    n_pos = sum(1 for z in zeros if z.index_n >= 1)
    s_T = s_omega(omega, T) if T > 0 else 0.0
    formula = smooth_count(T) + s_T + (7.0 + 2.0 * omega) / 8.0 if T >= 2.0 else 0.0
    return ScanReport(omega, family, T, zeros, n_pos, formula, s_T, step, beyond)


def concat_ordinates(records: Iterable[ZeroRecord]) -> np.ndarray:
    return np.array([z.gamma for z in records], dtype=float)
