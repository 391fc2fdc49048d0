"""Normalized zero ordinates and the gap statistics built from them.

Three statistics are compared for a test function ``phi``:

* the empirical gap functional over second-normalized gaps,
* ``phi(-Re zeta'/zeta(sigma + i gamma_n) / pi)`` averaged over the zeros,
* the same quantity averaged over ``t`` in ``[0, T]``.

The last two are taken in the same units as the first (``scale="second"``,
dividing by ``sqrt(rho_omega)``) unless ``scale="raw"`` is requested, in
which case the first uses the unscaled ``gamma_ddot`` gaps.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainTooLow, EmptySample, UnsortedEdges
from .kernel import log_deriv_zeta
from .arithmetic import primes_up_to
from .mfunction import _direct_square_sum, prime_log_square_sum, prime_zeta_log_square
from .zeros import ScanReport, ZeroRecord

TWO_PI_E = 2.0 * math.pi * math.e
SCALES = ("second", "raw")


def rho_omega(omega: float, rel_tol: float = 1e-10, method: str = "sieve", prime_cutoff: int = 10**6) -> float:
    """``rho_omega = (1/2 pi^2) sum Lambda(n)^2 / n^{1 + 2 omega}``.

    ``method="sieve"`` adds ``(log p)^2 / (p^s - 1)`` over primes up to
    ``prime_cutoff`` and the remaining primes through the prime-zeta
    identity ``sum_p (log p)^2 p^-s = sum_k mu(k) k (zeta'/zeta)'(k s)``.
    ``method="direct"`` sums the Dirichlet series with an integral tail bound
    and raises SlowConvergence when that needs more than 1e8 terms.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if rel_tol < 1e-12:
        raise ValueError("rel_tol must be >= 1e-12")
    s = 1.0 + 2.0 * omega
    if method == "direct":
        total = _direct_square_sum(s, rel_tol)
    elif method == "sieve":
        head = prime_log_square_sum(s, prime_cutoff)
        p_all = prime_zeta_log_square(s)
        p = primes_up_to(prime_cutoff).astype(float)
        lp = np.log(p)
        first_power = math.fsum(lp * lp * p ** (-s))
        # primes above the cutoff, first powers only; higher powers are below
        # sum_{n > P} (log n)^2 n^{-2s}, far under rel_tol at any supported omega
        total = head + (p_all - first_power)
    else:
        raise ValueError(f"unknown method {method!r}")
    return total / (2.0 * math.pi**2)


def first_normalization(gamma: float) -> float:
    if gamma <= TWO_PI_E:
        raise DomainTooLow(f"gamma = {gamma} is not above 2 pi e")
    return gamma / (2.0 * math.pi) * math.log(gamma / TWO_PI_E)


def _log_factor(gamma: float) -> float:
    return math.log(gamma / TWO_PI_E) / (2.0 * math.pi)


def gamma_ddot(gamma: float, n: int) -> float:
    """``(gamma^(1) - n) * (1/2pi) log(gamma / 2 pi e)``."""
    return (first_normalization(gamma) - n) * _log_factor(gamma)


def second_normalization(gamma: float, n: int, rho: float) -> float:
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    return gamma_ddot(gamma, n) / math.sqrt(rho)


@dataclass(frozen=True)
class SpacingSample:
    index_n: int
    gamma: float
    gamma1: float
    gamma2: float
    gap1: float | None
    gap2: float | None
    gap_ddot: float | None = None


def build_samples(zeros: Sequence[ZeroRecord] | ScanReport, rho: float, T: float | None = None) -> list[SpacingSample]:
    """Samples for every zero with ``2 pi e < gamma <= T``.

    Gaps look one zero ahead, so the last sample at or below T gets a gap
    whenever the next zero is present in ``zeros``; samples without a
    successor have ``None`` gaps.
    """
    if isinstance(zeros, ScanReport):
        T = zeros.T if T is None else T
        recs = zeros.positive_zeros + zeros.beyond
    else:
        recs = [z for z in zeros if z.index_n >= 1]
    recs = sorted(recs, key=lambda z: z.gamma)
    if T is None:
        T = recs[-1].gamma if recs else 0.0
    usable = [z for z in recs if z.gamma > TWO_PI_E]
    g1 = [first_normalization(z.gamma) for z in usable]
    dd = [(g1[i] - z.index_n) * _log_factor(z.gamma) for i, z in enumerate(usable)]
    g2 = [d / math.sqrt(rho) for d in dd]
    out = []
    for i, z in enumerate(usable):
        if z.gamma > T:
            break
        has_next = i + 1 < len(usable) and usable[i + 1].index_n == z.index_n + 1
        out.append(
            SpacingSample(
                z.index_n,
                z.gamma,
                g1[i],
                g2[i],
                g1[i + 1] - g1[i] if has_next else None,
                g2[i + 1] - g2[i] if has_next else None,
                dd[i + 1] - dd[i] if has_next else None,
            )
        )
    return out


def _mean(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        raise EmptySample("no values to average")
    return math.fsum(vals) / len(vals)


def empirical_gap_functional(samples: Sequence[SpacingSample], phi: Callable, scale: str = "second") -> float:
    """Average of ``phi(gap)`` over the samples that have a successor."""
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    gaps = [s.gap2 if scale == "second" else s.gap_ddot for s in samples if s.gap2 is not None]
    if not gaps:
        raise EmptySample("no gaps in sample")
    return _mean(float(phi(g)) for g in gaps)


def gap_values(samples: Sequence[SpacingSample], scale: str = "second") -> np.ndarray:
    return np.array([s.gap2 if scale == "second" else s.gap_ddot for s in samples if s.gap2 is not None])


def _logderiv_values(omega: float, ts: np.ndarray, scale: str, rho: float | None) -> np.ndarray:
    sigma = 0.5 + omega
    vals = np.array([-log_deriv_zeta(complex(sigma, float(t))).real / math.pi for t in ts])
    if scale == "second":
        if rho is None:
            rho = rho_omega(omega)
        vals = vals / math.sqrt(rho)
    elif scale != "raw":
        raise ValueError(f"scale must be one of {SCALES}")
    return vals


def logderiv_gap_statistic(
    omega: float,
    zeros: Sequence[ZeroRecord] | Sequence[float],
    phi: Callable,
    scale: str = "second",
    rho: float | None = None,
) -> float:
    """Average of ``phi(-Re zeta'/zeta(1/2 + omega + i gamma) / pi)`` over the zeros."""
    ts = np.array([z.gamma if isinstance(z, ZeroRecord) else float(z) for z in zeros], dtype=float)
    if ts.size == 0:
        raise EmptySample("no zeros")
    vals = _logderiv_values(omega, ts, scale, rho)
    return _mean(float(phi(v)) for v in vals)


def line_average_functional(
    omega: float,
    T: float,
    phi: Callable,
    scale: str = "second",
    rho: float | None = None,
    abs_tol: float = 1e-4,
    t_lo: float = 0.0,
) -> float:
    """``(1/T) int_0^T phi(-Re zeta'/zeta(1/2 + omega + it) / pi) dt``.

    Composite 8-point Gauss--Legendre with about two panels per unit of t;
    the panel count doubles until successive values agree within ``abs_tol``.
    """
    if omega <= 0.0 or T < 10.0:
        raise ValueError("need omega > 0 and T >= 10")
    if scale == "second" and rho is None:
        rho = rho_omega(omega)
    nodes, weights = leggauss(8)
    panels = max(16, int(2 * (T - t_lo)))
    prev = None
    cache: dict[float, float] = {}
    while True:
        edges = np.linspace(t_lo, T, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        ts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        new = [t for t in ts if t not in cache]
        if new:
            for t, v in zip(new, _logderiv_values(omega, np.array(new), scale, rho)):
                cache[t] = float(phi(v))
        vals = np.array([cache[t] for t in ts]).reshape(panels, len(nodes))
        total = math.fsum((vals @ weights) * half) / (T - t_lo)
        if prev is not None and abs(total - prev) <= abs_tol:
            return total
        if panels > 1 << 20:
            return total
        prev = total
        panels *= 2


@dataclass(frozen=True)
class GapHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    def density(self) -> np.ndarray:
        widths = np.diff(self.bin_edges)
        if self.total == 0:
            return np.zeros_like(widths)
        return self.counts / (self.total * widths)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "density"])
        for lo, hi, c, d in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts, self.density()):
            w.writerow([f"{lo:.15g}", f"{hi:.15g}", int(c), f"{d:.15g}"])
        return buf.getvalue()


def histogram(values: Sequence[float], edges: Sequence[float], overflow: bool = False) -> GapHistogram:
    """Counts per half-open bin ``[e_i, e_{i+1})``, the last bin closed.

    Values outside the edges are dropped unless ``overflow`` folds them into
    the end bins.  ``total`` is the number of values counted.
    """
    e = np.asarray(edges, dtype=float)
    if e.ndim != 1 or len(e) < 2 or np.any(np.diff(e) <= 0):
        raise UnsortedEdges("edges must be strictly increasing with at least two entries")
    v = np.asarray(values, dtype=float)
    if overflow:
        v = np.clip(v, e[0], e[-1])
    counts, _ = np.histogram(v, bins=e)
    return GapHistogram(e, counts.astype(np.int64), int(counts.sum()))


def mean_first_gap(samples: Sequence[SpacingSample], t_lo: float = 0.0, t_hi: float = math.inf) -> float:
    return _mean(s.gap1 for s in samples if s.gap1 is not None and t_lo < s.gamma <= t_hi)


def telescoping_residual(samples: Sequence[SpacingSample]) -> float:
    """``|sum gap2 - (gamma2_last - gamma2_first)|`` over consecutive samples."""
    with_gap = [s for s in samples if s.gap2 is not None]
    if not with_gap:
        return 0.0
    total = math.fsum(s.gap2 for s in with_gap)
    last = with_gap[-1].gamma2 + with_gap[-1].gap2
    return abs(total - (last - with_gap[0].gamma2))


def stats_report(
    omega: float,
    family: str,
    T: float,
    samples: Sequence[SpacingSample],
    functionals: dict[str, float],
    tolerances: dict[str, float],
    rh_mode: bool = True,
) -> str:
    """JSON statistics report."""
    gaps2 = gap_values(samples)
    g1 = [s.gap1 for s in samples if s.gap1 is not None]
    doc = {
        "omega": omega,
        "family": family,
        "T": T,
        "n_zeros": len(samples),
        "mean_gap1": _mean(g1) if g1 else None,
        "var_gap2": float(np.var(gaps2)) if len(gaps2) else None,
        "functional_values": [{"phi": k, "value": v} for k, v in functionals.items()],
        "tolerances": [{"phi": k, "tolerance": v} for k, v in tolerances.items()],
        "rh_mode": rh_mode,
    }
    return json.dumps(doc, indent=1, sort_keys=True)
