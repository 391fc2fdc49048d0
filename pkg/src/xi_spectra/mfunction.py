"""The M-function of zeta'/zeta on the real frequency axis and its m-density.

``Mtilde_sigma(x)`` is an Euler product of local factors
``sum_j lambda_x(p^j)^2 p^{-2 j sigma}``.  Each factor equals the average over
theta of ``exp(i x R_p(theta))`` with ``R_p = -log p * Re(X / (1 - X))`` and
``X = p^{-sigma} e^{-i theta}``, so Mtilde is the characteristic function of
``Re zeta'/zeta`` on the line ``Re s = sigma``.  The local factors are not
real: the distribution of ``R_p`` is skewed.  ``m_values`` stores the cosine
transform of ``Re Mtilde`` (the symmetrized density) and ``m_odd_values`` the
sine transform of ``Im Mtilde``; their sum is the density of
``Re zeta'/zeta`` itself, scaled by ``2 pi``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .arithmetic import (
    LambdaTable,
    factorize,
    lambda_poly,
    mangoldt_array,
    prime_power_lambda_values,
    primes_up_to,
)
from .errors import (
    ImaginaryResidue,
    InsufficientDecay,
    LoadError,
    MismatchedOmega,
    OutOfTableRange,
    SlowConvergence,
    TailTooLarge,
)
from .kernel import log_deriv_zeta_prime

LOCAL_TAIL_TOL = 1e-16
LOCAL_TAIL_LIMIT = 1e-12
MAX_J = 2000
# series terms |a| p^-sigma above this are summed by theta quadrature instead
SERIES_CONDITION = 0.5
DECAY_TARGET = 1e-10
DECAY_LIMIT = 1e-8
RICHARDSON_TOL = 1e-5
IMAG_STRICT_TOL = 1e-9


def default_prime_cutoff(sigma: float) -> int:
    return 10**5 if sigma >= 0.7 else 10**6


# -- local factors ------------------------------------------------------------


def local_tail_bound(sigma: float, p: int, abs_a: float, j_cutoff: int) -> float:
    """Bound for ``sum_{j > j_cutoff} |lambda(p^j)|^2 p^{-2 j sigma}``.

    Cauchy's estimate on the circle ``|T| = r`` for the generating function
    ``exp(a T / (1 - T))`` gives ``|lambda_j| <= exp(|a| r / (1 - r)) r^-j``
    for any ``p^-sigma < r < 1``; the best of a few radii is used.
    """
    ps = p ** (-sigma)
    best = math.inf
    for f in np.linspace(0.05, 0.95, 19):
        r = ps ** (1.0 - f)
        log_q = -2.0 * sigma * f * math.log(p)
        log_c2 = 2.0 * abs_a * r / (1.0 - r)
        log_b = log_c2 + (j_cutoff + 1) * log_q - math.log1p(-math.exp(log_q))
        best = min(best, log_b)
    return math.exp(best) if best < 700 else math.inf


def local_j_cutoff(sigma: float, p: int, abs_a: float, tol: float = LOCAL_TAIL_TOL) -> int:
    """Smallest j_cutoff whose :func:`local_tail_bound` is below ``tol``."""
    ps = p ** (-sigma)
    best = MAX_J + 1
    for f in np.linspace(0.05, 0.95, 19):
        r = ps ** (1.0 - f)
        log_q = -2.0 * sigma * f * math.log(p)
        log_c2 = 2.0 * abs_a * r / (1.0 - r)
        need = (math.log(tol) + math.log1p(-math.exp(log_q)) - log_c2) / log_q - 1.0
        best = min(best, max(1, math.ceil(need)))
    if best > MAX_J:
        raise TailTooLarge(f"p={p}, |a|={abs_a:.3g}: more than {MAX_J} local terms needed")
    return best


def _local_quadrature(sigma: float, p: int, x: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """Local factor as the theta-average of ``exp(i x R_p)`` (periodic trapezoid)."""
    lp = math.log(p)
    ps = p ** (-sigma)
    amp = np.max(np.abs(x)) * lp * ps / (1.0 - ps) if x.size else 0.0
    k = max(16, 1 << int(math.ceil(math.log2(4.0 * amp + 16.0))))
    prev = None
    while True:
        theta = 2.0 * math.pi * np.arange(k) / k
        big_x = ps * np.exp(-1j * theta)
        r = -lp * (big_x / (1.0 - big_x)).real
        val = np.exp(1j * np.multiply.outer(x, r)).mean(axis=-1)
        if prev is not None and np.max(np.abs(val - prev)) <= tol:
            return val
        if k > 1 << 20:
            raise TailTooLarge(f"theta quadrature did not settle for p={p}")
        prev = val
        k *= 2


def mtilde_local(
    sigma: float,
    p: int,
    x: float,
    j_cutoff: int | None = None,
    table: LambdaTable | None = None,
) -> complex:
    """Local Euler factor ``sum_j lambda_x(p^j) lambda_x(p^j) p^{-2 j sigma}``.

    With ``table`` the polynomials ``lambda_poly(p^j)`` are evaluated
    directly (so ``p^j_cutoff`` must fit in the table); otherwise the
    three-term recurrence for prime powers is used.  ``j_cutoff`` defaults
    to the smallest cutoff with tail bound below 1e-16; an explicit cutoff
    whose tail bound exceeds 1e-12 raises TailTooLarge.
    """
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    a = -0.5j * x * math.log(p)
    if j_cutoff is None:
        j_cutoff = local_j_cutoff(sigma, p, abs(a))
    else:
        bound = local_tail_bound(sigma, p, abs(a), j_cutoff)
        if bound > LOCAL_TAIL_LIMIT:
            raise TailTooLarge(f"tail bound {bound:.3g} at j_cutoff={j_cutoff}")
    if table is not None:
        lam = np.array([lambda_poly(p**j, table)(x) for j in range(j_cutoff + 1)], dtype=complex)
    else:
        lam = prime_power_lambda_values(np.array(a), j_cutoff)
    weights = float(p) ** (-2.0 * sigma * np.arange(j_cutoff + 1))
    return complex(np.sum(lam * lam * weights))


def mtilde_local_quadrature(sigma: float, p: int, x) -> np.ndarray:
    """The same local factor as :func:`mtilde_local`, via the theta-average."""
    return _local_quadrature(sigma, p, np.atleast_1d(np.asarray(x, dtype=float)))


# -- Euler product --------------------------------------------------------------


@dataclass
class EulerProductInfo:
    prime_cutoff: int
    j_cutoff_max: int
    quadrature_primes: int
    tail_variance: float
    tail_corrected: bool


def _series_block(sigma: float, primes: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, int]:
    """Product of local factors for ``primes`` (all well conditioned) at ``x``."""
    logs = np.log(primes.astype(float))
    abs_a = 0.5 * np.max(np.abs(x)) * logs[-1] if x.size else 0.0
    j_cut = local_j_cutoff(sigma, int(primes[0]), abs_a)
    a = -0.5j * np.multiply.outer(logs, x)
    lam = prime_power_lambda_values(a, j_cut)
    w = np.exp(-2.0 * sigma * np.multiply.outer(np.arange(j_cut + 1), logs))
    local = np.einsum("jpx,jp->px", lam * lam, w)
    return np.prod(local, axis=0), j_cut


def mtilde_complex(
    sigma: float,
    x,
    prime_cutoff: int | None = None,
    tail_correction: bool = True,
    info: bool = False,
):
    """Truncated Euler product for ``Mtilde_sigma`` at real ``x`` (complex values).

    Primes with ``|x| log(p) p^-sigma / 2 > 0.5`` use the theta quadrature,
    the rest the power series.  With ``tail_correction`` the primes above the
    cutoff contribute ``exp(-x^2 V / 4)`` where ``V = sum_{p > cutoff}
    (log p)^2 / (p^{2 sigma} - 1)`` is their exact share of ``mu_sigma``.
    """
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    if prime_cutoff is None:
        prime_cutoff = default_prime_cutoff(sigma)
    if prime_cutoff < 2:
        raise ValueError("prime_cutoff must be >= 2")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    primes = primes_up_to(int(prime_cutoff))
    out = np.ones(xs.shape, dtype=complex)
    x_abs = float(np.max(np.abs(xs))) if xs.size else 0.0
    cond = 0.5 * x_abs * np.log(primes) * primes.astype(float) ** (-sigma)
    n_quad = int(np.count_nonzero(cond > SERIES_CONDITION))
    # cond is decreasing in p beyond p = 3, so the quadrature primes are a prefix
    n_quad = int(np.max(np.nonzero(cond > SERIES_CONDITION)[0]) + 1) if n_quad else 0
    for p in primes[:n_quad]:
        out *= _local_quadrature(sigma, int(p), xs)
    j_max = 0
    rest = primes[n_quad:]
    start = 0
    while start < len(rest):
        # blocks spanning a factor 2 in p keep the shared cutoff tight
        stop = int(np.searchsorted(rest, 2 * rest[start], side="left"))
        stop = max(stop, start + 1)
        for lo in range(start, stop, 4096):
            hi = min(stop, lo + 4096)
            block, j_cut = _series_block(sigma, rest[lo:hi], xs)
            out *= block
            j_max = max(j_max, j_cut)
        start = stop
    v_tail = tail_variance(sigma, int(prime_cutoff))
    if tail_correction:
        out *= np.exp(-0.25 * xs * xs * v_tail)
    result = complex(out[0]) if scalar else out
    if info:
        return result, EulerProductInfo(int(prime_cutoff), j_max, n_quad, v_tail, tail_correction)
    return result


def mtilde(
    sigma: float,
    x,
    prime_cutoff: int | None = None,
    tail_correction: bool = True,
    strict: bool = False,
):
    """Real part of :func:`mtilde_complex`.

    The imaginary part is genuinely nonzero; with ``strict`` a residue above
    ``1e-9`` raises ImaginaryResidue instead of being discarded.
    """
    val = mtilde_complex(sigma, x, prime_cutoff, tail_correction)
    if strict:
        resid = float(np.max(np.abs(np.imag(val))))
        if resid > IMAG_STRICT_TOL:
            raise ImaginaryResidue(f"imaginary part {resid:.3g} at sigma={sigma}")
    return np.real(val) if np.ndim(val) else val.real


def mtilde_dirichlet(sigma: float, x: float, table: LambdaTable, smooth_bound: int | None = None) -> complex:
    """Dirichlet series ``sum_{n <= n_max} lambda_x(n)^2 n^{-2 sigma}`` from a Lambda_k table.

    With ``smooth_bound`` only n free of primes above it are summed, which
    matches the Euler product over ``p <= smooth_bound``.
    """
    k = np.arange(table.k_max + 1)
    coeff = (-0.5j * x) ** k / np.array([math.factorial(int(i)) for i in k], dtype=float)
    lam = coeff @ table.values
    n = np.arange(table.n_max + 1, dtype=float)
    n[0] = 1.0
    terms = lam * lam * n ** (-2.0 * sigma)
    terms[0] = 0.0
    if smooth_bound is not None:
        terms = terms * smooth_mask(table.n_max, smooth_bound)
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))


def smooth_mask(n_max: int, bound: int) -> np.ndarray:
    """``mask[n]`` true when every prime factor of n is at most ``bound``."""
    rest = np.arange(n_max + 1, dtype=np.int64)
    for p in primes_up_to(bound):
        p = int(p)
        q = p
        # each multiple of p^k loses one factor p per k
        while q <= n_max:
            rest[q::q] //= p
            q *= p
    return rest == 1


# -- variance -----------------------------------------------------------------


@lru_cache(maxsize=64)
def _c_coeff(m: int) -> int:
    out = 1
    for p in factorize(m):
        out *= 1 - p
    return out


def mu_sigma(sigma: float, rel_tol: float = 1e-12, method: str = "zeta") -> float:
    """``mu_sigma = sum_n Lambda(n)^2 n^{-2 sigma}``.

    ``method="zeta"`` uses ``mu = sum_m c(m) (zeta'/zeta)'(2 m sigma)`` with
    ``c(m) = prod_{p | m} (1 - p)``, which converges geometrically for every
    ``sigma > 1/2``.  ``method="direct"`` sums the series to the point where
    an integral tail bound falls below ``rel_tol`` times the partial sum.
    """
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    if method == "direct":
        return _direct_square_sum(2.0 * sigma, rel_tol)
    if method != "zeta":
        raise ValueError(f"unknown method {method!r}")
    s = 2.0 * sigma
    total = 0.0
    parts = []
    m = 1
    while True:
        term = _c_coeff(m) * log_deriv_zeta_prime(m * s).real
        parts.append(term)
        total += term
        # |(zeta'/zeta)'(y)| < 2 (log 2)^2 2^-y for y >= 4 and |c(m)| <= m
        nxt = (m + 1) * 2.0 * math.log(2.0) ** 2 * 2.0 ** (-(m + 1) * s) / (1.0 - 2.0 ** (-s) * (m + 2) / (m + 1))
        if m * s >= 4.0 and nxt < rel_tol * abs(total):
            break
        m += 1
        if m > 10_000:
            raise SlowConvergence("mu_sigma series did not converge")
    return math.fsum(parts)


def _direct_square_sum(s: float, rel_tol: float, n_cap: int = 10**8) -> float:
    """``sum Lambda(n)^2 n^-s`` with tail bound ``int_N^inf (log t)^2 t^-s dt``."""
    if s <= 1.0:
        raise ValueError("need s > 1")

    def tail(n: float) -> float:
        a = s - 1.0
        ln = math.log(n)
        return n ** (-a) * (ln * ln / a + 2.0 * ln / a**2 + 2.0 / a**3)

    n = 10**4
    while True:
        if n > n_cap:
            raise SlowConvergence(f"direct sum needs more than {n_cap:g} terms")
        lam = mangoldt_array(n)
        idx = np.nonzero(lam)[0]
        part = math.fsum(lam[idx] ** 2 * idx.astype(float) ** (-s))
        if tail(n) <= rel_tol * part:
            return part
        # pick the next N from the tail bound, at least doubling
        n_next = n * 2
        while tail(n_next) > rel_tol * part and n_next <= n_cap:
            n_next *= 2
        n = n_next


def prime_log_square_sum(s: float, prime_cutoff: int) -> float:
    """``sum_{p <= P} (log p)^2 / (p^s - 1)``: the prime-power sum with all j folded in."""
    p = primes_up_to(int(prime_cutoff)).astype(float)
    lp = np.log(p)
    return math.fsum(lp * lp / np.expm1(s * lp))


def tail_variance(sigma: float, prime_cutoff: int) -> float:
    """``sum_{p > P} (log p)^2 / (p^{2 sigma} - 1)``, the variance left out by the cutoff."""
    return max(0.0, mu_sigma(sigma) - prime_log_square_sum(2.0 * sigma, prime_cutoff))


def prime_zeta_log_square(s: float, rel_tol: float = 1e-14) -> float:
    """``sum_p (log p)^2 p^-s = sum_k mu(k) k (zeta'/zeta)'(k s)``."""
    if s <= 1.0:
        raise ValueError("need s > 1")
    total = []
    k = 1
    while True:
        mob = _mobius(k)
        if mob:
            total.append(mob * k * log_deriv_zeta_prime(k * s).real)
        bound = (k + 1) * 2.0 * math.log(2.0) ** 2 * 2.0 ** (-(k + 1) * s) * 4.0
        if k * s >= 4.0 and bound < rel_tol * abs(math.fsum(total)):
            return math.fsum(total)
        k += 1


def _mobius(k: int) -> int:
    f = factorize(k)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


# -- density table ----------------------------------------------------------


@dataclass
class MDensityTable:
    sigma: float
    x_grid: np.ndarray
    mtilde_values: np.ndarray
    u_grid: np.ndarray
    m_values: np.ndarray
    prime_cutoff: int
    j_cutoff: int
    quadrature_meta: dict = field(default_factory=dict)
    mtilde_imag: np.ndarray | None = None
    m_odd_values: np.ndarray | None = None

    def density(self, u, oriented: bool = False) -> np.ndarray:
        """Interpolated m (symmetrized) or the full density ``m + m_odd``."""
        u = np.asarray(u, dtype=float)
        lo, hi = self.u_grid[0], self.u_grid[-1]
        if np.any(u < lo - 1e-12) or np.any(u > hi + 1e-12):
            raise OutOfTableRange(f"u outside [{lo:g}, {hi:g}]")
        vals = self.m_values
        if oriented:
            vals = vals + self.m_odd_values
        return np.interp(u, self.u_grid, vals)

    def normalization(self) -> float:
        return float(np.trapezoid(self.m_values, self.u_grid) / (2.0 * math.pi))

    def second_moment(self) -> float:
        """``(1/2pi) int u^2 m du``; equals ``mu_sigma / 2``."""
        return float(np.trapezoid(self.u_grid**2 * self.m_values, self.u_grid) / (2.0 * math.pi))

    def to_json(self) -> dict:
        meta = dict(self.quadrature_meta)
        meta.update(sigma=self.sigma, prime_cutoff=self.prime_cutoff, j_cutoff=self.j_cutoff, version=__version__)
        return {
            "metadata": meta,
            "frequency": {
                "x": self.x_grid.tolist(),
                "mtilde_re": self.mtilde_values.tolist(),
                "mtilde_im": (self.mtilde_imag if self.mtilde_imag is not None else np.zeros_like(self.x_grid)).tolist(),
            },
            "value": {
                "u": self.u_grid.tolist(),
                "m": self.m_values.tolist(),
                "m_odd": (self.m_odd_values if self.m_odd_values is not None else np.zeros_like(self.u_grid)).tolist(),
            },
        }

    def save(self, path: str | Path, extra_meta: dict | None = None) -> None:
        doc = self.to_json()
        if extra_meta:
            doc["metadata"].update(extra_meta)
        Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path, max_richardson: float | None = None, max_norm_error: float | None = None) -> "MDensityTable":
        """Read a table; refuse it if its recorded errors exceed the requested ones."""
        try:
            doc = json.loads(Path(path).read_text())
            meta = doc["metadata"]
            freq, val = doc["frequency"], doc["value"]
            table = cls(
                sigma=float(meta["sigma"]),
                x_grid=np.asarray(freq["x"], dtype=float),
                mtilde_values=np.asarray(freq["mtilde_re"], dtype=float),
                u_grid=np.asarray(val["u"], dtype=float),
                m_values=np.asarray(val["m"], dtype=float),
                prime_cutoff=int(meta["prime_cutoff"]),
                j_cutoff=int(meta["j_cutoff"]),
                quadrature_meta={k: v for k, v in meta.items() if k not in ("sigma", "prime_cutoff", "j_cutoff")},
                mtilde_imag=np.asarray(freq["mtilde_im"], dtype=float),
                m_odd_values=np.asarray(val["m_odd"], dtype=float),
            )
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise LoadError(f"{path}: {exc}") from exc
        if len(table.x_grid) != len(table.mtilde_values) or len(table.u_grid) != len(table.m_values):
            raise LoadError(f"{path}: grid and value arrays differ in length")
        if len(table.u_grid) < 2 or np.any(np.diff(table.u_grid) <= 0):
            raise LoadError(f"{path}: u grid not strictly increasing")
        if max_richardson is not None and meta.get("richardson_diff", math.inf) > max_richardson:
            raise LoadError(f"{path}: richardson_diff {meta.get('richardson_diff')} exceeds {max_richardson}")
        if max_norm_error is not None and abs(meta.get("normalization", math.inf) - 1.0) > max_norm_error:
            raise LoadError(f"{path}: normalization error exceeds {max_norm_error}")
        return table


def default_u_grid(sigma: float, count: int = 801, width: float = 10.0) -> np.ndarray:
    """Odd-count grid over ``+-width`` standard deviations, mirror-exact about 0."""
    sd = math.sqrt(mu_sigma(sigma) / 2.0)
    half = np.linspace(0.0, width * sd, count // 2 + 1)
    return np.concatenate([-half[:0:-1], half])


def find_x_max(sigma: float, prime_cutoff: int, target: float = DECAY_TARGET, tail_correction: bool = True) -> float:
    """A frequency beyond which ``|Mtilde|`` stays below ``target`` on a probe grid."""
    mu = mu_sigma(sigma)
    if not tail_correction:
        mu -= tail_variance(sigma, prime_cutoff)
    x = math.sqrt(4.0 * math.log(1.0 / target) / mu)
    while True:
        probe = np.linspace(0.75 * x, 1.5 * x, 24)
        if np.max(np.abs(mtilde_complex(sigma, probe, prime_cutoff, tail_correction))) < target:
            return x
        x *= 1.5
        if x > 1e5:
            raise InsufficientDecay(f"no decay below {target:g} found for sigma={sigma}")


def _transforms(x: np.ndarray, vals: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cosine transform of ``Re vals`` and sine transform of ``Im vals`` at ``u``.

    Both are evaluated at ``|u|`` only, so the even part is exactly even.
    """
    h = x[1] - x[0]
    w = np.full(x.shape, h)
    w[0] = w[-1] = 0.5 * h
    au, inv = np.unique(np.abs(u), return_inverse=True)
    phase = np.multiply.outer(au, x)
    even = 2.0 * np.cos(phase) @ (w * vals.real)
    odd = 2.0 * np.sin(phase) @ (w * vals.imag)
    return even[inv], np.sign(u) * odd[inv]


def m_density(
    sigma: float,
    u_grid: Sequence[float] | None = None,
    prime_cutoff: int | None = None,
    x_max: float | None = None,
    x_step: float | None = None,
    tail_correction: bool = True,
) -> MDensityTable:
    """Tabulate ``Mtilde_sigma`` on ``[0, x_max]`` and invert it to ``m_sigma``.

    ``m(u) = 2 int_0^x_max Re Mtilde(x) cos(x u) dx`` by the trapezoid rule on
    a grid of step ``x_step / 2``; the same rule at ``x_step`` gives the
    Richardson check recorded as ``richardson_diff``.  ``tail_correction``
    is passed to :func:`mtilde_complex`.
    """
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    if prime_cutoff is None:
        prime_cutoff = default_prime_cutoff(sigma)
    u = np.asarray(default_u_grid(sigma) if u_grid is None else u_grid, dtype=float)
    if u.ndim != 1 or len(u) < 2 or np.any(np.diff(u) <= 0):
        raise ValueError("u_grid must be strictly increasing")
    if x_max is None:
        x_max = find_x_max(sigma, prime_cutoff, tail_correction=tail_correction)
    u_abs = float(np.max(np.abs(u)))
    if x_step is None:
        x_step = min(0.05, math.pi / (2.0 * u_abs))
    n_half = int(math.ceil(x_max / x_step))
    x_fine = np.linspace(0.0, n_half * x_step, 2 * n_half + 1)
    values, info = mtilde_complex(sigma, x_fine, prime_cutoff, tail_correction, info=True)
    tail_mod = float(abs(values[-1]))
    if tail_mod > DECAY_LIMIT:
        raise InsufficientDecay(f"|Mtilde({x_fine[-1]:.4g})| = {tail_mod:.3g} > {DECAY_LIMIT:g}")
    even, odd = _transforms(x_fine, values, u)
    even_coarse, _ = _transforms(x_fine[::2], values[::2], u)
    richardson = float(np.max(np.abs(even - even_coarse)))
    norm = float(np.trapezoid(even, u) / (2.0 * math.pi))
    meta = {
        "x_max": float(x_fine[-1]),
        "x_step": float(x_step),
        "x_step_used": float(x_fine[1] - x_fine[0]),
        "richardson_diff": richardson,
        "richardson_tol": RICHARDSON_TOL,
        "richardson_ok": richardson <= RICHARDSON_TOL,
        "mtilde_at_x_max": tail_mod,
        "decay_target": DECAY_TARGET,
        "normalization": norm,
        "min_over_max": float(np.min(even) / np.max(even)),
        "imag_residue_max": float(np.max(np.abs(values.imag))),
        "mtilde_at_zero": float(values[0].real),
        "tail_variance": info.tail_variance,
        "tail_corrected": info.tail_corrected,
        "quadrature_primes": info.quadrature_primes,
        "mu_sigma": mu_sigma(sigma),
    }
    return MDensityTable(
        sigma=float(sigma),
        x_grid=x_fine,
        mtilde_values=values.real.copy(),
        u_grid=u,
        m_values=even,
        prime_cutoff=int(prime_cutoff),
        j_cutoff=int(info.j_cutoff_max),
        quadrature_meta=meta,
        mtilde_imag=values.imag.copy(),
        m_odd_values=odd,
    )


# -- Theorem-level densities ----------------------------------------------------


def _check_sigma(omega: float, table: MDensityTable) -> None:
    if abs(table.sigma - (0.5 + omega)) > 1e-12:
        raise MismatchedOmega(f"table sigma {table.sigma} does not match omega {omega}")


def gap_density(omega: float, u, table: MDensityTable, oriented: bool = False, rho: float | None = None):
    """``g(u) = (1/2pi) pi sqrt(rho) m(pi sqrt(rho) u)``.

    With ``oriented`` the full density of the gap statistic
    ``-Re zeta'/zeta / (pi sqrt(rho))`` is used, i.e. ``m`` reflected and
    including its odd part.
    """
    from .spacing import rho_omega

    _check_sigma(omega, table)
    if rho is None:
        rho = rho_omega(omega)
    scale = math.pi * math.sqrt(rho)
    v = scale * np.asarray(u, dtype=float)
    if oriented:
        vals = table.density(-v, oriented=True)
    else:
        vals = table.density(v)
    out = scale * vals / (2.0 * math.pi)
    return float(out) if np.ndim(out) == 0 else out


def gap_density_support(omega: float, table: MDensityTable, rho: float | None = None) -> tuple[float, float]:
    from .spacing import rho_omega

    if rho is None:
        rho = rho_omega(omega)
    scale = math.pi * math.sqrt(rho)
    return float(table.u_grid[0] / scale), float(table.u_grid[-1] / scale)


def gaussian_limit_error(omega: float, table: MDensityTable, oriented: bool = False, u_abs: float = 5.0) -> float:
    """Sup over ``|u| <= 5`` of ``|g(u) - exp(-u^2/2)/sqrt(2 pi)|``."""
    if not 0.0 < omega <= 0.3:
        raise ValueError("the Gaussian limit study needs 0 < omega <= 0.3")
    u = np.linspace(-u_abs, u_abs, 2001)
    g = gap_density(omega, u, table, oriented=oriented)
    target = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    return float(np.max(np.abs(g - target)))


def gue_surmise(u):
    """Wigner surmise ``(32/pi^2) u^2 exp(-4 u^2 / pi)`` for spacings ``u >= 0``."""
    u = np.asarray(u, dtype=float)
    out = np.where(u >= 0.0, 32.0 / math.pi**2 * u * u * np.exp(-4.0 * u * u / math.pi), 0.0)
    return float(out) if out.ndim == 0 else out
