"""Arithmetic functions: von Mangoldt, its Dirichlet powers Lambda_k, and the
polynomials lambda_z(n) = sum_k (-i/2)^k Lambda_k(n) z^k / k!.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityExceeded, TableTooShallow

SIEVE_LIMIT = 10**7
MANGOLDT_LIMIT = 10**8
TABLE_MAX_N = 10**6
TABLE_MAX_K = 25


@lru_cache(maxsize=4)
def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    spf.setflags(write=False)
    return spf


def smallest_prime_factors(limit: int) -> np.ndarray:
    """``spf[n]`` for ``0 <= n <= limit`` (``spf[0] = 0``, ``spf[1] = 1``)."""
    if limit > SIEVE_LIMIT:
        raise CapacityExceeded(f"sieve limit is {SIEVE_LIMIT}")
    # round up so nearby requests share one cached sieve
    size = max(1 << 14, 1 << max(0, (limit - 1)).bit_length())
    return _spf_table(min(size, SIEVE_LIMIT))[: limit + 1]


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    out = np.nonzero(flags)[0].astype(np.int64)
    out.setflags(write=False)
    return out


def _prime_power_base(n: int) -> int:
    """The prime p if ``n = p^k`` (k >= 1), else 0."""
    if n < 2:
        return 0
    if n <= SIEVE_LIMIT:
        p = int(smallest_prime_factors(n)[n])
    else:
        p = n
        for d in range(2, math.isqrt(n) + 1):
            if n % d == 0:
                p = d
                break
    while n % p == 0:
        n //= p
    return p if n == 1 else 0


def von_mangoldt(n: int) -> float:
    if not 1 <= n <= MANGOLDT_LIMIT:
        raise ValueError(f"n must lie in [1, {MANGOLDT_LIMIT}]")
    p = _prime_power_base(int(n))
    return math.log(p) if p else 0.0


@lru_cache(maxsize=4)
def mangoldt_array(n_max: int) -> np.ndarray:
    """``Lambda(n)`` for ``0 <= n <= n_max`` (entry 0 is 0)."""
    out = np.zeros(n_max + 1)
    for p in primes_up_to(n_max):
        p = int(p)
        lp = math.log(p)
        q = p
        while q <= n_max:
            out[q] = lp
            q *= p
    out.setflags(write=False)
    return out


def big_omega_array(n_max: int) -> np.ndarray:
    """Number of prime factors with multiplicity, for ``0 <= n <= n_max``."""
    out = np.zeros(n_max + 1, dtype=np.int64)
    for p in primes_up_to(n_max):
        q = int(p)
        while q <= n_max:
            out[q::q] += 1
            q *= int(p)
    return out


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class LambdaTable:
    """``values[k, n] = Lambda_k(n)`` for ``k <= k_max``, ``n <= n_max``."""

    n_max: int
    k_max: int
    values: np.ndarray

    def __call__(self, n: int, k: int) -> float:
        return float(self.values[k, n])


def build_lambda_table(n_max: int, k_max: int) -> LambdaTable:
    """Lambda_k by repeated Dirichlet convolution ``Lambda_k = Lambda_{k-1} * Lambda``."""
    if n_max > TABLE_MAX_N or k_max > TABLE_MAX_K:
        raise CapacityExceeded(f"table limits are n <= {TABLE_MAX_N}, k <= {TABLE_MAX_K}")
    if n_max < 1 or k_max < 0:
        raise ValueError("need n_max >= 1 and k_max >= 0")
    lam = mangoldt_array(n_max)
    support = np.nonzero(lam)[0]
    vals = np.zeros((k_max + 1, n_max + 1))
    vals[0, 1] = 1.0
    for k in range(1, k_max + 1):
        prev, cur = vals[k - 1], vals[k]
        # Lambda_{k-1}(m) vanishes for m < 2^(k-1)
        m_min = 1 << (k - 1)
        for q in support:
            q = int(q)
            m_top = n_max // q
            if m_top < m_min:
                break
            cur[q * m_min : q * m_top + 1 : q] += lam[q] * prev[m_min : m_top + 1]
    vals.setflags(write=False)
    return LambdaTable(n_max, k_max, vals)


@dataclass(frozen=True)
class LambdaPolynomial:
    """``lambda_z(n)`` as coefficients in ``z`` (index k holds the z^k coefficient)."""

    n: int
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if len(nz) else -1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def lambda_poly(n: int, table: LambdaTable) -> LambdaPolynomial:
    if n < 1 or n > table.n_max:
        raise TableTooShallow(f"n = {n} outside table range 1..{table.n_max}")
    omega_n = sum(factorize(n).values())
    if omega_n > table.k_max:
        raise TableTooShallow(f"Omega({n}) = {omega_n} exceeds k_max = {table.k_max}")
    ks = np.arange(omega_n + 1)
    fact = np.array([math.factorial(int(k)) for k in ks], dtype=float)
    coeffs = (-0.5j) ** ks * table.values[: omega_n + 1, n] / fact
    return LambdaPolynomial(n, coeffs)


def prime_power_lambda_k(p: int, j: int, k: int) -> float:
    """Closed form ``Lambda_k(p^j) = (log p)^k * C(j-1, k-1)``."""
    if j == 0:
        return 1.0 if k == 0 else 0.0
    if k == 0 or k > j:
        return 0.0
    return math.log(p) ** k * math.comb(j - 1, k - 1)


def prime_power_lambda_values(a: np.ndarray, j_max: int) -> np.ndarray:
    """``lambda(p^j)`` for ``j = 0..j_max`` given ``a = -i x log(p) / 2``.

    These are the Taylor coefficients of ``exp(a T / (1 - T))`` and satisfy
    ``(j+1) l_{j+1} = (2j + a) l_j - (j-1) l_{j-1}``.  ``a`` may be an array;
    the result has shape ``(j_max + 1,) + a.shape``.
    """
    a = np.asarray(a, dtype=complex)
    out = np.empty((j_max + 1,) + a.shape, dtype=complex)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = a
    for j in range(1, j_max):
        out[j + 1] = ((2 * j + a) * out[j] - (j - 1) * out[j - 1]) / (j + 1)
    return out
