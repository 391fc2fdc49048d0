"""Special-function kernel: zeta, its logarithmic derivative, log-gamma and xi.

Everything works in ordinary double precision.  Values of xi that decay like
``exp(-pi|t|/4)`` are carried as :class:`LogPolarValue` so that the zero
scanner can read off signs at heights where the modulus itself underflows.

zeta is evaluated by Euler--Maclaurin summation with the head length
``N = max(20, ceil(2|Im s|))``; for ``Re s < 0`` the functional equation is
applied first.  Derivatives are carried through the same formula as truncated
Taylor jets in ``s``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

from .errors import (
    NearZeroOfZeta,
    PoleAtNonPositiveInteger,
    PoleAtOne,
    RangeExceeded,
)

MAX_HEIGHT = 1.0e5
EM_MIN_HEAD = 20
EM_MAX_TERMS = 30
STIRLING_SHIFT = 12.0
XI_SINGULAR_RADIUS = 1e-8

_LOG_PI = math.log(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2, B_4, ..., B_{2*EM_MAX_TERMS}
_B2K = np.asarray(bernoulli(2 * EM_MAX_TERMS)[2::2], dtype=float)
_FACT2K = np.array([math.factorial(2 * k) for k in range(1, EM_MAX_TERMS + 1)], dtype=float)
_STIRLING_COEFFS = [_B2K[k - 1] / (2 * k * (2 * k - 1)) for k in range(1, 12)]


@dataclass(frozen=True)
class LogPolarValue:
    """A complex number stored as ``exp(log_mod + i*phase)``.

    ``log_mod == -inf`` encodes an exact zero.  The phase is not reduced
    modulo 2*pi.
    """

    log_mod: float
    phase: float

    @property
    def is_zero(self) -> bool:
        return self.log_mod == -math.inf

    def value(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.rect(math.exp(self.log_mod), self.phase)

    def conjugate(self) -> "LogPolarValue":
        return LogPolarValue(self.log_mod, -self.phase)

    def ratio(self, other: "LogPolarValue") -> complex:
        """``self / other`` evaluated without forming either modulus."""
        return cmath.rect(math.exp(self.log_mod - other.log_mod), self.phase - other.phase)


@lru_cache(maxsize=8)
def _log_n(n_max: int) -> np.ndarray:
    out = np.log(np.arange(1, n_max + 1, dtype=float))
    out.setflags(write=False)
    return out


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _head_length(s: complex) -> int:
    return max(EM_MIN_HEAD, math.ceil(2.0 * abs(s.imag)))


def _check_range(s: complex) -> None:
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise ValueError(f"non-finite argument {s!r}")
    if abs(s.imag) > MAX_HEIGHT:
        raise RangeExceeded(f"|Im s| = {abs(s.imag):g} exceeds {MAX_HEIGHT:g}")


def _zeta_jet(s: complex, order: int, rel_tol: float) -> np.ndarray:
    """Taylor coefficients ``zeta^(k)(s)/k!`` for ``k <= order`` by Euler--Maclaurin."""
    n_head = _head_length(s)
    logs = _log_n(n_head)[: n_head - 1]
    w = np.exp(-s * logs)
    jet = np.empty(order + 1, dtype=complex)
    pw = w
    for k in range(order + 1):
        if k:
            pw = pw * (-logs) / k
        jet[k] = pw.sum()

    log_big_n = math.log(n_head)
    # N^{-(s+eps)} as a jet
    n_pow = cmath.exp(-s * log_big_n) * np.array(
        [(-log_big_n) ** k / math.factorial(k) for k in range(order + 1)], dtype=complex
    )
    inv_sm1 = np.array([(-1) ** k / (s - 1) ** (k + 1) for k in range(order + 1)], dtype=complex)
    jet += n_head * _jet_mul(n_pow, inv_sm1)
    jet += 0.5 * n_pow

    # Bernoulli corrections B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    poly = np.zeros(order + 1, dtype=complex)
    poly[0] = s
    if order >= 1:
        poly[1] = 1.0
    scale = 1.0 / n_head
    for k in range(1, EM_MAX_TERMS + 1):
        if k > 1:
            for shift in (2 * k - 3, 2 * k - 2):
                factor = np.zeros(order + 1, dtype=complex)
                factor[0] = s + shift
                if order >= 1:
                    factor[1] = 1.0
                poly = _jet_mul(poly, factor)
            scale /= n_head * n_head
        term = (_B2K[k - 1] / _FACT2K[k - 1]) * scale * _jet_mul(poly, n_pow)
        jet += term
        if np.all(np.abs(term) <= 0.1 * rel_tol * np.maximum(np.abs(jet), 1e-300)):
            break
    return jet


def _log_sin(z: complex) -> complex:
    """A logarithm of ``sin z`` that does not overflow for large ``|Im z|``."""
    if z.imag >= 0.0:
        return -math.log(2.0) + 0.5j * math.pi - 1j * z + cmath.log(1.0 - cmath.exp(2j * z))
    return -math.log(2.0) - 0.5j * math.pi + 1j * z + cmath.log(1.0 - cmath.exp(-2j * z))


def zeta(s: complex, rel_tol: float = 1e-13) -> complex:
    """Riemann zeta function.

    Raises PoleAtOne within 1e-12 of ``s = 1`` and RangeExceeded above the
    supported height.
    """
    s = complex(s)
    _check_range(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne("zeta has a pole at s = 1")
    rel_tol = min(max(rel_tol, 1e-14), 1e-6)
    if s.real < 0.0:
        if s.imag == 0.0 and s.real == round(s.real) and int(s.real) % 2 == 0:
            return 0j
        one_minus = 1.0 - s
        log_factor = s * math.log(2.0) + (s - 1.0) * _LOG_PI + _log_sin(0.5 * math.pi * s) + log_gamma(one_minus)
        value = cmath.exp(log_factor) * complex(_zeta_jet(one_minus, 0, rel_tol)[0])
        if s.imag == 0.0:
            return complex(value.real, 0.0)
        return value
    value = complex(_zeta_jet(s, 0, rel_tol)[0])
    if s.imag == 0.0:
        return complex(value.real, 0.0)
    return value


def zeta_derivatives(s: complex, order: int = 1, rel_tol: float = 1e-13) -> list[complex]:
    """``[zeta(s), zeta'(s), ..., zeta^(order)(s)]`` for ``Re s >= 0``."""
    s = complex(s)
    _check_range(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne("zeta has a pole at s = 1")
    if s.real < 0.0:
        raise ValueError("derivatives are only provided for Re s >= 0")
    jet = _zeta_jet(s, order, rel_tol)
    return [complex(jet[k]) * math.factorial(k) for k in range(order + 1)]


def log_deriv_zeta(s: complex) -> complex:
    """``zeta'(s)/zeta(s)`` for ``Re s > 1/2``."""
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError("log_deriv_zeta requires Re s > 1/2")
    z0, z1 = zeta_derivatives(s, 1)
    if abs(z0) < 1e-13:
        raise NearZeroOfZeta(f"|zeta({s})| = {abs(z0):.3g}")
    return z1 / z0


def log_deriv_zeta_prime(s: complex) -> complex:
    """Derivative of ``zeta'/zeta``; equals ``sum Lambda(n) log(n) n^-s`` for ``Re s > 1``."""
    z0, z1, z2 = zeta_derivatives(complex(s), 2)
    if abs(z0) < 1e-13:
        raise NearZeroOfZeta(f"|zeta({s})| = {abs(z0):.3g}")
    q = z1 / z0
    return z2 / z0 - q * q


def log_gamma(s: complex) -> complex:
    """Log-gamma on the standard branch (real on the positive axis).

    Stirling series after shifting ``Re s`` above 12 with the recurrence; the
    shift uses principal logarithms, which keeps the branch continuous off the
    negative real axis.
    """
    z = complex(s)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {s!r}")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleAtNonPositiveInteger(f"gamma has a pole at {z.real:g}")
    shift = 0j
    while z.real < STIRLING_SHIFT:
        shift += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING_COEFFS:
        series += c * power
        power *= inv2
    out = (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + series - shift
    if complex(s).imag == 0.0 and complex(s).real > 0.0:
        return complex(out.real, 0.0)
    return out


def xi(s: complex) -> LogPolarValue:
    """``xi(s) = s(s-1) pi^{-s/2} Gamma(s/2) zeta(s) / 2`` in log-polar form.

    The phase is the sum of the principal phases of the five factors.  Within
    ``1e-8`` of the removable singularities ``s = 0, 1`` the exact value 1/2
    is returned.
    """
    s = complex(s)
    _check_range(s)
    if abs(s) < XI_SINGULAR_RADIUS or abs(s - 1.0) < XI_SINGULAR_RADIUS:
        return LogPolarValue(math.log(0.5), 0.0)
    z = zeta(s)
    if z == 0:
        if s.imag == 0.0 and s.real < 0.0:
            # trivial zero cancelled by the gamma pole: use the functional equation
            return xi(1.0 - s)
        return LogPolarValue(-math.inf, 0.0)
    total = (
        -math.log(2.0)
        + cmath.log(s)
        + cmath.log(s - 1.0)
        - 0.5 * s * _LOG_PI
        + log_gamma(0.5 * s)
        + cmath.log(z)
    )
    if s.imag == 0.0:
        # every factor is real: report the phase as exactly 0 or pi
        return LogPolarValue(float(total.real), 0.0 if math.cos(total.imag) > 0 else math.pi)
    return LogPolarValue(float(total.real), float(total.imag))


def xi_shifted(omega: float, t: float) -> tuple[float, float, float]:
    """Scaled values of ``A_omega(1/2+it)`` and ``B_omega(1/2+it)``.

    Returns ``(a_scaled, b_scaled, scale_log)`` with
    ``a_scaled = exp(-scale_log) * Re xi(1/2+omega+it)`` and
    ``b_scaled = -exp(-scale_log) * Im xi(1/2+omega+it)``.  The scale is
    ``|xi|`` itself, so ``a_scaled**2 + b_scaled**2 == 1`` and the signs are
    those of the unscaled functions.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    v = xi(complex(0.5 + omega, t))
    if v.is_zero:
        return 0.0, 0.0, -math.inf
    if t == 0.0:
        return (1.0 if v.phase == 0.0 else -1.0), 0.0, v.log_mod
    return math.cos(v.phase), -math.sin(v.phase), float(v.log_mod)


def xi_phase(omega: float, t: float) -> float:
    """Principal-sum phase of ``xi(1/2+omega+it)`` (not path-continuous)."""
    return xi(complex(0.5 + omega, t)).phase
