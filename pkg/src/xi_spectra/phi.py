"""Whitelisted test functions for the gap functionals.

Every entry is bounded and smooth with ``phi'(u) = O(u^-2)`` for large
``|u|``.  Moments such as ``u^2`` are available as ``clipped_square``
(clipped at 100) and are flagged ``formal`` when reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class WhitelistedPhi:
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    formal: bool = False

    def __call__(self, u):
        out = self.func(np.asarray(u, dtype=float))
        return float(out) if np.ndim(out) == 0 else out


def _constant(u):
    return np.ones_like(u)


def _clipped_square(u):
    return np.minimum(u * u, 100.0)


def _gauss(a: float):
    return lambda u: np.exp(-a * u * u)


def _smooth_step(center: float, width: float):
    # logistic step; its derivative decays exponentially
    return lambda u: 0.5 * (1.0 + np.tanh((u - center) / (2.0 * width)))


WHITELIST: dict[str, WhitelistedPhi] = {
    "constant": WhitelistedPhi("constant", _constant),
    "clipped_square": WhitelistedPhi("clipped_square", _clipped_square, formal=True),
    "gauss_0.5": WhitelistedPhi("gauss_0.5", _gauss(0.5)),
    "gauss_1": WhitelistedPhi("gauss_1", _gauss(1.0)),
    "gauss_2": WhitelistedPhi("gauss_2", _gauss(2.0)),
    "step_-1": WhitelistedPhi("step_-1", _smooth_step(-1.0, 0.25)),
    "step_0": WhitelistedPhi("step_0", _smooth_step(0.0, 0.25)),
    "step_1": WhitelistedPhi("step_1", _smooth_step(1.0, 0.25)),
}


def get(name: str) -> WhitelistedPhi:
    try:
        return WHITELIST[name]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; choose from {sorted(WHITELIST)}") from None


def theoretical_integral(phi: WhitelistedPhi, u: np.ndarray, density: np.ndarray) -> float:
    """Trapezoid of ``phi * density`` on a grid."""
    return float(np.trapezoid(phi(u) * density, u))


def gaussian_integral(phi: WhitelistedPhi, n: int = 4001, half_width: float = 10.0) -> float:
    u = np.linspace(-half_width, half_width, n)
    return float(np.trapezoid(phi(u) * np.exp(-0.5 * u * u), u) / math.sqrt(2.0 * math.pi))
