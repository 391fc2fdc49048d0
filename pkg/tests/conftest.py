"""Shared, memoized scans and density tables (they are the slow part of the suite)."""
import functools
import math

import numpy as np

from xi_spectra.mfunction import m_density
from xi_spectra.spacing import rho_omega
from xi_spectra.zeros import scan


@functools.lru_cache(maxsize=None)
def get_scan(omega, family, T):
    return scan(omega, family, T, beyond=10.0)


@functools.lru_cache(maxsize=None)
def get_table(sigma):
    """Default-grid table at ``sigma``."""
    return m_density(sigma)


@functools.lru_cache(maxsize=None)
def get_gap_table(omega, half_width=7.0, count=1401, prime_cutoff=None):
    """Table whose u-grid covers ``|gap| <= half_width`` after the rho scaling."""
    scale = math.pi * math.sqrt(rho_omega(omega))
    u = np.linspace(-half_width * scale, half_width * scale, count)
    return m_density(0.5 + omega, u, prime_cutoff)


ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    """Print an acceptance verdict line and keep it for the terminal summary."""
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
