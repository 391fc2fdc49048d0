"""Zeros of the xi-function combinations A_omega, B_omega, their spacing
statistics, and the M-function density of zeta'/zeta."""

__version__ = "0.1.0"
