"""Small-scale fading of the SN downlink.

The fading power gain ``g`` follows a unit-scale Gamma law with shape
equal to the number of transmit antennas.  The threshold probability
``eps_t`` is the mass below ``g_th``.
"""
from __future__ import annotations

import math

from scipy.special import gammainc

MAX_ANTENNAS = 64


def _check_antennas(n_t: int) -> None:
    if int(n_t) != n_t or not 1 <= n_t <= MAX_ANTENNAS:
        raise ValueError(f"n_t must be an integer in [1, {MAX_ANTENNAS}], got {n_t!r}")


def fading_pdf(x: float, n_t: int) -> float:
    """Density ``x**(n_t-1) * exp(-x) / (n_t-1)!``."""
    _check_antennas(n_t)
    if x < 0.0:
        raise ValueError(f"gain must be non-negative, got {x!r}")
    if x == 0.0:
        return 1.0 if n_t == 1 else 0.0
    return math.exp((n_t - 1) * math.log(x) - x - math.lgamma(n_t))


def outage_prob(g_th: float, n_t: int) -> float:
    """Probability that the fading gain falls at or below ``g_th``."""
    _check_antennas(n_t)
    if g_th < 0.0:
        raise ValueError(f"g_th must be non-negative, got {g_th!r}")
    return float(gammainc(n_t, g_th))


def threshold_from_outage(eps_t: float, n_t: int, max_iter: int = 200) -> float:
    """Invert :func:`outage_prob` by bisection on ``[0, n_t + 40]``."""
    _check_antennas(n_t)
    if not 0.0 <= eps_t < 1.0:
        raise ValueError(f"eps_t must lie in [0, 1), got {eps_t!r}")
    if eps_t == 0.0:
        return 0.0
    lo, hi = 0.0, n_t + 40.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if gammainc(n_t, mid) < eps_t:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * hi:
            break
    return 0.5 * (lo + hi)
