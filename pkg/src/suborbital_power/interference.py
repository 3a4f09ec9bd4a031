"""Expected aggregate satellite interference at the receiving station.

Satellites on each shell form a homogeneous Poisson process on the
orbital plane.  :func:`expected_interference` integrates the
per-satellite kernel ``P_SN f_PL(d) G_tx(d) G_rx(d)`` against the
distance-domain intensity (Campbell's theorem);
:func:`simulate_realizations` draws the point process itself and is the
independent check on the integral.  Both honor the configured
``measure`` (see :func:`~suborbital_power.orbit_geometry.intensity_measure`).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numba
import numpy as np

from .antenna import GainPattern, OverlapGain, overlap_gain
from .orbit_geometry import (
    MEASURES,
    DistanceWindow,
    OrbitShell,
    cumulative_measure,
    integration_limits,
    intensity_measure,
    interferer_path_loss,
)

GENERATOR_NAME = "numpy.random.Philox (SeedSequence(seed, spawn_key=(block, shell)))"
BLOCK_SIZE = 2048
TABLE_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class InterferenceConfig:
    """Shells plus the satellite (tx) and receiving-station (rx) patterns.

    ``pathloss`` optionally replaces the segmented path-loss law with a
    callable ``f(d, shell)``; it exists for closed-form checks and
    sensitivity studies.
    """

    shells: Sequence[OrbitShell]
    tx_pattern: GainPattern
    rx_pattern: GainPattern
    quadrature_points: int = 512
    gating: bool = True
    u_floor: float = 0.01
    duty_cycle: float = 1.0
    measure: str = "area"
    pathloss: Optional[Callable] = None

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        object.__setattr__(self, "shells", tuple(self.shells))
        if not self.shells:
            raise ValueError("at least one orbit shell is required")
        if self.quadrature_points < 64:
            raise ValueError("quadrature_points must be >= 64")
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ValueError("duty_cycle must lie in [0, 1]")

    @property
    def rx_steer_u(self) -> float:
        return self.rx_pattern.center

    def window(self, index: int) -> Optional[DistanceWindow]:
        shell = self.shells[index]
        return integration_limits(self.rx_steer_u, self.rx_pattern.halfwidth,
                                  self.tx_pattern.halfwidth, shell.altitude,
                                  sat_center_u=self.tx_pattern.center, u_floor=self.u_floor)

    def overlap(self, index: int) -> OverlapGain:
        return overlap_gain(self.tx_pattern, self.rx_pattern, self.shells[index].altitude,
                            gating=self.gating, orbit_index=index)

    def kernel(self, index: int) -> Callable[[np.ndarray], np.ndarray]:
        """Per-satellite received power ``P_SN * F(d)`` (duty cycle applied)."""
        shell = self.shells[index]
        table = self.overlap(index)
        pathloss = self.pathloss or interferer_path_loss
        scale = shell.tx_power * self.duty_cycle

        def f(d):
            return scale * pathloss(d, shell) * table.at(d)

        return f


def shell_interference(cfg: InterferenceConfig) -> list[float]:
    """Expected interference contributed by each shell, in W."""
    out = []
    for i, shell in enumerate(cfg.shells):
        win = cfg.window(i)
        if win is None:
            out.append(0.0)
            continue
        d = np.linspace(win.lower, win.upper, cfg.quadrature_points)
        integrand = cfg.kernel(i)(d) * intensity_measure(d, shell, cfg.measure)
        out.append(float(np.trapezoid(integrand, d)))
    return out


def expected_interference(cfg: InterferenceConfig) -> float:
    """Campbell-integral expectation of the aggregate interference, in W."""
    return math.fsum(shell_interference(cfg))


# -- Monte Carlo --------------------------------------------------------------

class _ShellDraw(NamedTuple):
    mean_count: float
    table: np.ndarray  # kernel on a grid uniform in the cumulative measure


def _invert_cumulative(v: np.ndarray, shell: OrbitShell, measure: str,
                       win: DistanceWindow) -> np.ndarray:
    """Distances at which the cumulative measure reaches ``v``."""
    big_l = shell.altitude
    if measure == "area":
        d = np.sqrt(big_l ** 2 + v / (math.pi * shell.density))
    else:
        dense = np.sqrt(np.linspace(win.lower ** 2, win.upper ** 2, 8 * TABLE_SIZE + 1))
        d = np.interp(v, cumulative_measure(dense, shell, measure), dense)
        for _ in range(3):
            rate = intensity_measure(d, shell, measure)
            step = np.where(rate > 0.0, (cumulative_measure(d, shell, measure) - v)
                            / np.where(rate > 0.0, rate, 1.0), 0.0)
            d = np.clip(d - step, win.lower, win.upper)
    return np.clip(d, win.lower, win.upper)


def _shell_draws(cfg: InterferenceConfig) -> list[Optional[_ShellDraw]]:
    draws = []
    for i, shell in enumerate(cfg.shells):
        win = cfg.window(i)
        if win is None:
            draws.append(None)
            continue
        c_lo, c_hi = cumulative_measure(np.array(win), shell, cfg.measure)
        v = np.linspace(c_lo, c_hi, TABLE_SIZE + 1)
        d = _invert_cumulative(v, shell, cfg.measure, win)
        table = np.ascontiguousarray(cfg.kernel(i)(d), dtype=float)
        draws.append(_ShellDraw(float(c_hi - c_lo), table))
    return draws


@numba.njit(cache=True)
def _draw_block(rng, mean_count, table, n):
    m = table.size - 1
    sums = np.zeros(n)
    counts = np.zeros(n, dtype=np.int64)
    for r in range(n):
        k = rng.poisson(mean_count)
        acc = 0.0
        for _ in range(k):
            # satellites are uniform in the cumulative measure over the window
            x = rng.random() * m
            j = int(x)
            if j >= m:
                j = m - 1
            acc += table[j] + (x - j) * (table[j + 1] - table[j])
        sums[r] = acc
        counts[r] = k
    return sums, counts


def _run_block(args):
    seed, block, n, draws = args
    sums = np.zeros(n)
    counts = np.zeros((n, len(draws)), dtype=np.int64)
    for i, draw in enumerate(draws):
        if draw is None:
            continue
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block, i))))
        s, c = _draw_block(rng, draw.mean_count, draw.table, n)
        sums += s
        counts[:, i] = c
    return sums, counts


class Realizations(NamedTuple):
    totals: np.ndarray  # aggregate interference per realization, W
    counts: np.ndarray  # satellites in the overlap window, shape (n, n_shells)


def simulate_realizations(cfg: InterferenceConfig, n: int, seed: int = 0,
                          workers: int = 1) -> Realizations:
    """Draw ``n`` independent point-process realizations.

    Realizations are grouped in fixed blocks of :data:`BLOCK_SIZE`; block
    ``b`` of shell ``i`` draws from a Philox stream keyed by
    ``(seed, b, i)``, so results do not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    draws = _shell_draws(cfg)
    tasks = [(seed, b, min(BLOCK_SIZE, n - b * BLOCK_SIZE), draws)
             for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, tasks))
    else:
        parts = [_run_block(t) for t in tasks]
    return Realizations(np.concatenate([p[0] for p in parts]),
                        np.concatenate([p[1] for p in parts]))


def sample_interference(cfg: InterferenceConfig, seed: int = 0) -> float:
    """Aggregate interference of one realization (the first of stream ``seed``)."""
    return float(simulate_realizations(cfg, 1, seed).totals[0])


def mc_expected_interference(cfg: InterferenceConfig, n_realizations: int, seed: int = 0,
                             workers: int = 1) -> tuple[float, float]:
    """Sample mean and standard error of the aggregate interference."""
    if n_realizations < 100:
        raise ValueError("n_realizations must be >= 100")
    totals = simulate_realizations(cfg, n_realizations, seed, workers).totals
    return float(totals.mean()), float(totals.std(ddof=1) / math.sqrt(n_realizations))
