"""Antenna gain patterns over the direction cosine and their overlap in distance.

Patterns are one-dimensional: azimuth is collapsed, so a pattern is a
table of linear power gain against ``u`` in ``[-1, 1]``.  Between samples
gain is linearly interpolated.  A satellite at altitude ``L`` seen at
direction cosine ``u`` sits at distance ``d = L / u``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

_EDGE_TOL = 1e-12
_EDGE_GAP = 1e-9


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GainPattern:
    """Tabulated power gain versus direction cosine.

    ``center`` and ``halfwidth`` describe the mainlobe ``|u - center| <=
    halfwidth`` used for overlap gating and integration limits.
    """

    u: np.ndarray
    gain: np.ndarray
    center: float
    halfwidth: float

    def __post_init__(self):
        u = _frozen(self.u)
        gain = _frozen(self.gain)
        if u.ndim != 1 or u.shape != gain.shape or u.size < 2:
            raise ValueError("u and gain must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(u) <= 0.0):
            raise ValueError("u samples must be strictly increasing")
        if u[0] < -1.0 - _EDGE_TOL or u[-1] > 1.0 + _EDGE_TOL:
            raise ValueError("u samples must lie in [-1, 1]")
        if np.any(gain < 0.0) or not np.all(np.isfinite(gain)):
            raise ValueError("gains must be finite and non-negative")
        if self.halfwidth < 0.0:
            raise ValueError("halfwidth must be non-negative")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "gain", gain)

    def at(self, u):
        return np.interp(u, self.u, self.gain, left=0.0, right=0.0)

    def in_mainlobe(self, u):
        """Closed-mainlobe membership test."""
        return np.abs(np.asarray(u, dtype=float) - self.center) <= self.halfwidth + _EDGE_TOL


def array_factor_power(u, n_elements: int, spacing: float, steer_u: float):
    """Normalized power pattern ``|AF(u)|^2 / N^2`` of a uniform linear array."""
    x = np.pi * spacing * (np.asarray(u, dtype=float) - steer_u)
    den = n_elements * np.sin(x)
    num = np.sin(n_elements * x)
    small = np.abs(den) < 1e-12
    ratio = np.where(small, 1.0, num / np.where(small, 1.0, den))
    return ratio * ratio


def array_factor_pattern(n_elements: int, spacing_over_wavelength: float, steer_u: float,
                         n_samples: int = 2001) -> GainPattern:
    """Uniform-array pattern sampled uniformly in ``u``.

    The mainlobe half-width is the first-null offset ``1 / (N * spacing)``.
    """
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2")
    if not 0.0 < spacing_over_wavelength <= 1.0:
        raise ValueError("spacing_over_wavelength must lie in (0, 1]")
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    u = np.linspace(-1.0, 1.0, n_samples)
    gain = array_factor_power(u, n_elements, spacing_over_wavelength, steer_u)
    return GainPattern(u, gain, steer_u, 1.0 / (n_elements * spacing_over_wavelength))


def piecewise_pattern(mainlobe_gain: float, sidelobe_gain: float, center: float,
                      halfwidth: float, n_samples: int = 2001) -> GainPattern:
    """Flat mainlobe over ``|u - center| <= halfwidth``, flat sidelobe elsewhere.

    Samples are inserted at each mainlobe edge and ``1e-9`` outside it so
    linear interpolation reproduces the step.
    """
    if not mainlobe_gain > sidelobe_gain >= 0.0:
        raise ValueError("need mainlobe_gain > sidelobe_gain >= 0")
    if halfwidth <= 0.0:
        raise ValueError("halfwidth must be positive")
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    grid = np.linspace(-1.0, 1.0, n_samples)
    extra = []
    for edge, outward in ((center - halfwidth, -1.0), (center + halfwidth, 1.0)):
        outside = edge + outward * _EDGE_GAP
        if -1.0 < edge < 1.0 and -1.0 < outside < 1.0:
            extra += [edge, outside]
    if extra:
        extra_arr = np.array(extra)
        gap = np.min(np.abs(grid[:, None] - extra_arr[None, :]), axis=1)
        grid = grid[gap > 2 * _EDGE_GAP]
    u = np.unique(np.concatenate([grid, extra]))
    inside = np.abs(u - center) <= halfwidth + _EDGE_TOL
    gain = np.where(inside, mainlobe_gain, sidelobe_gain)
    return GainPattern(u, gain, center, halfwidth)


def load_pattern(path: Union[str, Path], center: float, halfwidth: float) -> GainPattern:
    """Read a two-column ``u gain`` text file; ``#`` starts a comment."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two samples")
    u, gain = zip(*rows)
    return GainPattern(np.array(u), np.array(gain), center, halfwidth)


@dataclass(frozen=True, eq=False)
class OverlapGain:
    """Product gain ``G_tx * G_rx`` tabulated against distance for one shell."""

    d: np.ndarray
    gain: np.ndarray
    u: np.ndarray
    orbit_index: int = 0

    def __post_init__(self):
        for name in ("d", "gain", "u"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(np.diff(self.d) <= 0.0):
            raise ValueError("distances must be strictly increasing")

    def at(self, d):
        return np.interp(d, self.d, self.gain, left=0.0, right=0.0)


def _merge_close(u: np.ndarray, edges) -> np.ndarray:
    """Drop samples within 1e-12 of a neighbor, keeping exact mainlobe edges."""
    is_edge = np.isin(u, np.asarray(edges, dtype=float))
    keep = np.ones(u.size, dtype=bool)
    for i in np.flatnonzero(np.diff(u) <= _EDGE_TOL):
        if not keep[i]:
            continue
        # an edge computed in floating point can sit an ulp from the other grid's sample
        drop = i if is_edge[i + 1] and not is_edge[i] else i + 1
        keep[drop] = False
    return u[keep]


def overlap_gain(tx: GainPattern, rx: GainPattern, altitude: float, gating: bool = True,
                 orbit_index: int = 0) -> OverlapGain:
    """Map the product of two patterns onto the distance axis of one shell.

    Both patterns are resampled onto the union of their ``u`` samples
    (samples closer than 1e-12 are merged).
    With ``gating`` the product is zeroed wherever either mainlobe
    excludes ``u``.  Samples with ``u <= 0`` have no finite distance and
    are dropped.
    """
    if not altitude > 0.0:
        raise ValueError("altitude must be positive")
    u = _merge_close(np.union1d(tx.u, rx.u), (tx.center - tx.halfwidth, tx.center + tx.halfwidth,
                                               rx.center - rx.halfwidth, rx.center + rx.halfwidth))
    product = tx.at(u) * rx.at(u)
    if gating:
        product = np.where(tx.in_mainlobe(u) & rx.in_mainlobe(u), product, 0.0)
    keep = u > 0.0
    u, product = u[keep], product[keep]
    if u.size < 2:
        raise ValueError("fewer than two samples with positive direction cosine")
    d = altitude / u
    order = np.argsort(d)
    return OverlapGain(d[order], product[order], u[order], orbit_index)
