"""Orbital shells, path loss and point-process measures in the distance domain.

Distances are in meters throughout.  The interferer path-loss law is
evaluated with lengths expressed in kilometers unless a shell sets
``pathloss_unit_km=False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

EARTH_RADIUS = 6_371e3


def satellite_density(n_satellites: float, altitude: float,
                      earth_radius: float = EARTH_RADIUS) -> float:
    """Satellites per square meter, uniform over the orbital sphere."""
    if not n_satellites >= 1:
        raise ValueError(f"n_satellites must be >= 1, got {n_satellites!r}")
    return n_satellites / (4.0 * math.pi * (earth_radius + altitude) ** 2)


@dataclass(frozen=True)
class OrbitShell:
    """One interfering orbital plane.

    ``tx_power`` is the mean satellite launch power in W; ``atmosphere_ref``
    is the atmosphere boundary height used by the segmented path loss.
    """

    altitude: float
    satellites: float
    tx_power: float = 10.0
    atmosphere_ref: float = 100e3
    alpha: float = 2.5
    alpha0: float = 2.0
    earth_radius: float = EARTH_RADIUS
    pathloss_unit_km: bool = True

    def __post_init__(self):
        if not self.atmosphere_ref > 0.0:
            raise ValueError("atmosphere_ref must be positive")
        if not self.altitude > self.atmosphere_ref:
            raise ValueError(
                f"altitude ({self.altitude:g} m) must exceed atmosphere_ref "
                f"({self.atmosphere_ref:g} m)")
        if not self.satellites >= 1:
            raise ValueError("satellites must be >= 1")
        if not self.tx_power >= 0.0:
            raise ValueError("tx_power must be non-negative")
        if not (self.alpha > 0.0 and self.alpha0 > 0.0 and self.earth_radius > 0.0):
            raise ValueError("path-loss exponents and earth_radius must be positive")

    @property
    def density(self) -> float:
        return satellite_density(self.satellites, self.altitude, self.earth_radius)


#: The three shells of the canonical scenario (LEO, MEO and a high shell).
TABLE_SHELLS = (
    OrbitShell(altitude=350e3, satellites=60000),
    OrbitShell(altitude=1000e3, satellites=8000),
    OrbitShell(altitude=4000e3, satellites=600),
)


def interferer_path_loss(d, shell: OrbitShell):
    """Segmented atmosphere/space path loss of a satellite at distance ``d``.

    ``(L_r d / L)**-alpha + ((d**2 - L_r d) / L)**-alpha0``; works on
    scalars and arrays.
    """
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= shell.atmosphere_ref):
        raise ValueError("distance must exceed the atmosphere reference height")
    unit = 1e3 if shell.pathloss_unit_km else 1.0
    x = d_arr / unit
    lr = shell.atmosphere_ref / unit
    big_l = shell.altitude / unit
    out = (lr * x / big_l) ** (-shell.alpha) + ((x * x - lr * x) / big_l) ** (-shell.alpha0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SnLinkGeometry:
    sn_distance: float
    reference_distance: float
    wavelength: float
    exponent: float

    def __post_init__(self):
        if not self.reference_distance > 0.0 or not self.wavelength > 0.0:
            raise ValueError("reference_distance and wavelength must be positive")
        if not self.sn_distance >= self.reference_distance:
            raise ValueError("sn_distance must be >= reference_distance")

    @classmethod
    def from_link(cls, params) -> "SnLinkGeometry":
        return cls(params.sn_distance, params.reference_distance,
                   params.wavelength, params.sn_pathloss_exponent)


def sn_path_loss_db(geom: SnLinkGeometry) -> float:
    return (-20.0 * math.log10(geom.wavelength / (4.0 * math.pi * geom.reference_distance))
            + 10.0 * geom.exponent * math.log10(geom.sn_distance / geom.reference_distance))


def sn_path_gain(geom: SnLinkGeometry) -> float:
    """Linear path gain G of the SN link (free space to d_0, then exponent)."""
    return 10.0 ** (-sn_path_loss_db(geom) / 10.0)


MEASURES = ("area", "literal")


def _check_measure(measure: str) -> None:
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}")


def _check_above_shell(d_arr: np.ndarray, shell: OrbitShell) -> None:
    if np.any(d_arr < shell.altitude):
        raise ValueError("distance must be >= the shell altitude")


def intensity_measure(d, shell: OrbitShell, measure: str = "area"):
    """Expected satellites per unit distance at distance ``d``.

    ``"area"`` is the derivative of :func:`cumulative_measure` under the
    planar disc model, ``2 pi lambda_d d``.  ``"literal"`` keeps the
    kernel ``2 pi lambda_d sqrt(d^2 - L^2)`` without the ``d / r``
    Jacobian of the radius-to-distance change of variables.
    """
    _check_measure(measure)
    d_arr = np.asarray(d, dtype=float)
    _check_above_shell(d_arr, shell)
    if measure == "area":
        out = 2.0 * math.pi * shell.density * d_arr
    else:
        out = 2.0 * math.pi * shell.density * np.sqrt(d_arr * d_arr - shell.altitude ** 2)
    return float(out) if out.ndim == 0 else out


def cumulative_measure(d, shell: OrbitShell, measure: str = "area"):
    """Expected satellite count with distance in ``[L, d]``.

    For ``"area"`` this is the disc count ``lambda_d pi (d^2 - L^2)``.
    """
    _check_measure(measure)
    d_arr = np.asarray(d, dtype=float)
    _check_above_shell(d_arr, shell)
    big_l = shell.altitude
    if measure == "area":
        out = shell.density * math.pi * (d_arr * d_arr - big_l ** 2)
    else:
        r = np.sqrt(d_arr * d_arr - big_l ** 2)
        out = math.pi * shell.density * (d_arr * r - big_l ** 2 * np.log((d_arr + r) / big_l))
    return float(out) if out.ndim == 0 else out


class DistanceWindow(NamedTuple):
    lower: float
    upper: float


def integration_limits(rx_steer_u: float, rx_halfwidth_u: float, sat_halfwidth_u: float,
                       altitude: float, sat_center_u: float = 0.0,
                       u_floor: float = 0.01) -> Optional[DistanceWindow]:
    """Distance window where the receiver and satellite mainlobes overlap.

    The direction-cosine intersection is clipped to ``[u_floor, 1]`` and
    mapped through ``d = L / u``.  Returns ``None`` when the mainlobes do
    not overlap.
    """
    if rx_halfwidth_u < 0.0 or sat_halfwidth_u < 0.0:
        raise ValueError("half-widths must be non-negative")
    if not 0.0 < u_floor < 1.0:
        raise ValueError("u_floor must lie in (0, 1)")
    lo = max(rx_steer_u - rx_halfwidth_u, sat_center_u - sat_halfwidth_u, u_floor)
    hi = min(rx_steer_u + rx_halfwidth_u, sat_center_u + sat_halfwidth_u, 1.0)
    if not hi > lo:
        return None
    return DistanceWindow(altitude / hi, altitude / lo)


def slant_range(elevation_rad: float, altitude: float,
                earth_radius: float = EARTH_RADIUS) -> float:
    """Spherical-Earth slant range to a shell at the given elevation.

    Reference only; the overlap model uses the flat mapping ``d = L / u``.
    """
    r = earth_radius + altitude
    s = earth_radius * math.sin(elevation_rad)
    return math.sqrt(s * s + r * r - earth_radius ** 2) - s
