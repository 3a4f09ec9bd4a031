"""Scenario files.

A scenario file is UTF-8 ``key = value`` text.  ``#`` starts a comment.
Each ``[shell]`` line opens a block of orbit-shell keys.  Omitted keys
fall back to the canonical scenario.  When no ``[shell]`` block is
given, the three canonical shells are used.  Angles are given as elevation
in degrees (``rx_elevation_deg``) or directly as a direction cosine
(``rx_steer_u``); ``u = sin(elevation)``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .antenna import GainPattern, array_factor_pattern, load_pattern, piecewise_pattern
from .interference import InterferenceConfig
from .orbit_geometry import MEASURES, TABLE_SHELLS, OrbitShell
from .qos_link import LinkParams, QosBudget, dbm_to_watts

PATTERN_MODELS = ("piecewise", "array_factor", "file")


class ConfigError(ValueError):
    """Invalid scenario; the message names the offending key."""


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


# key -> (parser, LinkParams/QosBudget/Scenario attribute)
_LINK_KEYS = {
    "frame_length_s": (float, "frame_length"),
    "bandwidth_hz": (float, "bandwidth"),
    "packet_size_bits": (float, "packet_size"),
    "noise_psd_dbm_hz": (float, None),
    "packet_rate_pps": (float, "packet_rate"),
    "tx_antennas": (_parse_int, "tx_antennas"),
    "carrier_frequency_hz": (float, "carrier_frequency"),
    "sn_distance_m": (float, "sn_distance"),
    "reference_distance_m": (float, "reference_distance"),
    "sn_pathloss_exponent": (float, "sn_pathloss_exponent"),
}
_QOS_KEYS = {
    "eps_qos": (float, "total"),
    "max_delay_s": (float, "max_delay"),
}
_SCENARIO_KEYS = {
    "rx_elevation_deg": float,
    "rx_steer_u": float,
    "rx_halfwidth_u": float,
    "sat_halfwidth_u": float,
    "pattern_model": str,
    "mainlobe_gain": float,
    "sidelobe_gain": float,
    "pattern_samples": _parse_int,
    "rx_elements": _parse_int,
    "sat_elements": _parse_int,
    "rx_pattern_file": str,
    "sat_pattern_file": str,
    "gating": _parse_bool,
    "quadrature_points": _parse_int,
    "u_floor": float,
    "duty_cycle": float,
    "measure": str,
    "seed": _parse_int,
    "mc_realizations": _parse_int,
}
_SHELL_KEYS = {
    "altitude_m": (float, "altitude"),
    "satellites": (float, "satellites"),
    "tx_power_w": (float, "tx_power"),
    "atmosphere_ref_m": (float, "atmosphere_ref"),
    "alpha": (float, "alpha"),
    "alpha0": (float, "alpha0"),
    "earth_radius_m": (float, "earth_radius"),
    "pathloss_unit_km": (_parse_bool, "pathloss_unit_km"),
}


@dataclass(frozen=True)
class Scenario:
    """A fully validated calculation scenario."""

    params: LinkParams = field(default_factory=LinkParams)
    qos: QosBudget = field(default_factory=QosBudget)
    shells: tuple = TABLE_SHELLS
    rx_steer_u: float = 0.3
    rx_halfwidth_u: float = 0.1
    sat_halfwidth_u: float = 0.28
    pattern_model: str = "piecewise"
    mainlobe_gain: float = 1.0
    sidelobe_gain: float = 0.0
    pattern_samples: int = 2001
    rx_elements: int = 20
    sat_elements: int = 8
    rx_pattern_file: Optional[str] = None
    sat_pattern_file: Optional[str] = None
    gating: bool = True
    quadrature_points: int = 512
    u_floor: float = 0.01
    duty_cycle: float = 1.0
    measure: str = "area"
    seed: int = 0
    mc_realizations: int = 0

    def __post_init__(self):
        checks = [
            ("rx_steer_u", -1.0 <= self.rx_steer_u <= 1.0, "must lie in [-1, 1]"),
            ("rx_halfwidth_u", 0.0 < self.rx_halfwidth_u <= 1.0, "must lie in (0, 1]"),
            ("sat_halfwidth_u", 0.0 < self.sat_halfwidth_u <= 1.0, "must lie in (0, 1]"),
            ("pattern_model", self.pattern_model in PATTERN_MODELS, f"must be one of {PATTERN_MODELS}"),
            ("mainlobe_gain", self.mainlobe_gain > self.sidelobe_gain >= 0.0,
             "need mainlobe_gain > sidelobe_gain >= 0"),
            ("pattern_samples", self.pattern_samples >= 64, "must be >= 64"),
            ("rx_elements", self.rx_elements >= 2, "must be >= 2"),
            ("sat_elements", self.sat_elements >= 2, "must be >= 2"),
            ("quadrature_points", self.quadrature_points >= 64, "must be >= 64"),
            ("u_floor", 0.0 < self.u_floor < 1.0, "must lie in (0, 1)"),
            ("duty_cycle", 0.0 <= self.duty_cycle <= 1.0, "must lie in [0, 1]"),
            ("measure", self.measure in MEASURES, f"must be one of {MEASURES}"),
            ("seed", self.seed >= 0, "must be non-negative"),
            ("mc_realizations", self.mc_realizations == 0 or self.mc_realizations >= 100,
             "must be 0 (off) or >= 100"),
            ("shells", len(self.shells) >= 1, "at least one shell is required"),
        ]
        if self.pattern_model == "array_factor":
            checks += [
                ("rx_elements", 1.0 / (self.rx_elements * self.rx_halfwidth_u) <= 1.0,
                 "element spacing 1/(rx_elements*rx_halfwidth_u) exceeds one wavelength"),
                ("sat_elements", 1.0 / (self.sat_elements * self.sat_halfwidth_u) <= 1.0,
                 "element spacing 1/(sat_elements*sat_halfwidth_u) exceeds one wavelength"),
            ]
        if self.pattern_model == "file":
            checks += [
                ("rx_pattern_file", self.rx_pattern_file is not None, "required for pattern_model = file"),
                ("sat_pattern_file", self.sat_pattern_file is not None, "required for pattern_model = file"),
            ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigError(f"{key}: {message}")

    def patterns(self, steer_u: Optional[float] = None) -> tuple[GainPattern, GainPattern]:
        """Satellite (tx) and receiving-station (rx) patterns at ``steer_u``."""
        steer = self.rx_steer_u if steer_u is None else steer_u
        if self.pattern_model == "piecewise":
            tx = piecewise_pattern(self.mainlobe_gain, self.sidelobe_gain, 0.0,
                                   self.sat_halfwidth_u, self.pattern_samples)
            rx = piecewise_pattern(self.mainlobe_gain, self.sidelobe_gain, steer,
                                   self.rx_halfwidth_u, self.pattern_samples)
        elif self.pattern_model == "array_factor":
            tx = array_factor_pattern(self.sat_elements,
                                      1.0 / (self.sat_elements * self.sat_halfwidth_u),
                                      0.0, self.pattern_samples)
            rx = array_factor_pattern(self.rx_elements,
                                      1.0 / (self.rx_elements * self.rx_halfwidth_u),
                                      steer, self.pattern_samples)
        else:
            tx = load_pattern(self.sat_pattern_file, 0.0, self.sat_halfwidth_u)
            rx_file = load_pattern(self.rx_pattern_file, 0.0, self.rx_halfwidth_u)
            # the rx file holds the unsteered pattern; steering shifts it in u
            shifted = rx_file.u + steer
            keep = (shifted >= -1.0) & (shifted <= 1.0)
            if np.count_nonzero(keep) < 2:
                raise ConfigError("rx_pattern_file: fewer than two samples remain after steering")
            rx = GainPattern(shifted[keep], rx_file.gain[keep], steer, self.rx_halfwidth_u)
        return tx, rx

    def interference_config(self, steer_u: Optional[float] = None) -> InterferenceConfig:
        tx, rx = self.patterns(steer_u)
        return InterferenceConfig(self.shells, tx, rx, quadrature_points=self.quadrature_points,
                                  gating=self.gating, u_floor=self.u_floor,
                                  duty_cycle=self.duty_cycle, measure=self.measure)

    @staticmethod
    def _canon(value) -> str:
        # equal scenarios must hash equally, so 60000 and 60000.0 render alike
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return repr(float(value))
        return repr(value)

    def canonical_text(self) -> str:
        """Stable text rendering of every resolved setting (hashed into output metadata)."""
        lines = []
        for f in fields(LinkParams):
            lines.append(f"params.{f.name} = {self._canon(getattr(self.params, f.name))}")
        for f in fields(QosBudget):
            lines.append(f"qos.{f.name} = {self._canon(getattr(self.qos, f.name))}")
        for i, shell in enumerate(self.shells):
            for f in fields(OrbitShell):
                lines.append(f"shell{i}.{f.name} = {self._canon(getattr(shell, f.name))}")
        for f in fields(self):
            if f.name not in ("params", "qos", "shells"):
                lines.append(f"{f.name} = {self._canon(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def parse_config(text: str, base_dir: Union[str, Path, None] = None) -> Scenario:
    """Build a :class:`Scenario` from config text."""
    top: dict[str, tuple[int, str]] = {}
    shells: list[dict[str, tuple[int, str]]] = []
    current = top
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line.lower() != "[shell]":
                raise ConfigError(f"line {lineno}: unknown section {line!r}")
            current = {}
            shells.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in current:
            raise ConfigError(f"line {lineno}: {key}: duplicate key")
        current[key] = (lineno, value)

    def parsed(section, key, parser):
        lineno, value = section[key]
        try:
            return parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None

    link_kwargs, qos_kwargs, scen_kwargs = {}, {}, {}
    for key in top:
        if key in _LINK_KEYS:
            parser, attr = _LINK_KEYS[key]
            value = parsed(top, key, parser)
            if attr is None:
                link_kwargs["noise_psd"] = dbm_to_watts(value)
            else:
                link_kwargs[attr] = value
        elif key in _QOS_KEYS:
            parser, attr = _QOS_KEYS[key]
            qos_kwargs[attr] = parsed(top, key, parser)
        elif key in _SCENARIO_KEYS:
            scen_kwargs[key] = parsed(top, key, _SCENARIO_KEYS[key])
        else:
            raise ConfigError(f"line {top[key][0]}: {key}: unknown key")

    if "rx_elevation_deg" in scen_kwargs:
        if "rx_steer_u" in scen_kwargs:
            raise ConfigError("rx_elevation_deg: give either rx_elevation_deg or rx_steer_u, not both")
        elevation = scen_kwargs.pop("rx_elevation_deg")
        if not 0.0 < elevation <= 90.0:
            raise ConfigError("rx_elevation_deg: must lie in (0, 90]")
        scen_kwargs["rx_steer_u"] = math.sin(math.radians(elevation))
    for key in ("rx_pattern_file", "sat_pattern_file"):
        if key in scen_kwargs and base_dir is not None:
            path = Path(scen_kwargs[key])
            scen_kwargs[key] = str(path if path.is_absolute() else Path(base_dir) / path)

    link = _build(LinkParams, link_kwargs, "link parameters")
    qos = _build(QosBudget, qos_kwargs, "eps_qos/max_delay_s")
    shell_objs = []
    for index, block in enumerate(shells):
        kwargs = {}
        for key in block:
            if key not in _SHELL_KEYS:
                raise ConfigError(f"line {block[key][0]}: {key}: unknown shell key")
            parser, attr = _SHELL_KEYS[key]
            kwargs[attr] = parsed(block, key, parser)
        for required in ("altitude", "satellites"):
            if required not in kwargs:
                raise ConfigError(f"[shell] #{index + 1}: missing {required}"
                                  f"{'_m' if required == 'altitude' else ''}")
        shell_objs.append(_build(OrbitShell, kwargs, f"[shell] #{index + 1}"))
    if shell_objs:
        scen_kwargs["shells"] = tuple(shell_objs)
    return Scenario(params=link, qos=qos, **scen_kwargs)


_QOS_KEY_NAMES = {"total": "eps_qos", "max_delay": "max_delay_s"}


def _build(cls, kwargs, where):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        message = str(exc)
        if cls is QosBudget:
            for attr, key in _QOS_KEY_NAMES.items():
                if message.startswith(attr):
                    message = key + message[len(attr):]
        raise ConfigError(f"{where}: {message}") from None


def load_config(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file.  ``OSError`` propagates for I/O failures."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, base_dir=path.parent)
