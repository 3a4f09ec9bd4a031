"""Short-packet link calculus for the suborbital downlink.

Normal-approximation coding rate, channel dispersion, the effective
bandwidth of the packet queue and the SINR the link must deliver to
serve that bandwidth.  Rates are carried in packets per frame; effective
bandwidth in packets per second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

SPEED_OF_LIGHT = 299_792_458.0
LN2 = math.log(2.0)
MIN_BLOCKLENGTH = 100.0

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def _check_probability(name: str, p: float) -> None:
    if not (0.0 < p < 1.0):
        raise ValueError(f"{name} must lie in (0, 1), got {p!r}")


@dataclass(frozen=True)
class LinkParams:
    """Frame, packet, bandwidth and antenna parameters of the SN downlink.

    Defaults reproduce the canonical scenario (0.1 ms frames, 10 MHz,
    160-bit packets, 10^4 packets/s, 12 GHz carrier, -150 dBm/Hz noise).
    ``noise_psd`` is stored in W/Hz; use :meth:`with_noise_dbm` to build
    from dBm/Hz.
    """

    frame_length: float = 1e-4
    bandwidth: float = 1e7
    packet_size: float = 160.0
    noise_psd: float = 1e-18
    packet_rate: float = 1e4
    tx_antennas: int = 4
    carrier_frequency: float = 12e9
    sn_distance: float = 100e3
    reference_distance: float = 1.0
    sn_pathloss_exponent: float = 2.5

    def __post_init__(self):
        for name in ("frame_length", "bandwidth", "packet_size", "noise_psd",
                     "packet_rate", "carrier_frequency", "reference_distance",
                     "sn_pathloss_exponent"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if int(self.tx_antennas) != self.tx_antennas or not 1 <= self.tx_antennas <= 64:
            raise ValueError(f"tx_antennas must be an integer in [1, 64], got {self.tx_antennas!r}")
        if not self.sn_distance >= self.reference_distance:
            raise ValueError("sn_distance must be >= reference_distance")
        if self.blocklength < MIN_BLOCKLENGTH:
            raise ValueError(
                f"blocklength T_f*B = {self.blocklength:g} is below {MIN_BLOCKLENGTH:g}; "
                "the normal approximation is not valid there")

    @classmethod
    def with_noise_dbm(cls, noise_psd_dbm_hz: float = -150.0, **kwargs) -> "LinkParams":
        return cls(noise_psd=dbm_to_watts(noise_psd_dbm_hz), **kwargs)

    @property
    def blocklength(self) -> float:
        return self.frame_length * self.bandwidth

    @property
    def queue_density(self) -> float:
        """Packets generated per frame, N_u * T_f."""
        return self.packet_rate * self.frame_length

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def noise_power(self) -> float:
        return self.noise_psd * self.bandwidth


@dataclass(frozen=True)
class QosBudget:
    """Error-probability budget and delay bound.

    Only ``total`` and ``max_delay`` are inputs to the solver; the split
    fields are optional and validated when present.
    """

    total: float = 1e-9
    max_delay: float = 1e-4
    eps_c: Optional[float] = None
    eps_q: Optional[float] = None
    eps_t: Optional[float] = None
    eps_u: Optional[float] = None

    def __post_init__(self):
        _check_probability("total", self.total)
        if not self.max_delay > 0.0:
            raise ValueError(f"max_delay must be positive, got {self.max_delay!r}")
        for name in ("eps_c", "eps_q", "eps_t", "eps_u"):
            value = getattr(self, name)
            if value is not None:
                _check_probability(name, value)
        parts = [p for p in (self.eps_c, self.eps_q, self.eps_t) if p is not None]
        if sum(parts) > self.total:
            raise ValueError("eps_c + eps_q + eps_t exceeds the total budget")


def q_function(x: float) -> float:
    """Upper tail of the standard normal."""
    return 0.5 * math.erfc(x / _SQRT2)


# Acklam's rational approximation of the normal quantile, |rel err| < 1.2e-9.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _acklam_lower(p: float) -> float:
    """Approximate Phi^{-1}(p) for p <= 0.5."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def inverse_q(p: float) -> float:
    """Return x with Q(x) = p.

    Rational first guess refined by two Newton steps on ``Q(x) - p``.
    """
    _check_probability("p", p)
    if p > 0.5:
        return -inverse_q(1.0 - p)
    if p == 0.5:
        return 0.0
    x = -_acklam_lower(p)
    for _ in range(2):
        density = math.exp(-0.5 * x * x) / _SQRT2PI
        x += (q_function(x) - p) / density
    return x


def channel_dispersion(sinr: float) -> float:
    if sinr < 0.0:
        raise ValueError(f"SINR must be non-negative, got {sinr!r}")
    return -math.expm1(-2.0 * math.log1p(sinr))


def finite_blocklength_rate(sinr: float, params: LinkParams, eps_c: float,
                            general: bool = False) -> float:
    """Achievable packets per frame at blocklength ``T_f * B``.

    With ``general=False`` the dispersion is taken as 1 (high-SINR form);
    ``general=True`` uses ``1 - (1 + sinr)**-2``.  Negative values are
    returned unclamped.
    """
    if not sinr > 0.0:
        raise ValueError(f"SINR must be positive, got {sinr!r}")
    _check_probability("eps_c", eps_c)
    n = params.blocklength
    dispersion = channel_dispersion(sinr) if general else 1.0
    scale = n / (params.packet_size * LN2)
    return scale * (math.log1p(sinr) - math.sqrt(dispersion / n) * inverse_q(eps_c))


def omega(eps_q: float, frame_length: float, max_delay: float) -> float:
    _check_probability("eps_q", eps_q)
    return -2.0 * frame_length * math.log(eps_q) / max_delay


def effective_bandwidth(eps_u: float, max_delay: float, frame_length: float,
                        queue_density: float) -> tuple[float, float]:
    """Effective bandwidth (packets/s) and the queue-tail decay rate theta.

    Returns ``(e_b, theta)`` with ``e_b * max_delay * theta == ln(1/eps_u)``.
    """
    _check_probability("eps_u", eps_u)
    if not queue_density > 0.0:
        raise ValueError(f"queue_density must be positive, got {queue_density!r}")
    if not (max_delay > 0.0 and frame_length > 0.0):
        raise ValueError("max_delay and frame_length must be positive")
    log_inv = -math.log(eps_u)
    theta = math.log1p(frame_length * log_inv / (queue_density * max_delay))
    return log_inv / (max_delay * theta), theta


def required_sinr_nu(e_b: float, params: LinkParams, eps_c: float) -> float:
    """SINR at which the high-SINR rate equals ``e_b * T_f`` packets/frame."""
    if not e_b > 0.0:
        raise ValueError(f"effective bandwidth must be positive, got {e_b!r}")
    _check_probability("eps_c", eps_c)
    exponent = (e_b * params.packet_size * LN2 / params.bandwidth
                + math.sqrt(1.0 / params.blocklength) * inverse_q(eps_c))
    return math.expm1(exponent)


def min_power(nu: float, g: float, path_gain: float, noise_plus_interference: float) -> float:
    """Transmit power reaching SINR ``nu`` at fading gain ``g``."""
    for name, value in (("nu", nu), ("g", g), ("path_gain", path_gain),
                        ("noise_plus_interference", noise_plus_interference)):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    return noise_plus_interference * nu / (g * path_gain)


def rate_threshold(g_th: float, path_gain: float, p_u: float, params: LinkParams,
                   eps_c: float, interference: float = 0.0) -> float:
    """Packets per frame delivered at the power ceiling when ``g == g_th``."""
    if g_th < 0.0 or not path_gain > 0.0 or not p_u > 0.0 or interference < 0.0:
        raise ValueError("g_th, interference must be >= 0; path_gain, p_u > 0")
    sinr = g_th * path_gain * p_u / (params.noise_power + interference)
    if sinr == 0.0:
        _check_probability("eps_c", eps_c)
        n = params.blocklength
        return -n / (params.packet_size * LN2) * math.sqrt(1.0 / n) * inverse_q(eps_c)
    return finite_blocklength_rate(sinr, params, eps_c)
