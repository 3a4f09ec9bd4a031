"""Power-ceiling minimization under the transmission-insisting policy.

The ceiling ``P_u = (N_0 B + E[I]) nu / (g_th G)`` is minimized over the
split of the error budget into decoding (``eps_c``), queueing
(``eps_q``) and threshold (``eps_t``) parts.  For fixed ``eps_t`` the
problem reduces to minimizing the exponent of ``nu`` over ``eps_c +
eps_q = eps_QoS - eps_t``, which is convex; an outer one-dimensional
search then picks ``eps_t``.

All searches run on logit-transformed fractions of the budget, so that
probabilities near 1e-9 and their complements are represented without
cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

from .fading import threshold_from_outage
from .interference import InterferenceConfig, expected_interference
from .orbit_geometry import SnLinkGeometry, sn_path_gain
from .qos_link import LN2, LinkParams, QosBudget, effective_bandwidth, inverse_q, min_power

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

INNER_TOL = 1e-12
INNER_MAX_ITER = 500
OUTER_TOL = 1e-10
OUTER_MAX_ITER = 200
LOGIT_SPAN = 60.0
START_FRACTIONS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


class GoldenResult(NamedTuple):
    x: float
    fx: float
    iterations: int
    converged: bool


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float,
                   max_iter: int) -> GoldenResult:
    """Minimize a unimodal ``f`` on ``[a, b]`` until the bracket is narrower than ``tol``."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        it += 1
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return GoldenResult(x, fx, it, b - a <= tol)


# -- inner problem: split a budget between decoding and queueing errors --------

def subproblem_objective(eps_c: float, eps_q: float, params: LinkParams, max_delay: float) -> float:
    """Exponent ``ln(1 + nu)`` as a function of the decoding and queueing errors."""
    e_b, _ = effective_bandwidth(eps_q, max_delay, params.frame_length, params.queue_density)
    return (e_b * params.packet_size * LN2 / params.bandwidth
            + math.sqrt(1.0 / params.blocklength) * inverse_q(eps_c))


class SubproblemSolution(NamedTuple):
    eps_c: float
    eps_q: float
    nu: float
    objective: float
    iterations: int
    converged: bool


def _split(budget: float, z: float) -> tuple[float, float]:
    return budget * _sigmoid(z), budget * _sigmoid(-z)


def solve_subproblem(budget: float, params: LinkParams, max_delay: float) -> SubproblemSolution:
    """Best ``(eps_c, eps_q)`` with ``eps_c + eps_q = budget`` and the resulting ``nu``.

    Golden-section search on ``z = logit(eps_c / budget)``; the objective
    is convex in ``(eps_c, eps_q)`` so it is unimodal along the budget line.
    """
    if not 0.0 < budget < 1.0:
        raise ValueError(f"budget must lie in (0, 1), got {budget!r}")

    def objective(z: float) -> float:
        return subproblem_objective(*_split(budget, z), params, max_delay)

    res = golden_section(objective, -LOGIT_SPAN, LOGIT_SPAN, INNER_TOL, INNER_MAX_ITER)
    eps_c, eps_q = _split(budget, res.x)
    return SubproblemSolution(eps_c, eps_q, math.expm1(res.fx), res.fx,
                              res.iterations, res.converged)


# -- outer problem: the threshold error ------------------------------------------

class _OuterPoint(NamedTuple):
    eps_t: float
    g_th: float
    inner: SubproblemSolution
    log_ratio: float  # ln(nu / g_th); P_u is proportional to its exponential


def _outer_point(z: float, total: float, params: LinkParams, max_delay: float) -> _OuterPoint:
    eps_t = total * _sigmoid(z)
    inner = solve_subproblem(total * _sigmoid(-z), params, max_delay)
    g_th = threshold_from_outage(eps_t, params.tx_antennas)
    if g_th <= 0.0 or inner.nu <= 0.0:
        return _OuterPoint(eps_t, g_th, inner, math.inf)
    return _OuterPoint(eps_t, g_th, inner, math.log(inner.nu) - math.log(g_th))


def _bracket_from(f: Callable[[float], float], z0: float, lo: float, hi: float,
                  max_steps: int = 60) -> tuple[float, float, int]:
    """Walk downhill from ``z0`` with growing steps until the minimum is bracketed."""
    step = 0.5
    f0 = f(z0)
    f_up, f_dn = f(min(z0 + step, hi)), f(max(z0 - step, lo))
    if f_up >= f0 and f_dn >= f0:
        return max(z0 - step, lo), min(z0 + step, hi), 3
    direction = 1.0 if f_up < f_dn else -1.0
    prev, cur, f_cur = z0, z0, f0
    evals = 3
    for _ in range(max_steps):
        nxt = min(max(cur + direction * step, lo), hi)
        f_nxt = f(nxt)
        evals += 1
        if f_nxt >= f_cur or nxt in (lo, hi):
            a, b = sorted((prev, nxt))
            return a, b, evals
        prev, cur, f_cur = cur, nxt, f_nxt
        step *= 1.0 / _INV_PHI
    a, b = sorted((prev, cur))
    return a, b, evals


class _Split(NamedTuple):
    point: _OuterPoint
    iterations: int
    converged: bool
    probe_ok: bool


@lru_cache(maxsize=256)
def _optimal_split(total: float, max_delay: float, params: LinkParams) -> _Split:
    cache: dict[float, _OuterPoint] = {}

    def point(z: float) -> _OuterPoint:
        if z not in cache:
            cache[z] = _outer_point(z, total, params, max_delay)
        return cache[z]

    def f(z: float) -> float:
        return point(z).log_ratio

    best: Optional[_OuterPoint] = None
    iterations = 0
    converged = True
    for frac in START_FRACTIONS:
        a, b, evals = _bracket_from(f, _logit(frac), -LOGIT_SPAN, LOGIT_SPAN)
        res = golden_section(f, a, b, OUTER_TOL, OUTER_MAX_ITER)
        iterations += evals + res.iterations
        converged &= res.converged
        cand = point(res.x)
        if best is None or cand.log_ratio < best.log_ratio - 1e-12 * abs(best.log_ratio):
            best = cand
        elif abs(cand.log_ratio - best.log_ratio) <= 1e-12 * abs(best.log_ratio) \
                and cand.eps_t < best.eps_t:
            best = cand

    # local optimality probe at eps_t * 1.1 and eps_t / 1.1
    probe_ok = True
    for factor in (1.1, 1.0 / 1.1):
        eps = best.eps_t * factor
        if eps >= total:
            continue
        probe = _outer_point(_logit(eps / total), total, params, max_delay)
        if probe.log_ratio < best.log_ratio:
            probe_ok = False
    return _Split(best, iterations, converged and best.inner.converged, probe_ok)


@dataclass(frozen=True)
class PowerSolution:
    p_u: float
    p_t_at_gth: float
    g_th: float
    nu: float
    eps_c: float
    eps_q: float
    eps_t: float
    e_b: float
    theta: float
    expected_interference: float
    path_gain: float
    iterations: int
    converged: bool
    probe_ok: bool

    @property
    def eps_total(self) -> float:
        return self.eps_c + self.eps_q + self.eps_t


def solve_power_threshold(qos: QosBudget, params: LinkParams,
                          icfg: Optional[InterferenceConfig] = None, *,
                          geom: Optional[SnLinkGeometry] = None,
                          interference: Optional[float] = None) -> PowerSolution:
    """Minimum power ceiling ``P_u`` meeting the QoS budget.

    ``E[I]`` is taken from ``interference`` when given, otherwise computed
    from ``icfg`` (zero when both are ``None``).  The optimal error split
    does not depend on ``E[I]`` or on the path gain and is cached.
    """
    if not 0.0 < qos.total < 1.0:
        raise ValueError("the total error budget must lie in (0, 1)")
    if interference is None:
        interference = expected_interference(icfg) if icfg is not None else 0.0
    if interference < 0.0:
        raise ValueError("interference must be non-negative")
    geom = geom or SnLinkGeometry.from_link(params)
    path_gain = sn_path_gain(geom)

    # only frame, packet, bandwidth, arrival and antenna fields shape the split
    key = replace(params, noise_psd=1e-18, carrier_frequency=12e9, sn_distance=1.0,
                  reference_distance=1.0, sn_pathloss_exponent=2.5)
    split = _optimal_split(qos.total, qos.max_delay, key)
    best = split.point
    e_b, theta = effective_bandwidth(best.inner.eps_q, qos.max_delay, params.frame_length,
                                     params.queue_density)
    noise_plus_i = params.noise_power + interference
    p_u = noise_plus_i * best.inner.nu / (best.g_th * path_gain)
    return PowerSolution(
        p_u=p_u,
        p_t_at_gth=min_power(best.inner.nu, best.g_th, path_gain, noise_plus_i),
        g_th=best.g_th,
        nu=best.inner.nu,
        eps_c=best.inner.eps_c,
        eps_q=best.inner.eps_q,
        eps_t=best.eps_t,
        e_b=e_b,
        theta=theta,
        expected_interference=interference,
        path_gain=path_gain,
        iterations=split.iterations,
        converged=split.converged,
        probe_ok=split.probe_ok,
    )
