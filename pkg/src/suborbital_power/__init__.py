"""Transmit-power planning for suborbital downlinks under satellite interference."""

__version__ = "0.1.0"

from .antenna import GainPattern, array_factor_pattern, overlap_gain, piecewise_pattern
from .config import ConfigError, Scenario, load_config, parse_config
from .fading import fading_pdf, outage_prob, threshold_from_outage
from .interference import (
    InterferenceConfig,
    expected_interference,
    mc_expected_interference,
    sample_interference,
    simulate_realizations,
)
from .orbit_geometry import TABLE_SHELLS, OrbitShell, integration_limits, interferer_path_loss
from .qos_link import (
    LinkParams,
    QosBudget,
    effective_bandwidth,
    finite_blocklength_rate,
    inverse_q,
    q_function,
)
from .solver import PowerSolution, solve_power_threshold, solve_subproblem

__all__ = [
    "__version__",
    "ConfigError", "GainPattern", "InterferenceConfig", "LinkParams", "OrbitShell",
    "PowerSolution", "QosBudget", "Scenario", "TABLE_SHELLS",
    "array_factor_pattern", "effective_bandwidth", "expected_interference", "fading_pdf",
    "finite_blocklength_rate", "integration_limits", "interferer_path_loss", "inverse_q",
    "load_config", "mc_expected_interference", "outage_prob", "overlap_gain", "parse_config",
    "piecewise_pattern", "q_function", "sample_interference", "simulate_realizations",
    "solve_power_threshold", "solve_subproblem", "threshold_from_outage",
]
