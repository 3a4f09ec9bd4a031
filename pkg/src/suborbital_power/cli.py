"""Command-line sweeps over receiver steering and SN distance.

Exit codes: 0 success, 1 at least one row did not converge, 2 invalid
configuration or arguments, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, Scenario, load_config
from .interference import GENERATOR_NAME, mc_expected_interference, shell_interference
from .orbit_geometry import interferer_path_loss
from .qos_link import watts_to_dbm
from .solver import solve_power_threshold

EXIT_OK, EXIT_NONCONVERGED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SWEEP_COLUMNS = ("u", "elevation_deg", "d_k", "E_I_W", "P_u_W", "P_u_dBm", "eps_c", "eps_q",
                 "eps_t", "g_th", "nu", "converged")
MC_COLUMNS = ("E_I_mc_W", "E_I_mc_stderr_W")
OVERLAP_COLUMNS = ("orbit_index", "altitude_m", "d_m", "u", "f_pl", "gain_product", "kernel")


@dataclass(frozen=True)
class SweepSpec:
    u_grid: Sequence[float]
    dk_grid: Sequence[float]
    scenario: Scenario
    mc_realizations: int = 0
    seed: int = 0

    def __post_init__(self):
        for name in ("u_grid", "dk_grid"):
            grid = tuple(float(x) for x in getattr(self, name))
            if not grid:
                raise ValueError(f"{name} must not be empty")
            if any(b < a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be sorted ascending")
            object.__setattr__(self, name, grid)
        if not all(-1.0 <= u <= 1.0 for u in self.u_grid):
            raise ValueError("u_grid values must lie in [-1, 1]")
        if self.mc_realizations and self.mc_realizations < 100:
            raise ValueError("mc_realizations must be 0 or >= 100")


def elevation_deg(u: float) -> float:
    return math.degrees(math.asin(max(-1.0, min(1.0, u))))


def _interference_at(args):
    scenario, u, mc_n, seed = args
    cfg = scenario.interference_config(u)
    e_i = math.fsum(shell_interference(cfg))
    if mc_n:
        return e_i, mc_expected_interference(cfg, mc_n, seed)
    return e_i, None


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """One row per ``(u, d_k)`` pair, ``u`` outermost, in grid order."""
    tasks = [(spec.scenario, u, spec.mc_realizations, spec.seed) for u in spec.u_grid]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_u = list(pool.map(_interference_at, tasks))
    else:
        per_u = [_interference_at(t) for t in tasks]

    rows = []
    for u, (e_i, mc) in zip(spec.u_grid, per_u):
        for d_k in spec.dk_grid:
            params = replace(spec.scenario.params, sn_distance=d_k)
            sol = solve_power_threshold(spec.scenario.qos, params, interference=e_i)
            row = {
                "u": u,
                "elevation_deg": elevation_deg(u),
                "d_k": d_k,
                "E_I_W": e_i,
                "P_u_W": sol.p_u,
                "P_u_dBm": watts_to_dbm(sol.p_u),
                "eps_c": sol.eps_c,
                "eps_q": sol.eps_q,
                "eps_t": sol.eps_t,
                "g_th": sol.g_th,
                "nu": sol.nu,
                "converged": sol.converged and sol.probe_ok,
            }
            if mc is not None:
                row["E_I_mc_W"], row["E_I_mc_stderr_W"] = mc
            rows.append(row)
    return rows


def emit_overlap_table(scenario: Scenario, steer_u: Optional[float] = None) -> list[dict]:
    """Overlap-gain rows per shell over that shell's integration window."""
    cfg = scenario.interference_config(steer_u)
    rows = []
    for i, shell in enumerate(cfg.shells):
        win = cfg.window(i)
        if win is None:
            continue
        d = np.linspace(win.lower, win.upper, cfg.quadrature_points)
        f_pl = interferer_path_loss(d, shell)
        gain = cfg.overlap(i).at(d)
        for dj, fj, gj in zip(d, f_pl, gain):
            rows.append({"orbit_index": i, "altitude_m": shell.altitude, "d_m": float(dj),
                         "u": shell.altitude / float(dj), "f_pl": float(fj),
                         "gain_product": float(gj), "kernel": float(fj * gj)})
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def format_csv(rows: list[dict], columns: Sequence[str], scenario: Scenario, seed: int) -> str:
    out = io.StringIO()
    out.write(f"# suborbital_power {__version__}\n")
    out.write(f"# seed = {seed}\n")
    out.write(f"# generator = {GENERATOR_NAME}\n")
    out.write(f"# config_sha256 = {scenario.digest()}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    return out.getvalue()


def _grid(text: str, name: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"{name}: expected start:stop:n")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name}: expected start:stop:n") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"{name}: n must be >= 1")
    return [start] if n == 1 else [float(x) for x in np.linspace(start, stop, n)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="suborbital-power",
        description="Minimum SN transmit-power ceiling under stochastic satellite interference.")
    p.add_argument("--config", help="scenario file (defaults to the canonical scenario)")
    p.add_argument("--sweep-u", type=lambda s: _grid(s, "--sweep-u"), metavar="START:STOP:N",
                   help="receiver steering grid in direction cosine u = sin(elevation)")
    p.add_argument("--sweep-dk", type=lambda s: _grid(s, "--sweep-dk"), metavar="START:STOP:N",
                   help="SN distance grid in meters")
    p.add_argument("--mc-check", type=int, default=None, metavar="N",
                   help="also estimate E[I] from N point-process realizations")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
    p.add_argument("--overlap-table", action="store_true",
                   help="emit the per-shell overlap-gain table instead of a sweep")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    try:
        scenario = load_config(args.config) if args.config else Scenario()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    seed = scenario.seed if args.seed is None else args.seed
    mc_n = scenario.mc_realizations if args.mc_check is None else args.mc_check
    if seed < 0 or (mc_n and mc_n < 100) or args.workers < 1:
        print("argument error: need seed >= 0, --mc-check >= 100, --workers >= 1", file=sys.stderr)
        return EXIT_CONFIG

    status = EXIT_OK
    try:
        if args.overlap_table:
            steer = args.sweep_u[0] if args.sweep_u else None
            text = format_csv(emit_overlap_table(scenario, steer), OVERLAP_COLUMNS, scenario, seed)
        else:
            spec = SweepSpec(
                u_grid=args.sweep_u or [scenario.rx_steer_u],
                dk_grid=args.sweep_dk or [scenario.params.sn_distance],
                scenario=scenario, mc_realizations=mc_n, seed=seed)
            rows = run_sweep(spec, workers=args.workers)
            columns = SWEEP_COLUMNS + (MC_COLUMNS if mc_n else ())
            text = format_csv(rows, columns, scenario, seed)
            if not all(r["converged"] for r in rows):
                status = EXIT_NONCONVERGED
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def main_exit() -> None:
    sys.exit(main())
