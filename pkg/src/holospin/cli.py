"""Command-line scenario runner.

    holospin simulate  -c run.yaml        trajectory CSV + phases/holonomy JSON
    holospin contours  --preset circular-n3
    holospin sweep     --preset broken-ellipsoidal
    holospin verify    --preset circular-n3 --set verify.grid_points=512

Flags override config keys (--set section.key=value); the environment
variable HOLOSPIN_OUTDIR overrides the output directory.  Exit codes:
0 ok, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import reporting
from .errors import ConfigError, HolospinError
from .holonomy import anandan_berry, decompose, total_phase_matrix
from .phases import compute_phase_set
from .scenario import (
    PRESETS,
    Scenario,
    build_profile,
    build_scenario,
    build_trajectory,
    header_lines,
    load_config,
)
from .verification import run_checks

PHASE_FIELDS = (
    "phi_T", "phi_c", "phi_a", "phi_ad",
    "action_S", "energy_integral", "omega_m_T", "period_T",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holospin",
        description="Spin-orbit qubit holonomy simulator for a driven 1D quantum dot",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one cycle: trajectory CSV, phase JSON, holonomy JSON"),
        ("contours", "export the parametric contours C1..C5 and C_ad as CSV"),
        ("sweep", "sweep one parameter and tabulate all phases"),
        ("verify", "run the grid-oracle verification checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", help="YAML scenario file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")
        p.add_argument(
            "--set", dest="overrides", action="append", default=[],
            metavar="KEY=VALUE", help="override a config key, e.g. profile.n=4",
        )
        p.add_argument("--out", help="output directory (default: config outputs.directory)")
        p.add_argument("--prefix", help="output file prefix")
        fig = p.add_mutually_exclusive_group()
        fig.add_argument("--figures", dest="figures", action="store_true", default=None)
        fig.add_argument("--no-figures", dest="figures", action="store_false")
    return parser


def _scenario(args) -> Scenario:
    cfg = load_config(args.config) if args.config else None
    if cfg is None and args.preset is None and not args.overrides:
        raise ConfigError("provide --config, --preset, or --set overrides")
    return build_scenario(
        cfg=cfg,
        preset=args.preset,
        overrides=args.overrides,
        out_dir=args.out,
        prefix=args.prefix,
        figures=args.figures,
    )


def _prepare_out(scenario: Scenario) -> tuple[str, str, bool]:
    out_dir = scenario.outputs.get("directory", "out")
    os.makedirs(out_dir, exist_ok=True)
    prefix = scenario.outputs.get("prefix", "run")
    figures = bool(scenario.outputs.get("figures", True))
    return out_dir, prefix, figures


def _print_header(scenario: Scenario) -> None:
    for line in header_lines(scenario):
        print("# " + line)


def run_simulate(scenario: Scenario) -> int:
    _print_header(scenario)
    out_dir, prefix, figures = _prepare_out(scenario)
    profile = build_profile(scenario)
    traj = build_trajectory(scenario, profile)
    phases = compute_phase_set(traj, profile, scenario.params)
    holo = total_phase_matrix(phases, scenario.params)
    phi_dyn, phi_geom = decompose(phases, scenario.params)
    berry = {
        "plus": anandan_berry(phases, +0.5),
        "minus": anandan_berry(phases, -0.5),
    }

    traj_path = os.path.join(out_dir, f"{prefix}_trajectory.csv")
    reporting.trajectory_csv(traj_path, traj, profile)
    phase_path = os.path.join(out_dir, f"{prefix}_phases.json")
    reporting.phase_set_json(phase_path, phases)
    holo_path = os.path.join(out_dir, f"{prefix}_holonomy.json")
    reporting.holonomy_json(holo_path, holo, phi_dyn, phi_geom, berry)
    written = [traj_path, phase_path, holo_path]
    if figures:
        fig_path = os.path.join(out_dir, f"{prefix}_trajectory.png")
        reporting.trajectory_figure(fig_path, traj, profile)
        written.append(fig_path)

    print(f"phi_T = {phases.phi_T:.12g}  phi_c = {phases.phi_c:.12g}  "
          f"phi_a = {phases.phi_a:.12g}  phi_ad = {phases.phi_ad:.12g}")
    print(f"spin rotation angle 2*phi = {holo.spin_angle:.12g} rad about n = {holo.n_axis}")
    for path in written:
        print("wrote", path)
    return 0


def run_contours(scenario: Scenario) -> int:
    _print_header(scenario)
    out_dir, prefix, figures = _prepare_out(scenario)
    profile = build_profile(scenario)
    traj = build_trajectory(scenario, profile)
    written = reporting.contours_csv(out_dir, prefix, traj, profile)
    if figures:
        fig_path = os.path.join(out_dir, f"{prefix}_contours.png")
        reporting.contours_figure(fig_path, traj, profile)
        written.append(fig_path)
    for path in written:
        print("wrote", path)
    return 0


def sweep_values(scenario: Scenario) -> tuple[np.ndarray, list[dict]]:
    sweep = scenario.sweep
    if sweep is None:
        raise ConfigError("scenario has no sweep section")
    var = sweep["variable"]
    start, stop, count = float(sweep["start"]), float(sweep["stop"]), int(sweep["count"])
    if var == "n":
        vals = np.unique(np.round(np.linspace(start, stop, count)).astype(int))
        vals = vals[vals >= 2]
        if vals.size == 0:
            raise ConfigError("n sweep produced no integers >= 2")
        return vals.astype(float), [{"n": int(v)} for v in vals]
    if var == "delta_T":
        T0 = 2.0 * math.pi / scenario.params.omega
        vals = np.linspace(start, stop, count)  # in units of T0
        reps = [{"delta_t": float(v) * T0, "delta_t_over_T0": None} for v in vals]
        return vals, reps
    vals = np.linspace(start, stop, count)
    return vals, [{var: float(v)} for v in vals]


def run_sweep(scenario: Scenario) -> int:
    _print_header(scenario)
    out_dir, prefix, figures = _prepare_out(scenario)
    values, replacements = sweep_values(scenario)
    var = scenario.sweep["variable"]

    def one(rep):
        profile = build_profile(scenario, **rep)
        traj = build_trajectory(scenario, profile)
        return compute_phase_set(traj, profile, scenario.params)

    workers = min(len(replacements), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, replacements))

    table = {f: np.array([getattr(ps, f) for ps in results]) for f in PHASE_FIELDS}

    def sign_changes(y):
        # a transition counts only between two values clearly away from zero
        peak = float(np.max(np.abs(y)))
        floor = 1e-12 * peak if peak else 0.0
        sig = np.where(np.abs(y) > floor, np.sign(y), 0.0)
        out = np.zeros(y.size)
        out[1:] = (sig[1:] != sig[:-1]) & (sig[1:] != 0) & (sig[:-1] != 0)
        return out

    cross1 = table["phi_T"] - table["phi_c"]
    cross2 = table["phi_T"] - 2.0 * table["phi_c"]
    columns = [values] + [table[f] for f in PHASE_FIELDS] + [
        sign_changes(table["phi_T"]),
        sign_changes(table["phi_c"]),
        sign_changes(table["phi_ad"]),
        sign_changes(cross1),
        sign_changes(cross2),
    ]
    header = [var] + list(PHASE_FIELDS) + [
        "sign_change_phi_T", "sign_change_phi_c", "sign_change_phi_ad",
        "cross_phiT_phiC", "cross_phiT_2phiC",
    ]
    csv_path = os.path.join(out_dir, f"{prefix}_sweep.csv")
    reporting.write_csv(csv_path, header, columns)
    written = [csv_path]
    if figures:
        fig_path = os.path.join(out_dir, f"{prefix}_sweep.png")
        reporting.sweep_figure(fig_path, var, values, table)
        written.append(fig_path)
    for path in written:
        print("wrote", path)
    return 0


def run_verify(scenario: Scenario) -> int:
    _print_header(scenario)
    out_dir, prefix, _ = _prepare_out(scenario)
    report = run_checks(scenario)
    path = os.path.join(out_dir, f"{prefix}_verify.json")
    reporting.write_json(path, report)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: value={check['value']:.3g} "
              f"tol={check['tolerance']:.3g} {check['details']}")
    print("wrote", path)
    if not report["all_passed"]:
        print("verification FAILED")
        return 3
    print("verification passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _scenario(args)
        if args.command == "simulate":
            return run_simulate(scenario)
        if args.command == "contours":
            return run_contours(scenario)
        if args.command == "sweep":
            return run_sweep(scenario)
        if args.command == "verify":
            return run_verify(scenario)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HolospinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
