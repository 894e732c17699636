"""Deterministic file outputs: CSV tables, JSON records, and figures.

CSV and JSON are the canonical interchange formats and are written with
fixed 17-significant-digit floats so identical configs produce
byte-identical files.  Figures (PNG, matplotlib Agg) are rendered
alongside the delimited output as a human-readable report layer; they
carry no data that is not already in the CSVs.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .driving import DrivingProfile
from .holonomy import HolonomyU2
from .phases import PhaseSet
from .response import ResponseTrajectory

_T0_LABEL = "t / T0"


def fmt(value: float) -> str:
    return f"{float(value):.17g}"


def write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(fmt(col[i]) for col in columns) + "\n")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _complex_pairs(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def sampled_driving(traj: ResponseTrajectory, profile: DrivingProfile):
    """Right-limit driving values on the trajectory grid."""
    t = traj.t
    starts = np.array([s.t0 for s in profile.segments])
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    xi = np.empty_like(t)
    al = np.empty_like(t)
    for i, seg in enumerate(profile.segments):
        m = idx == i
        if np.any(m):
            xi[m] = seg.xi(t[m])
            al[m] = seg.alpha(t[m])
    return xi, al


def trajectory_csv(path: str, traj: ResponseTrajectory, profile: DrivingProfile) -> None:
    xi, al = sampled_driving(traj, profile)
    write_csv(
        path,
        ["t", "xi", "alpha", "x_c", "dx_c", "a_c", "da_c"],
        [traj.t, xi, al, traj.x_c, traj.dx_c, traj.a_c, traj.da_c],
    )


CONTOUR_COLUMNS = {
    "C1": ("xi", "a_c"),
    "C2": ("x_c", "alpha"),
    "C3": ("x_c", "a_c"),
    "C4": ("x_c", "dx_c"),
    "C5": ("a_c", "da_c"),
    "C_ad": ("xi", "alpha"),
}


def contour_table(traj: ResponseTrajectory, profile: DrivingProfile) -> dict[str, tuple]:
    xi, al = sampled_driving(traj, profile)
    series = {"xi": xi, "alpha": al, "x_c": traj.x_c, "dx_c": traj.dx_c,
              "a_c": traj.a_c, "da_c": traj.da_c}
    return {name: (series[u], series[v]) for name, (u, v) in CONTOUR_COLUMNS.items()}


def contours_csv(out_dir: str, prefix: str, traj, profile) -> list[str]:
    paths = []
    for name, (u, v) in contour_table(traj, profile).items():
        cols = CONTOUR_COLUMNS[name]
        path = os.path.join(out_dir, f"{prefix}_{name}.csv")
        write_csv(path, list(cols), [u, v])
        paths.append(path)
    return paths


def phase_set_json(path: str, phases: PhaseSet) -> None:
    write_json(path, phases.to_dict())


def state_csv(path: str, state) -> None:
    """Grid wavefunction as x plus Re/Im of both spin components."""
    write_csv(
        path,
        ["x", "re_up", "im_up", "re_down", "im_down"],
        [state.x, state.psi_up.real, state.psi_up.imag,
         state.psi_down.real, state.psi_down.imag],
    )


def holonomy_json(
    path: str,
    h: HolonomyU2,
    phi_dyn: np.ndarray | None = None,
    phi_geom: np.ndarray | None = None,
    berry: dict[str, float] | None = None,
) -> None:
    payload = {
        "matrix": _complex_pairs(h.matrix),
        "diagonal_phase": float(h.diagonal_phase),
        "spin_angle": float(h.spin_angle),
        "n_axis": [float(c) for c in h.n_axis],
    }
    if phi_dyn is not None:
        payload["phi_dyn"] = _complex_pairs(phi_dyn)
    if phi_geom is not None:
        payload["phi_geom"] = _complex_pairs(phi_geom)
    if berry is not None:
        payload["anandan_berry"] = {k: float(v) for k, v in berry.items()}
    write_json(path, payload)


# ----------------------------------------------------------------------
# Figures
# ----------------------------------------------------------------------

def trajectory_figure(path: str, traj: ResponseTrajectory, profile: DrivingProfile) -> None:
    xi, al = sampled_driving(traj, profile)
    T0 = 2.0 * np.pi / traj.omega
    ts = traj.t / T0
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 5.0), sharex=True)
    ax1.plot(ts, xi, label="xi", color="C0")
    ax1.plot(ts, al, label="alpha", color="C3")
    ax1.set_ylabel("driving")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(ts, traj.x_c, label="x_c", color="C0")
    ax2.plot(ts, traj.a_c, label="a_c", color="C3")
    ax2.plot(ts, traj.da_c, label="da_c/dt", color="C2", lw=0.8)
    ax2.set_xlabel(_T0_LABEL)
    ax2.set_ylabel("response")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def contours_figure(path: str, traj: ResponseTrajectory, profile: DrivingProfile) -> None:
    table = contour_table(traj, profile)
    fig, axes = plt.subplots(2, 3, figsize=(9.0, 6.0))
    for ax, (name, (u, v)) in zip(axes.flat, table.items()):
        ax.plot(u, v, lw=0.9)
        ax.plot([u[0]], [v[0]], "ko", ms=3)
        ax.set_title(name, fontsize=9)
        ax.set_xlabel(CONTOUR_COLUMNS[name][0], fontsize=8)
        ax.set_ylabel(CONTOUR_COLUMNS[name][1], fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(path: str, variable: str, values: np.ndarray, table: dict[str, np.ndarray]) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for key, style in (("phi_T", "-"), ("phi_c", "--"), ("phi_ad", ":"), ("phi_a", "-.")):
        if key in table:
            ax.plot(values, table[key], style, label=key)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel(variable)
    ax.set_ylabel("phase (rad)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
