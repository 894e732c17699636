"""Declarative run configuration: profiles, solvers, units, presets.

A scenario is a flat YAML mapping with nested sections:

    units: scaled                 # or: physical
    params:
      m_star: 1.0                 # electron masses when physical
      omega: 1.0                  # rad/ps when physical
      n_axis: [0.0, 0.0, 1.0]
      zeeman: 0.0                 # scaled energy; zeeman_mev when physical
      level_m: 0
    profile:
      kind: circular              # circular | square | broken_ellipsoidal
      xi0: 1.0                    #   | fourier | tabulated
      alpha0: 1.0                 # nm and nm/ps when physical
      n: 3                        # circular
      ramp: sinusoidal            # square: sinusoidal | instantaneous
      alpha1: 0.0                 # square
      delta_t_over_T0: 0.25       # broken ellipsoidal (or delta_t, absolute)
    solver:
      method: analytic            # analytic | rk4 | duhamel
      samples: 4096
    sweep:
      variable: delta_T           # n | delta_T | xi0 | alpha0
      start: 0.0
      stop: 2.0                   # delta_T sweeps are in units of T0
      count: 64
    verify:
      grid_points: 1024
      steps_per_cycle: 8192
    outputs:
      directory: out
      prefix: run
      figures: true

Physical-unit scenarios are converted on input to the internal scaled
system hbar = m_star = omega = 1 (time unit 1/omega, length unit the
oscillator length sqrt(hbar/(m_star*omega))); the conversion factors are
reported in the run header so results can be audited in either system.
"""

from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass, field

import numpy as np
import yaml
from scipy import constants as sconst

from .driving import DrivingProfile, make_broken_ellipsoidal, make_circular, make_fourier, make_sequential_square, make_tabulated
from .errors import ConfigError, HolospinError
from .params import PhysicalParams, normalized_axis
from .response import ResponseTrajectory, find_periodic_ic, solve_analytic, solve_numeric

OUTDIR_ENV = "HOLOSPIN_OUTDIR"


@dataclass(frozen=True)
class UnitSystem:
    """Scaled-to-laboratory conversion factors (identity for scaled runs)."""

    kind: str  # "scaled" | "physical"
    time_ps: float = 1.0
    length_nm: float = 1.0
    energy_mev: float = 1.0

    @classmethod
    def physical(cls, m_star_me: float, omega_per_ps: float) -> "UnitSystem":
        m_kg = m_star_me * sconst.m_e
        omega_si = omega_per_ps * 1e12
        l0_m = math.sqrt(sconst.hbar / (m_kg * omega_si))
        e_j = sconst.hbar * omega_si
        return cls(
            kind="physical",
            time_ps=1.0 / omega_per_ps,
            length_nm=l0_m * 1e9,
            energy_mev=e_j / sconst.e * 1e3,
        )

    def to_scaled_length(self, nm: float) -> float:
        return nm / self.length_nm

    def to_scaled_velocity(self, nm_per_ps: float) -> float:
        return nm_per_ps * self.time_ps / self.length_nm

    def to_scaled_time(self, ps: float) -> float:
        return ps / self.time_ps

    def to_scaled_energy(self, mev: float) -> float:
        return mev / self.energy_mev


@dataclass
class Scenario:
    params: PhysicalParams
    profile: dict
    solver: dict
    sweep: dict | None
    verify: dict
    outputs: dict
    units: UnitSystem
    raw: dict = field(repr=False, default_factory=dict)


_DEFAULTS = {
    "units": "scaled",
    "params": {"m_star": 1.0, "omega": 1.0, "n_axis": [0.0, 0.0, 1.0], "zeeman": None, "level_m": 0},
    "profile": {"kind": "circular", "xi0": 1.0, "alpha0": 1.0, "n": 3,
                "ramp": "sinusoidal", "alpha1": 0.0, "delta_t": None, "delta_t_over_T0": None},
    "solver": {"method": "analytic", "samples": 4096, "dt": None, "quad_points": 4096},
    "sweep": None,
    "verify": {"grid_points": 1024, "steps_per_cycle": 8192, "max_work": 100_000_000, "seed": 7},
    "outputs": {"directory": "out", "prefix": "run", "figures": True},
}

PRESETS = {
    "circular-n3": {"profile": {"kind": "circular", "n": 3}},
    "square-sinusoidal": {"profile": {"kind": "square", "ramp": "sinusoidal"}},
    "square-instantaneous": {"profile": {"kind": "square", "ramp": "instantaneous"}},
    "broken-ellipsoidal": {"profile": {"kind": "broken_ellipsoidal", "delta_t_over_T0": 0.25},
                           "sweep": {"variable": "delta_T", "start": 0.0, "stop": 2.0, "count": 64}},
    # InSb estimate: m* = 0.015 m_e, xi0 = 200 nm, alpha0 = 50 nm/ps
    "insb-square": {"units": "physical",
                    "params": {"m_star": 0.015, "omega": 1.0},
                    "profile": {"kind": "square", "ramp": "sinusoidal",
                                "xi0": 200.0, "alpha0": 50.0}},
}


def _deep_update(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_update(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _parse_scalar(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply --set section.key=value overrides onto a config mapping."""
    out = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        path, _, raw = item.partition("=")
        keys = path.strip().split(".")
        node = out
        for k in keys[:-1]:
            if not isinstance(node.get(k), dict):
                node[k] = {}
            node = node[k]
        node[keys[-1]] = _parse_scalar(raw.strip())
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if cfg is None:
        cfg = {}
    if not isinstance(cfg, dict):
        raise ConfigError(f"config root must be a mapping, got {type(cfg).__name__}")
    return cfg


def build_scenario(
    cfg: dict | None = None,
    preset: str | None = None,
    overrides: list[str] | None = None,
    out_dir: str | None = None,
    prefix: str | None = None,
    figures: bool | None = None,
) -> Scenario:
    merged = copy.deepcopy(_DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        merged = _deep_update(merged, PRESETS[preset])
        merged["outputs"]["prefix"] = preset
    if cfg:
        merged = _deep_update(merged, cfg)
    if overrides:
        merged = apply_overrides(merged, overrides)
    if out_dir is not None:
        merged["outputs"]["directory"] = out_dir
    if prefix is not None:
        merged["outputs"]["prefix"] = prefix
    if figures is not None:
        merged["outputs"]["figures"] = bool(figures)
    env_dir = os.environ.get(OUTDIR_ENV)
    if env_dir:
        merged["outputs"]["directory"] = env_dir

    units_kind = str(merged.get("units", "scaled")).lower()
    p_cfg = merged["params"]
    prof_cfg = dict(merged["profile"])

    try:
        if units_kind == "physical":
            units = UnitSystem.physical(float(p_cfg["m_star"]), float(p_cfg["omega"]))
            zeeman = p_cfg.get("zeeman_mev")
            params = PhysicalParams(
                m_star=1.0,
                omega=1.0,
                n_axis=normalized_axis(p_cfg["n_axis"]),
                zeeman=None if zeeman is None else units.to_scaled_energy(float(zeeman)),
                level_m=int(p_cfg["level_m"]),
            )
            for key in ("xi0",):
                prof_cfg[key] = units.to_scaled_length(float(prof_cfg[key]))
            for key in ("alpha0", "alpha1"):
                prof_cfg[key] = units.to_scaled_velocity(float(prof_cfg[key]))
            if prof_cfg.get("delta_t") is not None:
                prof_cfg["delta_t"] = units.to_scaled_time(float(prof_cfg["delta_t"]))
        elif units_kind == "scaled":
            units = UnitSystem(kind="scaled")
            params = PhysicalParams(
                m_star=float(p_cfg["m_star"]),
                omega=float(p_cfg["omega"]),
                n_axis=normalized_axis(p_cfg["n_axis"]),
                zeeman=None if p_cfg.get("zeeman") in (None, 0, 0.0) else float(p_cfg["zeeman"]),
                level_m=int(p_cfg["level_m"]),
            )
        else:
            raise ConfigError(f"units must be 'scaled' or 'physical', got {units_kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad params section: {exc}") from exc

    sweep = merged.get("sweep")
    if sweep is not None:
        missing = {"variable", "start", "stop", "count"} - set(sweep)
        if missing:
            raise ConfigError(f"sweep section missing keys: {sorted(missing)}")
        if sweep["variable"] not in ("n", "delta_T", "xi0", "alpha0"):
            raise ConfigError(f"sweep variable must be n|delta_T|xi0|alpha0, got {sweep['variable']!r}")
        if int(sweep["count"]) < 2:
            raise ConfigError("sweep count must be at least 2")

    return Scenario(
        params=params,
        profile=prof_cfg,
        solver=dict(merged["solver"]),
        sweep=None if sweep is None else dict(sweep),
        verify=dict(merged["verify"]),
        outputs=dict(merged["outputs"]),
        units=units,
        raw=merged,
    )


def build_profile(scenario: Scenario, **replacements) -> DrivingProfile:
    """Construct the DrivingProfile of a scenario (sweeps pass overrides)."""
    cfg = dict(scenario.profile)
    cfg.update(replacements)
    params = scenario.params
    kind = str(cfg.get("kind", "circular")).lower().replace("-", "_")
    xi0 = float(cfg.get("xi0", 1.0))
    alpha0 = float(cfg.get("alpha0", 1.0))
    try:
        if kind == "circular":
            return make_circular(params, xi0, alpha0, int(cfg["n"]))
        if kind in ("square", "sequential_square"):
            return make_sequential_square(
                params, xi0, alpha0, str(cfg.get("ramp", "sinusoidal")),
                float(cfg.get("alpha1", 0.0) or 0.0),
            )
        if kind == "broken_ellipsoidal":
            T0 = 2.0 * math.pi / params.omega
            if cfg.get("delta_t") is not None:
                delta_t = float(cfg["delta_t"])
            elif cfg.get("delta_t_over_T0") is not None:
                delta_t = float(cfg["delta_t_over_T0"]) * T0
            else:
                raise ConfigError("broken_ellipsoidal needs delta_t or delta_t_over_T0")
            return make_broken_ellipsoidal(params, xi0, alpha0, delta_t)
        if kind == "fourier":
            return make_fourier(
                params,
                period_T=float(cfg["period_T"]),
                xi_const=float(cfg.get("xi_const", 0.0)),
                xi_cos=cfg.get("xi_cos", ()),
                xi_sin=cfg.get("xi_sin", ()),
                alpha_const=float(cfg.get("alpha_const", 0.0)),
                alpha_cos=cfg.get("alpha_cos", ()),
                alpha_sin=cfg.get("alpha_sin", ()),
            )
        if kind == "tabulated":
            return make_tabulated(
                params, cfg["t_samples"], cfg["xi_samples"], cfg["alpha_samples"]
            )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile section for kind {kind!r}: {exc}") from exc
    except HolospinError:
        raise
    raise ConfigError(f"unknown profile kind {kind!r}")


def build_trajectory(scenario: Scenario, profile: DrivingProfile) -> ResponseTrajectory:
    solver = scenario.solver
    method = str(solver.get("method", "analytic")).lower()
    samples = int(solver.get("samples", 4096))
    if method == "analytic":
        return solve_analytic(profile, samples)
    if method in ("rk4", "duhamel"):
        dt = solver.get("dt")
        dt = profile.period_T / samples if dt in (None, 0) else float(dt)
        ic = find_periodic_ic(profile)
        return solve_numeric(profile, ic, dt, method)
    raise ConfigError(f"unknown solver method {method!r}")


def header_lines(scenario: Scenario) -> list[str]:
    """Run-header summary, including unit conversion factors for audits."""
    u = scenario.units
    lines = [
        f"profile: {scenario.profile.get('kind')}  solver: {scenario.solver.get('method')}",
        f"params (scaled): m_star={scenario.params.m_star:g} omega={scenario.params.omega:g} "
        f"level_m={scenario.params.level_m} zeeman={scenario.params.zeeman_or_zero:g}",
    ]
    if u.kind == "physical":
        lines += [
            "unit system: physical input, hbar = m_star = omega = 1 internally",
            f"  1 scaled time   = {u.time_ps:.12g} ps",
            f"  1 scaled length = {u.length_nm:.12g} nm (oscillator length)",
            f"  1 scaled energy = {u.energy_mev:.12g} meV",
            f"  scaled xi0 = {scenario.profile.get('xi0'):.12g}, "
            f"alpha0 = {scenario.profile.get('alpha0'):.12g}",
        ]
    else:
        lines.append("unit system: scaled (hbar = 1)")
    return lines
