"""End-to-end verification of a scenario against the grid oracle.

Runs the independent split-step integrator and the exact-solution
machinery on the same cycle and reports, check by check: cyclicity of
the classical responses, finite-difference equation-of-motion residual
convergence of the numeric solver, the contour identity between the two
loop-integral forms of the spin-rotation phase, the Anandan
decomposition identity, per-component oracle fidelities and phases at
t = T, the extracted spin-rotation angle, norm/boundary conservation,
second-order convergence of the Strang splitting, and intermediate-time
agreement with the analytic states.
"""

from __future__ import annotations

import math

import numpy as np

from . import oracle as orc
from .errors import ConfigError
from .holonomy import decompose, total_phase_exponent
from .phases import compute_phase_set, phi_contour_C1, phi_contour_C2
from .response import find_periodic_ic, residual_report, solve_numeric
from .scenario import Scenario, build_profile, build_trajectory


def _check(name, passed, value, tolerance, details=""):
    return {
        "name": name,
        "passed": bool(passed),
        "value": float(value),
        "tolerance": float(tolerance),
        "details": details,
    }


def _state_error(a, b) -> float:
    """Full L2 distance including the global phase (the analytic state
    carries the exact total phase, so phase drift counts as error)."""
    mag, phase = orc.fidelity(a, b)
    re = min(mag * math.cos(phase), 1.0)
    return math.sqrt(max(0.0, 2.0 - 2.0 * re))


def run_checks(scenario: Scenario) -> dict:
    checks = []
    params = scenario.params
    profile = build_profile(scenario)
    T = profile.period_T

    v = scenario.verify
    n_x = int(v.get("grid_points", 1024))
    steps = int(v.get("steps_per_cycle", 8192))
    max_work = int(v.get("max_work", 100_000_000))
    if n_x * steps > max_work:
        raise ConfigError(
            f"verification workload {n_x}*{steps} exceeds max_work={max_work}"
        )
    rng = np.random.default_rng(int(v.get("seed", 7)))

    traj = build_trajectory(scenario, profile)
    phases = compute_phase_set(traj, profile, params)

    # 1. classical cyclicity
    from .response import check_cyclic

    rep = check_cyclic(traj, tol=1e-10)
    worst = max(rep.residuals.values())
    checks.append(_check("trajectory_cyclic", worst <= 1e-10, worst, 1e-10))

    # 2. numeric-solver residual convergence (RK4, coarse on purpose)
    coarse = int(v.get("rk4_steps", 1024))
    ic = find_periodic_ic(profile)
    res1 = residual_report(
        solve_numeric(profile, ic, T / coarse, "rk4", residual_tol=np.inf), profile
    )
    res2 = residual_report(
        solve_numeric(profile, ic, T / (2 * coarse), "rk4", residual_tol=np.inf), profile
    )
    num = max(res1.values())
    den = max(res2.values())
    ratio = num / den if den > 0 else float("inf")
    checks.append(
        _check("ode_residual_convergence", ratio >= 3.6, ratio, 3.6,
               f"residual {num:.3g} -> {den:.3g} on halving dt")
    )

    # 3. contour identity: phi_T as two different loop integrals
    c1 = phi_contour_C1(traj, profile, params)
    c2 = phi_contour_C2(traj, profile, params)
    scale = params.m_star * profile.xi_scale * profile.alpha_scale
    tol = 1e-8 * abs(phases.phi_ad) + 1e-13 * (1.0 + scale)
    gap = max(abs(c1 - c2), abs(c1 - phases.phi_T), abs(c2 - phases.phi_T))
    checks.append(_check("contour_identity", gap <= tol, gap, tol))

    # 4. decomposition identity
    phi_dyn, phi_geom = decompose(phases, params)
    defect = float(np.linalg.norm(phi_dyn + phi_geom - total_phase_exponent(phases, params)))
    scalar = abs(-phases.energy_integral + phases.phi_a - (-phases.omega_m_T + phases.action_S))
    worst = max(defect, scalar)
    checks.append(_check("decomposition_identity", worst <= 1e-8, worst, 1e-8))

    # 5-8. oracle evolution of one full cycle with intermediate checkpoints
    grid = orc.GridSpec(n_points=n_x)
    dt = T / steps
    state0 = orc.superposition_initial(params.level_m, traj, profile, params, grid)
    t_checks = np.sort(rng.choice(np.arange(1, steps), size=8, replace=False)) * dt
    final, snapshots = orc.evolve_split_step(
        profile, params, state0, dt, T, checkpoints=t_checks
    )

    x = state0.x
    psi_m = orc.oscillator_eigenstate(params.level_m, x, params)
    ref = orc.SpinorGridState(x, psi_m / math.sqrt(2.0), psi_m.copy() / math.sqrt(2.0))

    g = params.zeeman_or_zero
    worst_fid = 1.0
    worst_phase = 0.0
    for comp, sign in (("up", +1.0), ("down", -1.0)):
        z = orc.component_overlap(state0, final, comp)
        mag = 2.0 * abs(z)  # each component carries norm 1/sqrt(2)
        theta = (
            -(params.omega_m - sign * g) * T + phases.action_S - sign * phases.phi_T
        )
        err = abs(orc.wrap_angle(np.angle(z) - theta))
        worst_fid = min(worst_fid, mag)
        worst_phase = max(worst_phase, err)
    checks.append(
        _check("oracle_fidelity", worst_fid >= 1.0 - 1e-6, worst_fid, 1.0 - 1e-6,
               "min per-component overlap magnitude at t = T")
    )
    checks.append(
        _check("oracle_phase", worst_phase <= 1e-4, worst_phase, 1e-4,
               "max per-component phase mismatch vs analytic total phase (rad)")
    )

    two_phi = orc.extract_spin_rotation(profile, params, grid, dt=dt, traj=traj)
    target = orc.wrap_angle(2.0 * phases.phi_T)
    rot_err = abs(orc.wrap_angle(two_phi - target))
    checks.append(_check("spin_rotation", rot_err <= 1e-3, rot_err, 1e-3,
                         f"measured {two_phi:.6f} vs 2*phi_T {target:.6f}"))

    drift = abs(final.norm - 1.0)
    checks.append(_check("norm_drift", drift <= 1e-10, drift, 1e-10))

    dens = np.abs(final.psi_up) ** 2 + np.abs(final.psi_down) ** 2
    leak = max(float(dens[0]), float(dens[-1])) / float(np.max(dens))
    checks.append(_check("boundary_leak", leak <= 1e-12, leak, 1e-12))

    worst_mid = 1.0
    for t_c, snap in zip(t_checks, snapshots):
        exact = orc.analytic_state(ref, float(t_c), traj, profile, params)
        mag, _ = orc.fidelity(exact, snap)
        worst_mid = min(worst_mid, mag)
    checks.append(
        _check("intermediate_fidelity", worst_mid >= 1.0 - 1e-6, worst_mid, 1.0 - 1e-6,
               "min fidelity vs analytic state at 8 interior times")
    )

    # 9. Strang-splitting order on a reduced grid
    small = orc.GridSpec(n_points=min(n_x, 512))
    s0 = orc.superposition_initial(params.level_m, traj, profile, params, small)
    ref_small = orc.SpinorGridState(
        s0.x,
        orc.oscillator_eigenstate(params.level_m, s0.x, params) / math.sqrt(2.0),
        orc.oscillator_eigenstate(params.level_m, s0.x, params) / math.sqrt(2.0),
    )
    exact_small = orc.analytic_state(ref_small, T, traj, profile, params)
    coarse_steps = int(v.get("order_steps", 1024))
    e1 = _state_error(exact_small, orc.evolve_split_step(profile, params, s0, T / coarse_steps, T))
    e2 = _state_error(exact_small, orc.evolve_split_step(profile, params, s0, T / (2 * coarse_steps), T))
    order_ratio = e1 / e2 if e2 > 0 else float("inf")
    checks.append(
        _check("strang_order", order_ratio >= 3.6, order_ratio, 3.6,
               f"final-state error {e1:.3g} -> {e2:.3g} on halving dt")
    )

    return {
        "profile": str(scenario.profile.get("kind")),
        "grid_points": n_x,
        "steps_per_cycle": steps,
        "period_T": float(T),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
