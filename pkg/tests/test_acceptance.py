"""Acceptance gate: one test per criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass line per
criterion alongside the measured numbers.
"""

import time

import numpy as np
import pytest
from scipy.optimize import bisect

from holospin import (
    anandan_berry,
    closed_form_circular,
    compute_phase_set,
    decompose,
    make_broken_ellipsoidal,
    make_circular,
    make_sequential_square,
    phi_ad,
    phi_c,
    phi_contour_C1,
    phi_contour_C2,
    phi_spin,
    solve_analytic,
)
from holospin import oracle as orc
from holospin.holonomy import total_phase_exponent
from holospin.scenario import build_profile, build_scenario, build_trajectory
from tests.conftest import T0


def _report(line):
    print("\n" + line)


def test_criterion_1_circular_closed_forms(params):
    start = time.perf_counter()
    worst = 0.0
    for n in (2, 3, 4, 8, 16):
        prof = make_circular(params, 1.0, 1.0, n)
        traj = solve_analytic(prof)
        ref = closed_form_circular(n, 1.0, 1.0, params)
        got = {
            "phi_T": phi_spin(traj, prof, params),
            "phi_c": phi_c(traj, params),
            "phi_a": compute_phase_set(traj, prof, params).phi_a,
            "phi_ad": phi_ad(prof, params),
        }
        for name, value in got.items():
            rel = abs(value - getattr(ref, name)) / abs(getattr(ref, name))
            worst = max(worst, rel)
            assert rel <= 1e-8, (n, name, rel)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    _report(f"PASS criterion 1: circular closed forms, worst rel err {worst:.2e}, "
            f"{elapsed:.2f}s")


def test_criterion_2_square_universality(params):
    start = time.perf_counter()
    worst = 0.0
    for ramp, period in (("sinusoidal", 12 * np.pi), ("instantaneous", 4 * np.pi)):
        prof = make_sequential_square(params, 1.0, 1.0, ramp)
        assert prof.period_T == pytest.approx(period)
        traj = solve_analytic(prof)
        err = abs(phi_spin(traj, prof, params) - (-1.0))
        worst = max(worst, err)
        assert err <= 1e-6, (ramp, err)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    _report(f"PASS criterion 2: square-loop phi_T = -m*xi0*alpha0 for both ramps, "
            f"worst abs err {worst:.2e}, {elapsed:.2f}s")


def _builtin_cyclic_profiles(params):
    profiles = [make_circular(params, 1.0, 1.0, n) for n in (2, 3, 4, 8, 16)]
    profiles += [
        make_sequential_square(params, 1.0, 1.0, "sinusoidal"),
        make_sequential_square(params, 1.0, 1.0, "instantaneous"),
        make_broken_ellipsoidal(params, 1.0, 1.0, T0 / 4),
        make_broken_ellipsoidal(params, 1.0, 1.0, 5 * T0 / 8),
        make_broken_ellipsoidal(params, 1.0, 1.0, 2 * T0),
    ]
    # the InSb estimate in scaled form
    profiles.append(make_sequential_square(params, 2.2765754, 0.56914386, "sinusoidal"))
    return profiles


def test_criterion_3_contour_identity(params):
    worst = 0.0
    for prof in _builtin_cyclic_profiles(params):
        traj = solve_analytic(prof)
        c1 = phi_contour_C1(traj, prof, params)
        c2 = phi_contour_C2(traj, prof, params)
        ad = abs(phi_ad(prof, params))
        assert abs(c1 - c2) <= 1e-8 * ad or (ad == 0.0 and c1 == c2 == 0.0), (
            prof.kind, prof.meta, c1, c2, ad)
        if ad > 0:
            worst = max(worst, abs(c1 - c2) / ad)
    _report(f"PASS criterion 3: |C1 - C2| <= 1e-8*|phi_ad| on "
            f"{len(_builtin_cyclic_profiles(params))} built-in scenarios, "
            f"worst ratio {worst:.2e}")


def test_criterion_4_decomposition_identity(params):
    cases = [make_circular(params, 1.0, 1.0, 2), make_circular(params, 1.0, 1.0, 8),
             make_broken_ellipsoidal(params, 1.0, 1.0, T0 / 4),
             make_broken_ellipsoidal(params, 1.0, 1.0, 5 * T0 / 8)]
    worst = 0.0
    for prof in cases:
        traj = solve_analytic(prof)
        ps = compute_phase_set(traj, prof, params)
        dyn, geom = decompose(ps, params)
        defect = float(np.linalg.norm(dyn + geom - total_phase_exponent(ps, params)))
        scalar = abs(-ps.energy_integral + ps.phi_a - (-ps.omega_m_T + ps.action_S))
        worst = max(worst, defect, scalar)
        assert defect <= 1e-8 and scalar <= 1e-8, (prof.kind, defect, scalar)
    _report(f"PASS criterion 4: Phi_dyn + Phi_geom = Phi_T (incl. scalar identity), "
            f"worst defect {worst:.2e}")


def test_criterion_5_oracle_equivalence(params):
    start = time.perf_counter()
    prof = make_circular(params, 1.0, 1.0, 3)
    traj = solve_analytic(prof)
    ps = compute_phase_set(traj, prof, params)
    T = prof.period_T
    grid = orc.GridSpec(n_points=1024)
    dt = T / 8192

    state0 = orc.superposition_initial(0, traj, prof, params, grid)
    final = orc.evolve_split_step(prof, params, state0, dt, T)
    worst_fid = 1.0
    for comp in ("up", "down"):
        z = orc.component_overlap(state0, final, comp)
        worst_fid = min(worst_fid, 2.0 * abs(z))  # components carry 1/sqrt(2) each
    assert worst_fid >= 1.0 - 1e-6, worst_fid

    measured = orc.extract_spin_rotation(prof, params, grid, dt=dt, traj=traj)
    rot_err = abs(orc.wrap_angle(measured - 2.0 * ps.phi_T))
    assert rot_err <= 1e-3, rot_err

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"
    _report(f"PASS criterion 5: oracle fidelity {worst_fid:.10f} (>= 1 - 1e-6), "
            f"spin-rotation err {rot_err:.2e} rad (<= 1e-3), {elapsed:.1f}s")


def _broken_phases(params, delta_T, n_points=2048):
    prof = make_broken_ellipsoidal(params, 1.0, 1.0, delta_T)
    traj = solve_analytic(prof, samples=2048)
    pT = phi_spin(traj, prof, params, n_points=n_points)
    pc = phi_c(traj, params, n_points=n_points)
    pad = phi_ad(prof, params, n_points=n_points)
    return pT, pc, pad


def test_criterion_6_broken_ellipsoidal_structure(params):
    start = time.perf_counter()
    # endpoint value
    pT_end, _, _ = _broken_phases(params, 2 * T0)
    assert abs(pT_end) <= 1e-8, pT_end

    # 64-point sweep over (0, 2*T0)
    delays = np.linspace(0.0, 2 * T0, 64)
    rows = np.array([_broken_phases(params, d) for d in delays])
    pT, pc, pad = rows[:, 0], rows[:, 1], rows[:, 2]

    def interior_sign_changes(y, floor=1e-9):
        count = 0
        vals = [v for v in y if abs(v) > floor]
        for a, b in zip(vals[:-1], vals[1:]):
            if np.sign(a) != np.sign(b):
                count += 1
        return count

    assert interior_sign_changes(pT) == 1
    assert interior_sign_changes(pc) == 1
    assert interior_sign_changes(pad) == 1

    # the three zero crossings sit at pairwise distinct delays
    crossings = []
    for idx in (0, 1, 2):
        f = lambda d: _broken_phases(params, d, 1024)[idx]
        col = rows[:, idx]
        bracket = next(i for i in range(1, 62)
                       if abs(col[i]) > 1e-9 and abs(col[i + 1]) > 1e-9
                       and np.sign(col[i]) != np.sign(col[i + 1]))
        crossings.append(bisect(f, delays[bracket], delays[bracket + 1], xtol=1e-9))
    spread = np.diff(sorted(crossings))
    assert np.all(spread > 0.01 * T0), crossings

    def count_and_bisect(values, func):
        roots = []
        for i in range(1, 62):  # interior brackets only; both phases -> 0 at 2*T0
            a, b = values[i], values[i + 1]
            if abs(a) > 1e-9 and abs(b) > 1e-9 and np.sign(a) != np.sign(b):
                root = bisect(func, delays[i], delays[i + 1], xtol=1e-9)
                roots.append(root)
        return roots

    f_eq = lambda d: (lambda p: p[0] - p[1])(_broken_phases(params, d, 1024))
    f_2x = lambda d: (lambda p: p[0] - 2 * p[1])(_broken_phases(params, d, 1024))
    roots_eq = count_and_bisect(pT - pc, f_eq)
    roots_2x = count_and_bisect(pT - 2 * pc, f_2x)
    assert len(roots_eq) == 2, roots_eq
    assert len(roots_2x) == 2, roots_2x

    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"runtime {elapsed:.1f}s exceeds 5s"
    _report("PASS criterion 6: phi_T(2T0) = 0, single sign change each, "
            f"phi_T = phi_c at {[f'{r / T0:.3f}*T0' for r in roots_eq]}, "
            f"phi_T = 2*phi_c at {[f'{r / T0:.3f}*T0' for r in roots_2x]}, "
            f"{elapsed:.1f}s")


def test_criterion_7_adiabatic_limits(params):
    ns = (8, 16, 32, 64)
    refs = [closed_form_circular(n, 1.0, 1.0, params) for n in ns]
    series = {
        "|phi_T - phi_ad|": [abs(r.phi_T - r.phi_ad) for r in refs],
        "|phi_c - phi_ad|": [abs(r.phi_c - r.phi_ad) for r in refs],
        "phi_a": [r.phi_a for r in refs],
        "|beta_+ + phi_ad|": [abs(anandan_berry(r, +0.5) + r.phi_ad) for r in refs],
        "|beta_- - phi_ad|": [abs(anandan_berry(r, -0.5) - r.phi_ad) for r in refs],
        "|geom_coeff + phi_ad|": [abs((r.phi_T - 2 * r.phi_c) + r.phi_ad) for r in refs],
    }
    for name, values in series.items():
        assert all(a > b for a, b in zip(values[:-1], values[1:])), (name, values)
    _report("PASS criterion 7: all adiabatic gaps decrease monotonically over "
            f"n = {ns}; Wilczek-Zee coefficient gap "
            f"{series['|geom_coeff + phi_ad|'][0]:.3g} -> "
            f"{series['|geom_coeff + phi_ad|'][-1]:.3g}")


def test_criterion_8_insb_order_of_magnitude():
    sc = build_scenario(preset="insb-square")
    prof = build_profile(sc)
    traj = build_trajectory(sc, prof)
    ps = compute_phase_set(traj, prof, sc.params)
    assert 0.5 <= abs(ps.phi_T) <= 2.0, ps.phi_T
    _report(f"PASS criterion 8: InSb preset (0.015 m_e, 200 nm, 50 nm/ps) gives "
            f"|phi_T| = {abs(ps.phi_T):.4f}, within a factor 2 of 1")
