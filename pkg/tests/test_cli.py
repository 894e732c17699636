import json
import os

import numpy as np
import pytest
import yaml

from holospin import closed_form_circular
from holospin.cli import main
from holospin.scenario import UnitSystem, build_scenario


def run(*argv):
    return main(list(argv))


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestSimulate:
    def test_preset_outputs(self, tmp_path, params):
        out = tmp_path / "o"
        assert run("simulate", "--preset", "circular-n3", "--out", str(out)) == 0
        phases = json.loads(read(out / "circular-n3_phases.json"))
        ref = closed_form_circular(3, 1.0, 1.0, params)
        assert phases["phi_T"] == pytest.approx(ref.phi_T, rel=1e-8)
        assert phases["phi_c"] == pytest.approx(ref.phi_c, rel=1e-8)
        holo = json.loads(read(out / "circular-n3_holonomy.json"))
        assert holo["spin_angle"] == pytest.approx(2 * ref.phi_T, rel=1e-8)
        mat = np.array([[complex(re, im) for re, im in row] for row in holo["matrix"]])
        assert np.linalg.norm(mat.conj().T @ mat - np.eye(2)) < 1e-12
        assert (out / "circular-n3_trajectory.png").stat().st_size > 0

    def test_trajectory_csv_columns(self, tmp_path):
        out = tmp_path / "o"
        run("simulate", "--preset", "circular-n3", "--out", str(out), "--no-figures")
        lines = read(out / "circular-n3_trajectory.csv").decode().splitlines()
        assert lines[0] == "t,xi,alpha,x_c,dx_c,a_c,da_c"
        first = [float(v) for v in lines[1].split(",")]
        assert first[1] == pytest.approx(1.0)  # xi(0) = xi0
        assert first[3] == pytest.approx(1.0)  # x_c(0) = xi0

    def test_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run("simulate", "--preset", "circular-n3", "--out", str(out), "--no-figures")
            run("contours", "--preset", "circular-n3", "--out", str(out), "--no-figures")
        for name in os.listdir(a):
            assert read(a / name) == read(b / name), name

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text(yaml.safe_dump({"profile": {"kind": "circular", "n": 3}}))
        out = tmp_path / "o"
        assert run("simulate", "-c", str(cfg), "--set", "profile.n=4",
                   "--out", str(out), "--prefix", "x", "--no-figures") == 0
        phases = json.loads(read(out / "x_phases.json"))
        assert phases["period_T"] == pytest.approx(8 * np.pi)

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        target = tmp_path / "redirected"
        monkeypatch.setenv("HOLOSPIN_OUTDIR", str(target))
        run("simulate", "--preset", "circular-n3", "--no-figures")
        assert (target / "circular-n3_phases.json").exists()

    def test_insb_preset_order_unity(self, tmp_path):
        out = tmp_path / "o"
        assert run("simulate", "--preset", "insb-square", "--out", str(out),
                   "--no-figures") == 0
        phases = json.loads(read(out / "insb-square_phases.json"))
        assert 0.5 <= abs(phases["phi_T"]) <= 2.0


class TestContours:
    def test_square_contour_is_unit_square(self, tmp_path):
        out = tmp_path / "o"
        run("contours", "--preset", "square-instantaneous", "--out", str(out),
            "--no-figures")
        data = np.genfromtxt(out / "square-instantaneous_C1.csv", delimiter=",",
                             names=True)
        assert data["xi"].min() == pytest.approx(0.0, abs=1e-12)
        assert data["xi"].max() == pytest.approx(1.0, abs=1e-12)
        assert data["a_c"].min() == pytest.approx(0.0, abs=1e-9)
        assert data["a_c"].max() == pytest.approx(1.0, abs=1e-9)

    def test_circular_adiabatic_contour_is_circle(self, tmp_path):
        out = tmp_path / "o"
        run("contours", "--preset", "circular-n3", "--out", str(out), "--no-figures")
        data = np.genfromtxt(out / "circular-n3_C_ad.csv", delimiter=",", names=True)
        r = data["xi"] ** 2 + data["alpha"] ** 2
        assert np.max(np.abs(r - 1.0)) < 1e-12

    def test_signed_area_equals_spin_phase(self, tmp_path, params):
        out = tmp_path / "o"
        run("contours", "--preset", "circular-n3", "--set", "profile.n=16",
            "--set", "solver.samples=8192", "--out", str(out), "--no-figures")
        data = np.genfromtxt(out / "circular-n3_C1.csv", delimiter=",", names=True)
        x, y = data["xi"], data["a_c"]
        area = 0.5 * np.sum((y[1:] + y[:-1]) * (x[1:] - x[:-1]))  # oint a_c dxi
        ref = closed_form_circular(16, 1.0, 1.0, params)
        assert area == pytest.approx(ref.phi_T, abs=1e-6)


class TestSweep:
    def test_circular_n_ratio_column(self, tmp_path):
        out = tmp_path / "o"
        assert run("sweep", "--preset", "circular-n3",
                   "--set", "sweep.variable=n", "--set", "sweep.start=2",
                   "--set", "sweep.stop=8", "--set", "sweep.count=7",
                   "--out", str(out), "--no-figures") == 0
        data = np.genfromtxt(out / "circular-n3_sweep.csv", delimiter=",", names=True)
        n = data["n"]
        ratio = data["phi_T"] / data["phi_ad"]
        assert np.allclose(ratio, n**2 / (n**2 - 1), rtol=1e-8)

    def test_broken_delay_sweep_sign_structure(self, tmp_path):
        out = tmp_path / "o"
        assert run("sweep", "--preset", "broken-ellipsoidal",
                   "--set", "sweep.count=33", "--out", str(out)) == 0
        data = np.genfromtxt(out / "broken-ellipsoidal_sweep.csv", delimiter=",",
                             names=True)
        # phases all vanish at delta_T = 2*T0 and change sign inside
        assert abs(data["phi_T"][-1]) < 1e-8
        assert data["sign_change_phi_T"].sum() >= 1
        assert (out / "broken-ellipsoidal_sweep.png").stat().st_size > 0


class TestVerifyAndErrors:
    def test_verify_passes_at_reduced_resolution(self, tmp_path):
        out = tmp_path / "o"
        code = run("verify", "--preset", "circular-n3", "--out", str(out),
                   "--set", "verify.grid_points=512",
                   "--set", "verify.steps_per_cycle=2048")
        assert code == 0
        report = json.loads(read(out / "circular-n3_verify.json"))
        assert report["all_passed"]
        names = {c["name"] for c in report["checks"]}
        assert {"oracle_fidelity", "spin_rotation", "strang_order"} <= names

    def test_verify_fails_with_coarse_steps(self, tmp_path):
        out = tmp_path / "o"
        code = run("verify", "--preset", "circular-n3", "--out", str(out),
                   "--set", "verify.grid_points=256",
                   "--set", "verify.steps_per_cycle=128",
                   "--set", "verify.order_steps=256")
        assert code == 3
        report = json.loads(read(out / "circular-n3_verify.json"))
        assert not report["all_passed"]

    def test_config_error_exit_code(self, tmp_path):
        assert run("simulate", "--preset", "circular-n3",
                   "--set", "profile.kind=nonsense", "--out", str(tmp_path)) == 2
        assert run("simulate", "-c", str(tmp_path / "missing.yaml")) == 2
        assert run("simulate", "--preset", "circular-n3",
                   "--set", "profile.n=1", "--out", str(tmp_path)) == 2

    def test_work_guard(self, tmp_path):
        assert run("verify", "--preset", "circular-n3", "--out", str(tmp_path),
                   "--set", "verify.max_work=1000") == 2


class TestUnits:
    def test_round_trip(self):
        u = UnitSystem.physical(0.015, 1.0)
        xi_s = u.to_scaled_length(200.0)
        assert xi_s * u.length_nm == pytest.approx(200.0, rel=1e-12)
        al_s = u.to_scaled_velocity(50.0)
        assert al_s * u.length_nm / u.time_ps == pytest.approx(50.0, rel=1e-12)
        e_s = u.to_scaled_energy(0.1)
        assert e_s * u.energy_mev == pytest.approx(0.1, rel=1e-12)

    def test_scaled_product_is_dimensionless_phase(self):
        # m*xi0*alpha0/hbar for the InSb numbers is of order one
        sc = build_scenario(preset="insb-square")
        assert sc.profile["xi0"] * sc.profile["alpha0"] == pytest.approx(1.2957, abs=2e-4)

    def test_physical_zeeman_key(self):
        sc = build_scenario(preset="insb-square", overrides=["params.zeeman_mev=0.1"])
        assert sc.params.zeeman == pytest.approx(0.1 / sc.units.energy_mev, rel=1e-12)


class TestNumericSolverThroughCLI:
    @pytest.mark.parametrize("method", ["rk4", "duhamel"])
    def test_simulate_with_numeric_solver(self, tmp_path, params, method):
        out = tmp_path / "o"
        assert run("simulate", "--preset", "circular-n3", "--out", str(out),
                   "--set", f"solver.method={method}", "--no-figures") == 0
        phases = json.loads(read(out / "circular-n3_phases.json"))
        ref = closed_form_circular(3, 1.0, 1.0, params)
        assert phases["phi_T"] == pytest.approx(ref.phi_T, rel=1e-6)
        assert phases["phi_a"] == pytest.approx(ref.phi_a, rel=1e-6)
