import numpy as np
import pytest

from holospin import (
    InvalidParam,
    PhysicalParams,
    ResonantDriving,
    make_broken_ellipsoidal,
    make_circular,
    make_fourier,
    make_sequential_square,
    make_tabulated,
)
from tests.conftest import T0


class TestCircular:
    def test_values_and_period(self, params):
        prof = make_circular(params, 1.0, 1.0, 3)
        assert prof.period_T == pytest.approx(6 * np.pi, abs=0)
        e = prof.eval(0.0)
        assert e.xi == pytest.approx(1.0)
        assert e.alpha == pytest.approx(0.0)
        assert e.dxi_dt == pytest.approx(0.0)
        assert e.dalpha_dt == pytest.approx(1.0 / 3.0)

    def test_zero_amplitudes(self, params):
        prof = make_circular(params, 0.0, 0.0, 2)
        for t in np.linspace(0, prof.period_T, 17):
            e = prof.eval(t)
            assert e.xi == 0.0 and e.alpha == 0.0

    def test_quarter_period_of_slow_angle(self, params):
        prof = make_circular(params, 1.0, 1.0, 4)
        assert prof.eval(2 * np.pi).xi == pytest.approx(np.cos(np.pi / 2), abs=1e-15)

    def test_circle_identity(self, params, rng):
        prof = make_circular(params, 0.7, 1.3, 5)
        for t in rng.uniform(0, prof.period_T, 50):
            e = prof.eval(t)
            assert (e.xi / 0.7) ** 2 + (e.alpha / 1.3) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_rejects_resonant_and_bad_input(self, params):
        with pytest.raises(ResonantDriving):
            make_circular(params, 1.0, 1.0, 1)
        with pytest.raises(InvalidParam):
            make_circular(params, 1.0, 1.0, 2.5)
        with pytest.raises(InvalidParam):
            make_circular(params, np.nan, 1.0, 3)


class TestSequentialSquare:
    def test_cycle_times(self, params):
        assert make_sequential_square(params, 1, 1, "sinusoidal").period_T == pytest.approx(12 * np.pi)
        assert make_sequential_square(params, 1, 1, "instantaneous").period_T == pytest.approx(4 * np.pi)

    def test_zero_driving_any_ramp(self, params):
        for ramp in ("sinusoidal", "instantaneous"):
            prof = make_sequential_square(params, 0.0, 0.0, ramp)
            for t in np.linspace(0, prof.period_T, 23):
                e = prof.eval(t)
                assert e.xi == 0.0 and e.alpha == 0.0

    def test_sinusoidal_legs_reach_amplitudes(self, params):
        prof = make_sequential_square(params, 2.0, 0.5, "sinusoidal")
        leg = prof.period_T / 4
        assert prof.eval(leg).xi == pytest.approx(2.0)
        assert prof.eval(2 * leg).alpha == pytest.approx(0.5)
        assert prof.eval(3 * leg).xi == pytest.approx(0.0, abs=1e-15)

    def test_instantaneous_jump_flag_and_right_limit(self, params):
        prof = make_sequential_square(params, 1.0, 1.0, "instantaneous")
        e0 = prof.eval(0.0)
        assert e0.at_jump
        assert e0.xi == pytest.approx(0.5)  # right limit of the opening jump
        leg = prof.period_T / 4
        e1 = prof.eval(leg)
        assert e1.at_jump and e1.xi == pytest.approx(1.0)
        mid = prof.eval(0.5 * leg)
        assert not mid.at_jump

    def test_alpha_offset(self, params):
        prof = make_sequential_square(params, 1.0, 1.0, "sinusoidal", alpha1=0.25)
        assert prof.eval(0.0).alpha == pytest.approx(0.25)
        assert prof.eval(prof.period_T / 2).alpha == pytest.approx(1.0)


class TestBrokenEllipsoidal:
    def test_disjoint_supports_at_max_delay(self, params):
        prof = make_broken_ellipsoidal(params, 1.0, 1.0, 2 * T0)
        t = np.linspace(0, prof.period_T, 4001)
        xi = np.array([prof.eval(x).xi for x in t])
        al = np.array([prof.eval(x).alpha for x in t])
        assert np.all((np.abs(xi) < 1e-15) | (np.abs(al) < 1e-15))
        assert np.max(np.abs(xi)) > 0.9 and np.max(np.abs(al)) > 0.9

    def test_zero_delay_proportional(self, params):
        prof = make_broken_ellipsoidal(params, 2.0, 0.5, 0.0)
        for t in np.linspace(0, prof.period_T, 101):
            e = prof.eval(t)
            assert e.alpha == pytest.approx(0.25 * e.xi, abs=1e-14)

    def test_shift_identity(self, params, rng):
        dT = T0 / 4
        prof = make_broken_ellipsoidal(params, 1.0, 1.0, dT)
        for t in rng.uniform(0, 2 * T0, 40):
            assert prof.eval(t + dT).alpha == pytest.approx(prof.eval(t).xi, abs=1e-12)

    def test_closed_form_point(self, params):
        # delta_T = T0, t = 2.5*T0: xi support has ended, alpha is the
        # delayed sine at phase 3*pi/2
        prof = make_broken_ellipsoidal(params, 1.0, 1.0, T0)
        e = prof.eval(2.5 * T0)
        assert e.xi == pytest.approx(0.0, abs=1e-15)
        assert e.alpha == pytest.approx(np.sin(0.5 * (2.5 * T0 - T0)), abs=1e-12)
        assert e.alpha == pytest.approx(-1.0)

    def test_delay_range_checked(self, params):
        with pytest.raises(InvalidParam):
            make_broken_ellipsoidal(params, 1, 1, -0.1)
        with pytest.raises(InvalidParam):
            make_broken_ellipsoidal(params, 1, 1, 2 * T0 + 0.1)


class TestEvalGeneric:
    @pytest.mark.parametrize("build", [
        lambda p: make_circular(p, 1.0, 0.8, 3),
        lambda p: make_sequential_square(p, 1.0, 1.0, "sinusoidal"),
        lambda p: make_sequential_square(p, 1.0, 1.0, "instantaneous"),
        lambda p: make_broken_ellipsoidal(p, 1.0, 1.0, T0 / 4),
        lambda p: make_fourier(p, 2 * np.pi, xi_cos=[0, 0.5], alpha_sin=[0, 0, 0.2]),
    ])
    def test_periodicity(self, params, rng, build):
        prof = build(params)
        T = prof.period_T
        jumps = [j.t for j in prof.jumps]
        count = 0
        while count < 100:
            t = rng.uniform(0, T)
            if any(abs(t - tj) < 1e-6 * T for tj in jumps):
                continue
            a, b = prof.eval(t), prof.eval(t + T)
            assert a.xi == pytest.approx(b.xi, abs=1e-12)
            assert a.alpha == pytest.approx(b.alpha, abs=1e-12)
            count += 1

    @pytest.mark.parametrize("build", [
        lambda p: make_circular(p, 1.0, 0.8, 3),
        lambda p: make_sequential_square(p, 1.0, 1.0, "sinusoidal"),
        lambda p: make_broken_ellipsoidal(p, 1.0, 1.0, T0 / 4),
    ])
    def test_derivative_consistency(self, params, rng, build):
        prof = build(params)
        T = prof.period_T
        bounds = prof.boundaries
        h = 1e-6 * T
        count = 0
        while count < 30:
            t = rng.uniform(0.01 * T, 0.99 * T)
            if any(abs(t - b) < 10 * h for b in bounds):
                continue
            e = prof.eval(t)
            dxi_fd = (prof.eval(t + h).xi - prof.eval(t - h).xi) / (2 * h)
            dal_fd = (prof.eval(t + h).alpha - prof.eval(t - h).alpha) / (2 * h)
            assert dxi_fd == pytest.approx(e.dxi_dt, rel=1e-6, abs=1e-6)
            assert dal_fd == pytest.approx(e.dalpha_dt, rel=1e-6, abs=1e-6)
            count += 1

    def test_eval_rejects_non_finite_time(self, params):
        prof = make_circular(params, 1.0, 1.0, 3)
        with pytest.raises(InvalidParam):
            prof.eval(np.inf)


class TestFourierAndTabulated:
    def test_fourier_series_values(self, params):
        prof = make_fourier(params, 4.0, xi_const=0.1, xi_cos=[0.2], alpha_sin=[0.0, 0.3])
        t = 0.7
        base = 2 * np.pi / 4.0
        e = prof.eval(t)
        assert e.xi == pytest.approx(0.1 + 0.2 * np.cos(base * t))
        assert e.alpha == pytest.approx(0.3 * np.sin(2 * base * t))
        assert e.dxi_dt == pytest.approx(-0.2 * base * np.sin(base * t))

    def test_tabulated_interpolation(self, params):
        t = np.linspace(0.0, 2 * np.pi, 257)
        xi = np.sin(t)
        al = 0.5 * (np.cos(t) - 1.0)
        prof = make_tabulated(params, t, xi, al)
        e = prof.eval(0.5 * (t[3] + t[4]))
        assert e.xi == pytest.approx(0.5 * (xi[3] + xi[4]), abs=1e-12)
        # derivative within table accuracy
        assert e.dxi_dt == pytest.approx(np.cos(0.5 * (t[3] + t[4])), abs=1e-3)

    def test_tabulated_requires_periodic_samples(self, params):
        t = np.linspace(0.0, 1.0, 65)
        with pytest.raises(InvalidParam):
            make_tabulated(params, t, t, np.zeros_like(t))  # xi(0) != xi(T)


def test_params_validation():
    with pytest.raises(InvalidParam):
        PhysicalParams(m_star=-1.0)
    with pytest.raises(InvalidParam):
        PhysicalParams(omega=0.0)
    with pytest.raises(InvalidParam):
        PhysicalParams(n_axis=(1.0, 1.0, 0.0))
    with pytest.raises(InvalidParam):
        PhysicalParams(level_m=-1)
    p = PhysicalParams(level_m=2)
    assert p.omega_m == pytest.approx(2.5)
