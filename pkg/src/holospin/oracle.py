"""Independent grid-based verification of the analytic solution.

In the eigenbasis of n.sigma the two-component Schroedinger problem
decouples into scalar Hamiltonians

    H_pm = p^2/(2 m) + (m omega^2/2)(x - xi(t))^2  +-  alpha(t) p  -+  g,

(g the optional Zeeman energy along n), which this module integrates
directly with second-order Strang splitting on a uniform position grid:
half step of the kinetic+spin-orbit phase in momentum space, full
potential step in position space, second kinetic half step, with xi and
alpha evaluated at the step midpoint.

The same module constructs the exact states by applying the analytic
unitary transformations to oscillator eigenstates, so the split-step
evolution and the closed-form evolution can be compared by fidelity.
All translations and momentum boosts are spectral (phase ramps in the
conjugate space), which requires the state to stay clear of the box
boundary; that is enforced by a boundary-leak check rather than by
absorbing layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_hermite

from .driving import DrivingProfile
from .errors import GridMismatch, GridTooSmall, InvalidParam, NormDrift
from .params import PhysicalParams
from .phases import accumulated_phases
from .response import ResponseTrajectory, solve_analytic

DEFAULT_GRID_POINTS = 1024
DEFAULT_STEPS_PER_CYCLE = 8192
BOUNDARY_LEAK_TOL = 1e-12
NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """Uniform position grid; half_width=None applies the sizing rule
    L >= max|x_c| + max|da_c|/omega^2 + 8 oscillator lengths."""

    n_points: int = DEFAULT_GRID_POINTS
    half_width: float | None = None

    def __post_init__(self):
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise InvalidParam(f"n_points must be a power of two >= 16, got {n}")


@dataclass
class SpinorGridState:
    """Two-component wavefunction on a uniform grid.

    psi_up / psi_down are the components along the n.sigma = +1 / -1
    eigenspinors (not the lab z-basis).
    """

    x: np.ndarray = field(repr=False)
    psi_up: np.ndarray = field(repr=False)
    psi_down: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def half_width(self) -> float:
        return float(-self.x[0])

    @property
    def norm(self) -> float:
        dens = np.abs(self.psi_up) ** 2 + np.abs(self.psi_down) ** 2
        return float(np.sqrt(np.sum(dens) * self.dx))

    @property
    def components(self) -> np.ndarray:
        return np.vstack([self.psi_up, self.psi_down])

    def copy(self) -> "SpinorGridState":
        return SpinorGridState(self.x, self.psi_up.copy(), self.psi_down.copy())

    def check_boundary(self, tol: float = BOUNDARY_LEAK_TOL) -> None:
        dens = np.abs(self.psi_up) ** 2 + np.abs(self.psi_down) ** 2
        peak = float(np.max(dens))
        if peak == 0.0:
            return
        edge = max(float(dens[0]), float(dens[-1]))
        if edge > tol * peak:
            raise GridTooSmall(
                f"boundary density {edge:.3g} exceeds {tol:.1g} of the peak "
                f"{peak:.3g}; enlarge the box"
            )


def auto_half_width(traj: ResponseTrajectory, params: PhysicalParams) -> float:
    """Box size covering both translations plus Gaussian tails."""
    w2 = traj.omega**2
    reach = float(np.max(np.abs(traj.x_c))) + float(np.max(np.abs(traj.da_c))) / w2
    tails = (8.0 + 4.0 * params.level_m) * params.oscillator_length
    return reach + tails


def make_grid(spec: GridSpec, traj: ResponseTrajectory, params: PhysicalParams) -> np.ndarray:
    half = spec.half_width if spec.half_width is not None else auto_half_width(traj, params)
    n = spec.n_points
    return -half + (2.0 * half / n) * np.arange(n)


def oscillator_eigenstate(m: int, x: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Hermite-Gaussian psi_m of the trap at the origin, grid-normalized."""
    if m < 0 or int(m) != m:
        raise InvalidParam(f"level m must be a non-negative integer, got {m}")
    s = math.sqrt(params.m_star * params.omega)  # inverse oscillator length
    y = s * x
    log_norm = 0.25 * math.log(s * s / math.pi) - 0.5 * (
        m * math.log(2.0) + math.lgamma(m + 1)
    )
    psi = math.exp(log_norm) * eval_hermite(int(m), y) * np.exp(-0.5 * y * y)
    dx = x[1] - x[0]
    psi = psi / math.sqrt(float(np.sum(np.abs(psi) ** 2) * dx))
    return psi.astype(complex)


def _k_grid(x: np.ndarray) -> np.ndarray:
    return 2.0 * math.pi * np.fft.fftfreq(x.size, d=x[1] - x[0])


def _translate(components: np.ndarray, k: np.ndarray, shifts) -> np.ndarray:
    """Spectral translation of each component by its own shift."""
    spec = np.fft.fft(components, axis=1)
    ramp = np.exp(-1j * np.outer(shifts, k))
    return np.fft.ifft(spec * ramp, axis=1)


def _response_at(traj: ResponseTrajectory, t: float):
    if traj.evaluator is not None:
        x, dx, a, da = traj.evaluator(np.array([t]))
        return float(x[0]), float(dx[0]), float(a[0]), float(da[0])
    return (
        float(np.interp(t, traj.t, traj.x_c)),
        float(np.interp(t, traj.t, traj.dx_c)),
        float(np.interp(t, traj.t, traj.a_c)),
        float(np.interp(t, traj.t, traj.da_c)),
    )


def apply_u_dagger(
    state: SpinorGridState,
    t: float,
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
) -> SpinorGridState:
    """Apply the exact transformation U+(t) to a reference state.

    The factors act right to left: translate by x_c(t), momentum boost
    exp(i m (x - x_c) dx_c), action phase exp(-i phi_xi); then per spin
    component with sign s = +-1: position phase exp(-i s m x a_c),
    translation by s*da_c/omega^2, and the global phases from phi_alpha,
    m*da_c*a_c/omega^2 and -s*phi(t).
    """
    m = params.m_star
    w2 = params.omega**2
    x_c, dx_c, a_c, da_c = _response_at(traj, t)
    phi_xi, phi_alpha, phi_t = accumulated_phases(traj, profile, params, t)

    x = state.x
    k = _k_grid(x)
    comps = state.components
    signs = np.array([1.0, -1.0])

    # X_xi: same translation and boost for both components
    comps = _translate(comps, k, (x_c, x_c))
    comps = comps * np.exp(1j * m * (x - x_c) * dx_c)[None, :]
    comps = comps * np.exp(-1j * phi_xi)

    # A_alpha: sign-dependent position phase, translation and phases
    comps = comps * np.exp(-1j * np.outer(signs * m * a_c, x))
    comps = _translate(comps, k, signs * da_c / w2)
    global_phase = phi_alpha + m * da_c * a_c / w2
    comps = comps * np.exp(-1j * (global_phase + signs * phi_t))[:, None]

    out = SpinorGridState(x, comps[0], comps[1])
    out.check_boundary()
    return out


def eigenstate_initial(
    m: int,
    s: float,
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    grid: GridSpec = GridSpec(),
) -> SpinorGridState:
    """Exact eigenstate of H(0): U+(0) applied to psi_m x chi_s.

    s = +0.5 selects the n.sigma = +1 spinor, s = -0.5 the other one.
    """
    if s not in (0.5, -0.5):
        raise InvalidParam(f"spin s must be +0.5 or -0.5, got {s}")
    x = make_grid(grid, traj, params)
    psi_m = oscillator_eigenstate(m, x, params)
    zero = np.zeros_like(psi_m)
    ref = SpinorGridState(x, psi_m if s > 0 else zero, zero if s > 0 else psi_m)
    return apply_u_dagger(ref, 0.0, traj, profile, params)


def superposition_initial(
    m: int,
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    grid: GridSpec = GridSpec(),
) -> SpinorGridState:
    """U+(0) applied to psi_m x (chi_plus + chi_minus)/sqrt(2)."""
    x = make_grid(grid, traj, params)
    psi_m = oscillator_eigenstate(m, x, params) / math.sqrt(2.0)
    ref = SpinorGridState(x, psi_m, psi_m.copy())
    return apply_u_dagger(ref, 0.0, traj, profile, params)


def analytic_state(
    ref: SpinorGridState,
    t: float,
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
) -> SpinorGridState:
    """Exact time-evolved state e^{-i omega_ms t} U+(t) |psi_m chi_s>.

    `ref` is the untransformed reference psi_m x spinor; the Zeeman
    splitting enters through omega_ms = omega_m -+ g for s = +-1/2.
    """
    st = apply_u_dagger(ref, t, traj, profile, params)
    g = params.zeeman_or_zero
    st.psi_up = st.psi_up * np.exp(-1j * (params.omega_m - g) * t)
    st.psi_down = st.psi_down * np.exp(-1j * (params.omega_m + g) * t)
    return st


def evolve_split_step(
    profile: DrivingProfile,
    params: PhysicalParams,
    state0: SpinorGridState,
    dt: float,
    t_final: float,
    checkpoints=None,
    check_every: int = 256,
) -> SpinorGridState | tuple[SpinorGridState, list[SpinorGridState]]:
    """Strang split-step evolution of the full Hamiltonian from t = 0.

    Momentum half step exp(-i (k^2/2m + s*alpha*k) dt/2), position step
    exp(-i ((m w^2/2)(x - xi)^2 - s*g) dt), momentum half step, with the
    drivings evaluated at each step midpoint.  Steps must align with the
    jump times of step profiles.  With `checkpoints` (times that are
    multiples of dt), returns (final_state, states_at_checkpoints).
    """
    n_steps = t_final / dt
    if abs(n_steps - round(n_steps)) > 1e-9 * max(n_steps, 1.0):
        raise InvalidParam(f"dt = {dt} does not divide t_final = {t_final}")
    n_steps = int(round(n_steps))
    for j in profile.jumps:
        aligned = (j.t / dt) % 1.0
        if min(aligned, 1.0 - aligned) > 1e-9:
            raise InvalidParam(
                f"step profile jump at t = {j.t:.6g} does not sit on the dt grid"
            )

    want = []
    if checkpoints is not None:
        for tc in checkpoints:
            idx = tc / dt
            if abs(idx - round(idx)) > 1e-9 * max(idx, 1.0):
                raise InvalidParam(f"checkpoint {tc} is not a multiple of dt")
            want.append(int(round(idx)))

    x = state0.x
    k = _k_grid(x)
    m = params.m_star
    w2 = params.omega**2
    g = params.zeeman_or_zero
    signs = np.array([[1.0], [-1.0]])
    kinetic = (k * k / (2.0 * m))[None, :]

    comps = state0.components.copy()
    norm0 = state0.norm
    captured = {}
    if 0 in want:
        captured[0] = SpinorGridState(x, comps[0].copy(), comps[1].copy())

    for step in range(n_steps):
        tm = profile.reduce_time((step + 0.5) * dt)
        seg = profile.segment_at(tm)
        xi_m = float(seg.xi(np.asarray(tm)))
        al_m = float(seg.alpha(np.asarray(tm)))

        half_k = np.exp(-0.5j * dt * (kinetic + signs * al_m * k[None, :]))
        v_step = np.exp(-1j * dt * (0.5 * m * w2 * (x - xi_m) ** 2)[None, :] + 1j * dt * signs * g)

        comps = np.fft.ifft(half_k * np.fft.fft(comps, axis=1), axis=1)
        comps = v_step * comps
        comps = np.fft.ifft(half_k * np.fft.fft(comps, axis=1), axis=1)

        done = step + 1
        if done in want:
            captured[done] = SpinorGridState(x, comps[0].copy(), comps[1].copy())
        if done % check_every == 0 or done == n_steps:
            st = SpinorGridState(x, comps[0], comps[1])
            if abs(st.norm - norm0) > NORM_DRIFT_TOL:
                raise NormDrift(
                    f"norm drifted to {st.norm!r} from {norm0!r} after {done} steps"
                )
            st.check_boundary()

    final = SpinorGridState(x, comps[0], comps[1])
    if checkpoints is not None:
        return final, [captured[i] for i in want]
    return final


def fidelity(a: SpinorGridState, b: SpinorGridState) -> tuple[float, float]:
    """Complex overlap <a|b> by grid quadrature, as (magnitude, phase)."""
    if a.x.size != b.x.size or not np.allclose(a.x, b.x):
        raise GridMismatch("states live on different grids")
    z = np.sum(np.conj(a.psi_up) * b.psi_up + np.conj(a.psi_down) * b.psi_down) * a.dx
    return float(np.abs(z)), float(np.angle(z))


def component_overlap(a: SpinorGridState, b: SpinorGridState, component: str) -> complex:
    """Scalar overlap of one spin component (not normalized)."""
    if a.x.size != b.x.size or not np.allclose(a.x, b.x):
        raise GridMismatch("states live on different grids")
    ca = a.psi_up if component == "up" else a.psi_down
    cb = b.psi_up if component == "up" else b.psi_down
    return complex(np.sum(np.conj(ca) * cb) * a.dx)


def position_expectation(state: SpinorGridState, component: str | None = None) -> float:
    if component == "up":
        dens = np.abs(state.psi_up) ** 2
    elif component == "down":
        dens = np.abs(state.psi_down) ** 2
    else:
        dens = np.abs(state.psi_up) ** 2 + np.abs(state.psi_down) ** 2
    w = float(np.sum(dens) * state.dx)
    return float(np.sum(state.x * dens) * state.dx / w)


def momentum_expectation(state: SpinorGridState, component: str) -> float:
    k = _k_grid(state.x)
    psi = state.psi_up if component == "up" else state.psi_down
    spec = np.fft.fft(psi)
    w = float(np.sum(np.abs(spec) ** 2))
    return float(np.sum(k * np.abs(spec) ** 2) / w)


def wrap_angle(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    out = math.remainder(theta, 2.0 * math.pi)
    if out <= -math.pi:
        out += 2.0 * math.pi
    return out


def extract_spin_rotation(
    profile: DrivingProfile,
    params: PhysicalParams,
    grid: GridSpec = GridSpec(),
    dt: float | None = None,
    traj: ResponseTrajectory | None = None,
) -> float:
    """Measure the cycle spin-rotation phase 2*phi_T from the oracle.

    Evolves U+(0)[psi_m x (chi_+ + chi_-)/sqrt(2)] through one cycle,
    projects each component back onto the t = 0 Kramers state, and reads
    the relative phase (Zeeman-corrected).  Returns 2*phi_T reduced to
    (-pi, pi].
    """
    T = profile.period_T
    if dt is None:
        dt = T / DEFAULT_STEPS_PER_CYCLE
    if traj is None:
        traj = solve_analytic(profile)
    state0 = superposition_initial(params.level_m, traj, profile, params, grid)
    final = evolve_split_step(profile, params, state0, dt, T)
    c_up = component_overlap(state0, final, "up")
    c_dn = component_overlap(state0, final, "down")
    rel = np.angle(c_up * np.conj(c_dn))
    return wrap_angle(2.0 * params.zeeman_or_zero * T - rel)
