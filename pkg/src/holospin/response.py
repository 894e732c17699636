"""Classical responses x_c(t) and a_c(t) of the two driven oscillators.

Both responses obey the same undamped equation of motion,

    d2x_c/dt2 + omega^2 * x_c = omega^2 * xi(t),
    d2a_c/dt2 + omega^2 * a_c = omega^2 * alpha(t),

and together with the drivings they determine the full quantum evolution.
This module produces dense sampled trajectories over one cycle, either
from exact closed forms (all built-in families) or numerically (RK4 with
interval splits at segment boundaries, or the Duhamel sine-kernel
convolution), plus the periodic initial values and cyclicity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson

from .driving import DrivingProfile, ProfileKind, Ramp
from .errors import (
    InvalidParam,
    NonCyclicTrajectory,
    ResonantMode,
    StepTooLarge,
    UnsupportedProfile,
)

DEFAULT_SAMPLES = 4096

# |omega - 2*pi*k/T| below this (relative to omega) counts as resonant.
RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class ResponseTrajectory:
    """Sampled responses on a uniform grid over one cycle [0, T].

    `evaluator`, when present, maps an array of times to exact
    (x_c, dx_c, a_c, da_c) tuples and is what the phase quadratures
    prefer; the sampled arrays are the export/plot representation.
    """

    t: np.ndarray
    x_c: np.ndarray
    dx_c: np.ndarray
    a_c: np.ndarray
    da_c: np.ndarray
    period_T: float
    ic: tuple[float, float, float, float]
    source: str  # "analytic" | "numeric"
    omega: float
    boundaries: tuple[float, ...]
    xi_scale: float
    alpha_scale: float
    evaluator: Callable | None = field(default=None, repr=False)

    @property
    def samples(self) -> int:
        return self.t.size - 1


class CyclicReport(NamedTuple):
    ok: bool
    residuals: dict[str, float]


# ----------------------------------------------------------------------
# Canonical closed-form responses
# ----------------------------------------------------------------------

def canonical_ic(profile: DrivingProfile) -> tuple[float, float, float, float]:
    """Initial values of the canonical periodic response of a family.

    Circular starts on the driving, (x_c, dx_c, a_c, da_c)(0) =
    (xi0, 0, 0, 0); the pulsed families start from rest at zero (the
    square loop with an alpha offset starts at a_c = alpha1).  Fourier
    profiles start on the periodic particular solution.
    """
    kind = profile.kind
    if kind is ProfileKind.CIRCULAR:
        return (profile.meta["xi0"], 0.0, 0.0, 0.0)
    if kind is ProfileKind.BROKEN_ELLIPSOIDAL:
        return (0.0, 0.0, 0.0, 0.0)
    if kind is ProfileKind.SEQUENTIAL_SQUARE:
        return (0.0, 0.0, profile.meta["alpha1"], 0.0)
    if kind is ProfileKind.FOURIER:
        fn = _fourier_fns(profile)[0]
        x, dx, a, da = fn(np.array([0.0]))
        return (float(x[0]), float(dx[0]), float(a[0]), float(da[0]))
    raise UnsupportedProfile(f"no canonical closed form for {kind.value} profiles")


def _fourier_gains(profile):
    """Off-resonance transfer factors H_k = w^2/(w^2 - (k*W0)^2) per mode."""
    w = profile.omega
    base = 2.0 * math.pi / profile.period_T

    def gains(cos_c, sin_c, what):
        out = []
        for k in range(1, max(len(cos_c), len(sin_c)) + 1):
            wk = k * base
            if abs(wk - w) < RESONANCE_TOL * w:
                c = cos_c[k - 1] if k <= len(cos_c) else 0.0
                s = sin_c[k - 1] if k <= len(sin_c) else 0.0
                if abs(c) > 0.0 or abs(s) > 0.0:
                    raise ResonantMode(k, f"{what} drives the oscillator on resonance (mode {k})")
                out.append(0.0)
            else:
                out.append(w * w / (w * w - wk * wk))
        return out

    m = profile.meta
    return (
        gains(m["xi_cos"], m["xi_sin"], "xi"),
        gains(m["alpha_cos"], m["alpha_sin"], "alpha"),
    )


def _fourier_fns(profile):
    base = 2.0 * math.pi / profile.period_T
    m = profile.meta
    g_xi, g_al = _fourier_gains(profile)

    def series_resp(const, cos_c, sin_c, gains):
        def value(t):
            out = np.full_like(t, const)
            dout = np.zeros_like(t)
            for k in range(1, len(gains) + 1):
                wk = k * base
                h = gains[k - 1]
                c = cos_c[k - 1] if k <= len(cos_c) else 0.0
                s = sin_c[k - 1] if k <= len(sin_c) else 0.0
                out = out + h * (c * np.cos(wk * t) + s * np.sin(wk * t))
                dout = dout + h * wk * (-c * np.sin(wk * t) + s * np.cos(wk * t))
            return out, dout

        return value

    x_fn = series_resp(m["xi_const"], m["xi_cos"], m["xi_sin"], g_xi)
    a_fn = series_resp(m["alpha_const"], m["alpha_cos"], m["alpha_sin"], g_al)

    def resp(t):
        t = np.asarray(t, dtype=float)
        x, dx = x_fn(t)
        a, da = a_fn(t)
        return x, dx, a, da

    return [resp]


def _circular_fns(profile):
    w = profile.omega
    n = profile.meta["n_cycles"]
    xi0 = profile.meta["xi0"]
    a0 = profile.meta["alpha0"]
    nu = w / n
    den = n * n - 1.0

    def resp(t):
        t = np.asarray(t, dtype=float)
        x = xi0 * (n * n * np.cos(nu * t) - np.cos(w * t)) / den
        dx = xi0 * w * (-n * np.sin(nu * t) + np.sin(w * t)) / den
        a = a0 * n * (n * np.sin(nu * t) - np.sin(w * t)) / den
        da = a0 * n * w * (np.cos(nu * t) - np.cos(w * t)) / den
        return x, dx, a, da

    return [resp for _ in profile.segments]


def _broken_fns(profile):
    w = profile.omega
    xi0 = profile.meta["xi0"]
    a0 = profile.meta["alpha0"]
    dT = profile.meta["delta_T"]
    T0 = 2.0 * math.pi / w

    def pulse(t):
        t = np.asarray(t, dtype=float)
        return (2.0 / 3.0) * (2.0 * np.sin(0.5 * w * t) - np.sin(w * t))

    def dpulse(t):
        t = np.asarray(t, dtype=float)
        return (2.0 / 3.0) * w * (np.cos(0.5 * w * t) - np.cos(w * t))

    def make(seg):
        tm = 0.5 * (seg.t0 + seg.t1)
        xi_on = tm <= 2 * T0
        al_on = tm >= dT

        def resp(t):
            t = np.asarray(t, dtype=float)
            z = np.zeros_like(t)
            x = xi0 * pulse(t) if xi_on else z
            dx = xi0 * dpulse(t) if xi_on else z
            a = a0 * pulse(t - dT) if al_on else z
            da = a0 * dpulse(t - dT) if al_on else z
            return x, dx, a, da

        return resp

    return [make(seg) for seg in profile.segments]


def _square_fns(profile):
    w = profile.omega
    xi0 = profile.meta["xi0"]
    a0 = profile.meta["alpha0"]
    a1 = profile.meta["alpha1"]
    ramp = Ramp(profile.meta["ramp"])
    leg = profile.period_T / 4.0

    if ramp is Ramp.SINUSOIDAL:
        slow = w / 3.0

        def r_up(t):
            return 0.5 - (9.0 / 16.0) * np.cos(slow * t) + (1.0 / 16.0) * np.cos(w * t)

        def dr_up(t):
            return (9.0 / 16.0) * slow * np.sin(slow * t) - (1.0 / 16.0) * w * np.sin(w * t)

    else:

        def r_up(t):
            return 0.5 * (1.0 - np.cos(w * t))

        def dr_up(t):
            return 0.5 * w * np.sin(w * t)

    def r_dn(t):
        return 1.0 - r_up(t)

    def dr_dn(t):
        return -dr_up(t)

    def leg_resp(x_fn, dx_fn, a_fn, da_fn, t_off):
        def resp(t):
            tl = np.asarray(t, dtype=float) - t_off
            z = np.zeros_like(tl)
            return (
                x_fn(tl) + z,
                dx_fn(tl) + z,
                a_fn(tl) + z,
                da_fn(tl) + z,
            )

        return resp

    da_amp = a0 - a1
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return [
        leg_resp(lambda t: xi0 * r_up(t), lambda t: xi0 * dr_up(t),
                 lambda t: a1 + zero(t), zero, 0.0),
        leg_resp(lambda t: xi0 + zero(t), zero,
                 lambda t: a1 + da_amp * r_up(t), lambda t: da_amp * dr_up(t), leg),
        leg_resp(lambda t: xi0 * r_dn(t), lambda t: xi0 * dr_dn(t),
                 lambda t: a0 + zero(t), zero, 2 * leg),
        leg_resp(zero, zero,
                 lambda t: a1 + da_amp * r_dn(t), lambda t: da_amp * dr_dn(t), 3 * leg),
    ]


def analytic_evaluator(profile: DrivingProfile, ic=None) -> Callable:
    """Exact response evaluator t -> (x_c, dx_c, a_c, da_c).

    With `ic` given, the difference from the canonical initial values is
    carried by an exact homogeneous solution A*cos(omega*t)+B*sin(omega*t)
    added on top of the canonical periodic response (this is still an
    exact solution of the equations of motion; it is periodic only when
    omega*T is a multiple of 2*pi).
    """
    kind = profile.kind
    if kind is ProfileKind.CIRCULAR:
        fns = _circular_fns(profile)
    elif kind is ProfileKind.BROKEN_ELLIPSOIDAL:
        fns = _broken_fns(profile)
    elif kind is ProfileKind.SEQUENTIAL_SQUARE:
        fns = _square_fns(profile)
    elif kind is ProfileKind.FOURIER:
        fns = _fourier_fns(profile)
    else:
        raise UnsupportedProfile(f"no closed-form response for {kind.value} profiles")

    w = profile.omega
    T = profile.period_T
    starts = np.array([s.t0 for s in profile.segments])
    can_ic = canonical_ic(profile)
    if ic is None:
        hom = None
    else:
        ic = tuple(float(v) for v in ic)
        dx0 = ic[0] - can_ic[0]
        dv0 = ic[1] - can_ic[1]
        da0 = ic[2] - can_ic[2]
        dw0 = ic[3] - can_ic[3]
        if max(abs(dx0), abs(dv0), abs(da0), abs(dw0)) == 0.0:
            hom = None
        else:
            hom = (dx0, dv0, da0, dw0)

    def ev(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tr = t - np.floor(t / T) * T
        tr[tr >= T] -= T
        idx = np.clip(np.searchsorted(starts, tr, side="right") - 1, 0, len(fns) - 1)
        x = np.empty_like(tr)
        dx = np.empty_like(tr)
        a = np.empty_like(tr)
        da = np.empty_like(tr)
        for i, fn in enumerate(fns):
            m = idx == i
            if np.any(m):
                x[m], dx[m], a[m], da[m] = fn(tr[m])
        if hom is not None:
            c, s = np.cos(w * t), np.sin(w * t)
            x += hom[0] * c + (hom[1] / w) * s
            dx += -hom[0] * w * s + hom[1] * c
            a += hom[2] * c + (hom[3] / w) * s
            da += -hom[2] * w * s + hom[3] * c
        return x, dx, a, da

    return ev


def _build_trajectory(profile, t, arrays, ic, source, evaluator=None):
    x, dx, a, da = arrays
    return ResponseTrajectory(
        t=t,
        x_c=x,
        dx_c=dx,
        a_c=a,
        da_c=da,
        period_T=profile.period_T,
        ic=tuple(float(v) for v in ic),
        source=source,
        omega=profile.omega,
        boundaries=profile.boundaries,
        xi_scale=profile.xi_scale,
        alpha_scale=profile.alpha_scale,
        evaluator=evaluator,
    )


def solve_analytic(
    profile: DrivingProfile, samples: int = DEFAULT_SAMPLES, ic=None
) -> ResponseTrajectory:
    """Exact response trajectory from the family closed forms.

    Available for the circular, broken-ellipsoidal, sequential-square and
    Fourier families (the square legs are propagated with their exact
    homogeneous+particular solutions, Fourier profiles mode by mode).
    The default initial values are the canonical periodic ones; custom
    `ic` adds the exact homogeneous part on top.
    """
    if samples < 16:
        raise InvalidParam(f"need at least 16 samples, got {samples}")
    samples = int(samples) + (int(samples) % 2)  # Simpson wants even panels
    ev = analytic_evaluator(profile, ic=ic)
    t = np.linspace(0.0, profile.period_T, samples + 1)
    arrays = ev(t)
    used_ic = tuple(float(v[0]) for v in ev(np.array([0.0])))
    return _build_trajectory(profile, t, arrays, used_ic, "analytic", evaluator=ev)


# ----------------------------------------------------------------------
# Numeric solvers
# ----------------------------------------------------------------------

def _rk4_span(seg, w2, t0, t1, y, substeps):
    """Advance state [x, v, a, u] across [t0, t1] inside one smooth segment."""
    h = (t1 - t0) / substeps
    xi, al = seg.xi, seg.alpha

    def f(t, y):
        x, v, a, u = y
        return np.array(
            [v, w2 * (float(xi(t)) - x), u, w2 * (float(al(t)) - a)]
        )

    for i in range(substeps):
        t = t0 + i * h
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _solve_rk4(profile, ic, t):
    """Fixed-step RK4 that never integrates across a segment boundary."""
    w2 = profile.omega**2
    edges = profile.boundaries
    out = np.empty((t.size, 4))
    y = np.array(ic, dtype=float)
    out[0] = y
    for k in range(t.size - 1):
        ta, tb = t[k], t[k + 1]
        # interior segment edges split the step
        cuts = [e for e in edges if ta + 1e-12 < e < tb - 1e-12]
        pts = [ta] + cuts + [tb]
        for a, b in zip(pts[:-1], pts[1:]):
            seg = profile.segment_at(min(0.5 * (a + b), profile.period_T * (1 - 1e-15)))
            y = _rk4_span(seg, w2, a, b, y, 1)
        out[k + 1] = y
    return out[:, 0], out[:, 1], out[:, 2], out[:, 3]


def _solve_duhamel(profile, ic, t):
    """Convolution x_c = hom + omega * int sin(omega(t-tau)) xi(tau) dtau.

    The cumulative cosine/sine moments of the driving are accumulated
    with composite Simpson, split at the grid nodes nearest to each
    segment boundary.  Intended for smooth drivings; step profiles are
    handled exactly only when their jumps sit on grid nodes.
    """
    w = profile.omega
    starts = np.array([s.t0 for s in profile.segments])
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    # right-limit driving values on the grid
    xi = np.empty_like(t)
    al = np.empty_like(t)
    for i, seg in enumerate(profile.segments):
        m = idx == i
        if np.any(m):
            xi[m] = seg.xi(t[m])
            al[m] = seg.alpha(t[m])

    cw, sw = np.cos(w * t), np.sin(w * t)
    cut_nodes = sorted({int(round(b / (t[1] - t[0]))) for b in profile.boundaries})
    cut_nodes = [min(max(c, 0), t.size - 1) for c in cut_nodes]

    def cumulative(y):
        out = np.zeros_like(y)
        for a, b in zip(cut_nodes[:-1], cut_nodes[1:]):
            if b <= a:
                continue
            chunk = cumulative_simpson(y[a : b + 1], x=t[a : b + 1], initial=0.0)
            out[a : b + 1] = out[a] + chunk
        return out

    def particular(drive):
        C = cumulative(cw * drive)
        S = cumulative(sw * drive)
        x = w * (sw * C - cw * S)
        dx = w * w * (cw * C + sw * S)
        return x, dx

    xp, dxp = particular(xi)
    ap, dap = particular(al)
    x0, v0, a0, u0 = ic
    x = x0 * cw + (v0 / w) * sw + xp
    dx = -x0 * w * sw + v0 * cw + dxp
    a = a0 * cw + (u0 / w) * sw + ap
    da = -a0 * w * sw + u0 * cw + dap
    return x, dx, a, da


def residual_report(traj: ResponseTrajectory, profile: DrivingProfile) -> dict[str, float]:
    """Max scaled equation-of-motion residual by 5-point finite differences.

    Residual |x_c'' + omega^2 x_c - omega^2 xi| is evaluated at interior
    grid points at least two nodes away from any segment boundary and
    scaled by omega^2 * amplitude.
    """
    t = traj.t
    h = t[1] - t[0]
    w2 = traj.omega**2

    def second_derivative(y):
        d2 = np.full_like(y, np.nan)
        d2[2:-2] = (
            -y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]
        ) / (12 * h * h)
        return d2

    starts = np.array([s.t0 for s in profile.segments])
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    xi = np.empty_like(t)
    al = np.empty_like(t)
    for i, seg in enumerate(profile.segments):
        m = idx == i
        if np.any(m):
            xi[m] = seg.xi(t[m])
            al[m] = seg.alpha(t[m])

    ok = np.ones(t.size, dtype=bool)
    ok[:2] = ok[-2:] = False
    for b in traj.boundaries:
        ok &= np.abs(t - b) > 2.5 * h

    res_x = np.abs(second_derivative(traj.x_c) + w2 * traj.x_c - w2 * xi)
    res_a = np.abs(second_derivative(traj.a_c) + w2 * traj.a_c - w2 * al)
    sx = w2 * max(traj.xi_scale, float(np.max(np.abs(traj.x_c))) or 1.0)
    sa = w2 * max(traj.alpha_scale, float(np.max(np.abs(traj.a_c))) or 1.0)
    return {
        "x": float(np.max(res_x[ok]) / sx) if np.any(ok) else 0.0,
        "a": float(np.max(res_a[ok]) / sa) if np.any(ok) else 0.0,
    }


def solve_numeric(
    profile: DrivingProfile,
    ic,
    dt: float,
    method: str = "rk4",
    residual_tol: float = 1e-3,
) -> ResponseTrajectory:
    """Numerical response trajectory on a uniform grid with step dt.

    dt must divide the period exactly so the grid lands on T.  RK4
    integrates the first-order system, splitting every step at segment
    boundaries; Duhamel evaluates the sine-kernel convolution with the
    homogeneous part added.  Raises StepTooLarge when the
    finite-difference equation-of-motion residual exceeds residual_tol.
    """
    T = profile.period_T
    n = T / dt
    if abs(n - round(n)) > 1e-9 * max(n, 1.0):
        raise InvalidParam(f"dt = {dt} does not divide the period T = {T}")
    n = int(round(n))
    if n < 8:
        raise InvalidParam(f"need at least 8 steps per cycle, got {n}")
    t = np.linspace(0.0, T, n + 1)
    ic = tuple(float(v) for v in ic)

    if method == "rk4":
        arrays = _solve_rk4(profile, ic, t)
    elif method == "duhamel":
        arrays = _solve_duhamel(profile, ic, t)
    else:
        raise InvalidParam(f"unknown method {method!r}, expected 'rk4' or 'duhamel'")

    traj = _build_trajectory(profile, t, arrays, ic, "numeric")
    res = residual_report(traj, profile)
    worst = max(res.values())
    if worst > residual_tol:
        raise StepTooLarge(
            f"equation-of-motion residual {worst:.3g} exceeds {residual_tol:.3g} "
            f"at dt = {dt:.3g}; reduce the step"
        )
    return traj


# ----------------------------------------------------------------------
# Periodic initial values
# ----------------------------------------------------------------------

def _fourier_coefficients(profile, n_fft=DEFAULT_SAMPLES):
    """Complex FFT coefficients of xi and alpha over one period."""
    T = profile.period_T
    t = np.linspace(0.0, T, n_fft, endpoint=False)
    starts = np.array([s.t0 for s in profile.segments])
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    xi = np.empty_like(t)
    al = np.empty_like(t)
    for i, seg in enumerate(profile.segments):
        m = idx == i
        if np.any(m):
            xi[m] = seg.xi(t[m])
            al[m] = seg.alpha(t[m])
    return np.fft.fft(xi) / n_fft, np.fft.fft(al) / n_fft


def find_periodic_ic(profile: DrivingProfile) -> tuple[float, float, float, float]:
    """Initial values that make the response trajectory cyclic.

    For the closed-form families these are the canonical values used
    throughout (circular: x_c(0) = xi0 with everything else zero).  For
    Fourier and tabulated profiles the periodic particular solution is
    built mode by mode, x_hat_k = xi_hat_k * omega^2/(omega^2 - w_k^2)
    with w_k = 2*pi*k/T, and evaluated at t = 0.  A nonzero driving mode
    sitting on the oscillator resonance w_k = omega has no periodic
    response and raises ResonantMode.
    """
    w = profile.omega
    T = profile.period_T
    base = 2.0 * math.pi / T

    xi_hat, al_hat = _fourier_coefficients(profile)
    n_fft = xi_hat.size
    ks = np.fft.fftfreq(n_fft, d=1.0 / n_fft)  # signed mode indices
    w_k = ks * base
    resonant = np.abs(np.abs(w_k) - w) < RESONANCE_TOL * w
    xi_tol = 1e-9 * profile.xi_scale
    al_tol = 1e-9 * profile.alpha_scale
    for k in np.nonzero(resonant)[0]:
        if abs(xi_hat[k]) > xi_tol or abs(al_hat[k]) > al_tol:
            raise ResonantMode(int(abs(ks[k])))

    if profile.kind is not ProfileKind.TABULATED:
        return canonical_ic(profile)

    gain = np.zeros_like(w_k)
    np.divide(w * w, w * w - w_k * w_k, out=gain, where=~resonant)
    x0 = float(np.sum(xi_hat * gain).real)
    v0 = float(np.sum(1j * w_k * xi_hat * gain).real)
    a0 = float(np.sum(al_hat * gain).real)
    u0 = float(np.sum(1j * w_k * al_hat * gain).real)
    return (x0, v0, a0, u0)


def check_cyclic(traj: ResponseTrajectory, tol: float = 1e-8) -> CyclicReport:
    """Endpoint mismatch of the four state components, amplitude-scaled.

    Mismatches are scaled by (xi0, omega*xi0, alpha0, omega*alpha0)
    respectively; all four must fall below tol.
    """
    w = traj.omega
    res = {
        "x_c": abs(traj.x_c[-1] - traj.x_c[0]) / traj.xi_scale,
        "dx_c": abs(traj.dx_c[-1] - traj.dx_c[0]) / (w * traj.xi_scale),
        "a_c": abs(traj.a_c[-1] - traj.a_c[0]) / traj.alpha_scale,
        "da_c": abs(traj.da_c[-1] - traj.da_c[0]) / (w * traj.alpha_scale),
    }
    return CyclicReport(ok=all(v <= tol for v in res.values()), residuals=res)


def require_cyclic(traj: ResponseTrajectory, tol: float = 1e-6) -> None:
    report = check_cyclic(traj, tol)
    if not report.ok:
        raise NonCyclicTrajectory(
            f"trajectory does not close over one period: scaled endpoint "
            f"mismatches {report.residuals}"
        )
