"""Periodic driving profiles xi(t) (dot position) and alpha(t) (Rashba coupling).

A profile is a pair of T-periodic functions with exact value and
first-derivative evaluators.  Internally each profile is a list of smooth
segments covering one cycle plus an ordered list of jump events (step
profiles only).  Quadrature and ODE integration downstream always split
at segment boundaries, and Stieltjes contributions of the jumps to
contour integrals are summed explicitly from the event list.

Built-in families:

  Circular           xi = xi0*cos(omega*t/n),  alpha = alpha0*sin(omega*t/n),
                     T = n*T0 with T0 = 2*pi/omega and integer n >= 2.
  SequentialSquare   four sequential legs: displace the dot to xi0, raise
                     alpha from alpha1 to alpha0, displace back, lower
                     alpha back.  Sinusoidal ramps use the residual-free
                     raised cosine xi0*(1 - cos(omega*t/3))/2 per moving
                     leg (leg length 3*pi/omega, T = 12*pi/omega);
                     instantaneous ramps jump to the half-way point and
                     complete after half an oscillator period (leg length
                     pi/omega, T = 4*pi/omega).
  BrokenEllipsoidal  xi = xi0*sin(omega*t/2) on [0, 2*T0] and zero after,
                     alpha the same pulse delayed by delta_T and scaled to
                     alpha0, T = 2*T0 + delta_T.
  Fourier            explicit trigonometric series for xi and alpha.
  Tabulated          sampled arrays, linear interpolation (lower accuracy).
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParam, ResonantDriving
from .params import PhysicalParams

# Relative tolerance, in units of the period, for "t sits on a jump".
_JUMP_TOL = 1e-12


class ProfileKind(str, enum.Enum):
    SEQUENTIAL_SQUARE = "sequential_square"
    CIRCULAR = "circular"
    BROKEN_ELLIPSOIDAL = "broken_ellipsoidal"
    FOURIER = "fourier"
    TABULATED = "tabulated"


class Ramp(str, enum.Enum):
    SINUSOIDAL = "sinusoidal"
    INSTANTANEOUS = "instantaneous"


@dataclass(frozen=True)
class Segment:
    """One smooth piece of the cycle, [t0, t1), with absolute-time evaluators."""

    t0: float
    t1: float
    xi: Callable[[np.ndarray], np.ndarray]
    alpha: Callable[[np.ndarray], np.ndarray]
    dxi: Callable[[np.ndarray], np.ndarray]
    dalpha: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class JumpEvent:
    """A step in xi or alpha.

    Events sharing a time are ordered (leg that closes fires before the
    leg that opens); `other_value` is the value of the continuous
    counterpart driving at the instant the step fires, which is what the
    Stieltjes term of a contour integral needs.
    """

    t: float
    var: str            # "xi" or "alpha"
    delta: float
    other_value: float
    order: int = 0


class DrivingEval(NamedTuple):
    xi: float
    alpha: float
    dxi_dt: float
    dalpha_dt: float
    at_jump: bool


@dataclass(frozen=True)
class DrivingProfile:
    """Immutable periodic driving; safe to share across threads."""

    kind: ProfileKind
    period_T: float
    omega: float
    segments: tuple[Segment, ...]
    jumps: tuple[JumpEvent, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Times in [0, T] where smoothness may break (segment edges)."""
        b = [s.t0 for s in self.segments] + [self.period_T]
        return tuple(b)

    @property
    def xi_scale(self) -> float:
        return self.meta.get("xi_scale", 1.0)

    @property
    def alpha_scale(self) -> float:
        return self.meta.get("alpha_scale", 1.0)

    def reduce_time(self, t: float) -> float:
        T = self.period_T
        tr = t - math.floor(t / T) * T
        if tr >= T:  # floor roundoff at negative t very close to a multiple
            tr -= T
        return tr

    def segment_at(self, t_reduced: float) -> Segment:
        """Segment owning t (right-limit convention at edges)."""
        starts = [s.t0 for s in self.segments]
        i = bisect_right(starts, t_reduced + _JUMP_TOL * self.period_T) - 1
        i = min(max(i, 0), len(self.segments) - 1)
        return self.segments[i]

    def eval(self, t: float) -> DrivingEval:
        """Exact values and first derivatives at time t (reduced mod T).

        At a step discontinuity the right limit is returned and at_jump
        is set; derivatives are the smooth within-segment ones.
        """
        if not np.isfinite(t):
            raise InvalidParam(f"time must be finite, got {t}")
        tr = self.reduce_time(float(t))
        seg = self.segment_at(tr)
        ta = np.asarray(tr, dtype=float)
        tol = _JUMP_TOL * max(self.period_T, 1.0)
        at_jump = any(
            abs(tr - j.t) <= tol or abs(tr - j.t - self.period_T) <= tol
            for j in self.jumps
        )
        return DrivingEval(
            xi=float(seg.xi(ta)),
            alpha=float(seg.alpha(ta)),
            dxi_dt=float(seg.dxi(ta)),
            dalpha_dt=float(seg.dalpha(ta)),
            at_jump=at_jump,
        )


def _require_finite(**amplitudes):
    for name, value in amplitudes.items():
        if not np.isfinite(value):
            raise InvalidParam(f"{name} must be finite, got {value}")


def _const(value: float) -> Callable[[np.ndarray], np.ndarray]:
    def f(t):
        return np.full_like(np.asarray(t, dtype=float), value)

    return f


def make_circular(
    params: PhysicalParams, xi0: float, alpha0: float, n: int
) -> DrivingProfile:
    """Circular loop in driving space: xi = xi0*cos(w t/n), alpha = alpha0*sin(w t/n).

    One cycle lasts T = n*T0; n = 1 would drive the oscillators on
    resonance, so integer n >= 2 is required.
    """
    _require_finite(xi0=xi0, alpha0=alpha0)
    if int(n) != n:
        raise InvalidParam(f"n must be an integer, got {n}")
    n = int(n)
    if n < 2:
        raise ResonantDriving(f"circular driving needs n >= 2, got n = {n}")
    w = params.omega
    nu = w / n
    T = 2.0 * math.pi * n / w

    seg = Segment(
        t0=0.0,
        t1=T,
        xi=lambda t: xi0 * np.cos(nu * np.asarray(t, dtype=float)),
        alpha=lambda t: alpha0 * np.sin(nu * np.asarray(t, dtype=float)),
        dxi=lambda t: -xi0 * nu * np.sin(nu * np.asarray(t, dtype=float)),
        dalpha=lambda t: alpha0 * nu * np.cos(nu * np.asarray(t, dtype=float)),
    )
    meta = {
        "xi0": float(xi0),
        "alpha0": float(alpha0),
        "n_cycles": n,
        "xi_scale": abs(xi0) or 1.0,
        "alpha_scale": abs(alpha0) or 1.0,
    }
    return DrivingProfile(ProfileKind.CIRCULAR, T, w, (seg,), (), meta)


def _raised_cos_up(amp0, amp1, slow, t_start):
    """Smooth ramp amp0 -> amp1 over slow half-period: a0 + (a1-a0)*(1-cos)/2."""
    d = amp1 - amp0

    def f(t):
        return amp0 + d * (1.0 - np.cos(slow * (np.asarray(t, dtype=float) - t_start))) / 2.0

    def df(t):
        return d * slow * np.sin(slow * (np.asarray(t, dtype=float) - t_start)) / 2.0

    return f, df


def make_sequential_square(
    params: PhysicalParams,
    xi0: float,
    alpha0: float,
    ramp: Ramp | str = Ramp.SINUSOIDAL,
    alpha1: float = 0.0,
) -> DrivingProfile:
    """Sequential square loop: xi out, alpha up, xi back, alpha down.

    Legs are built so the classical response equals the driving with zero
    derivative at every leg boundary (no residual oscillation), which is
    what makes the acquired spin-rotation phase equal the adiabatic value
    -m_star*xi0*(alpha0-alpha1) regardless of ramp shape.

    Sinusoidal legs (slow angle omega/3, leg length 3*pi/omega) give
    T = 12*pi/omega; instantaneous legs jump to the midpoint amplitude,
    let the response swing across in half an oscillator period, then jump
    to the endpoint, giving T = 4*pi/omega.
    """
    _require_finite(xi0=xi0, alpha0=alpha0, alpha1=alpha1)
    ramp = Ramp(ramp)
    w = params.omega
    meta = {
        "xi0": float(xi0),
        "alpha0": float(alpha0),
        "alpha1": float(alpha1),
        "ramp": ramp.value,
        "xi_scale": abs(xi0) or 1.0,
        "alpha_scale": max(abs(alpha0), abs(alpha1)) or 1.0,
    }

    if ramp is Ramp.SINUSOIDAL:
        leg = 3.0 * math.pi / w
        slow = w / 3.0
        T = 4 * leg
        xi_up, dxi_up = _raised_cos_up(0.0, xi0, slow, 0.0)
        al_up, dal_up = _raised_cos_up(alpha1, alpha0, slow, leg)
        xi_dn, dxi_dn = _raised_cos_up(xi0, 0.0, slow, 2 * leg)
        al_dn, dal_dn = _raised_cos_up(alpha0, alpha1, slow, 3 * leg)
        zero = _const(0.0)
        segments = (
            Segment(0.0, leg, xi_up, _const(alpha1), dxi_up, zero),
            Segment(leg, 2 * leg, _const(xi0), al_up, zero, dal_up),
            Segment(2 * leg, 3 * leg, xi_dn, _const(alpha0), dxi_dn, zero),
            Segment(3 * leg, 4 * leg, _const(0.0), al_dn, zero, dal_dn),
        )
        meta["period_label"] = "12*pi/omega"
        return DrivingProfile(ProfileKind.SEQUENTIAL_SQUARE, T, w, segments, (), meta)

    # Instantaneous switching: each moving leg is a half-amplitude jump,
    # a free half-period swing of the response, and a completion jump.
    leg = math.pi / w
    T = 4 * leg
    mid = 0.5 * (alpha0 + alpha1)
    zero = _const(0.0)
    segments = (
        Segment(0.0, leg, _const(0.5 * xi0), _const(alpha1), zero, zero),
        Segment(leg, 2 * leg, _const(xi0), _const(mid), zero, zero),
        Segment(2 * leg, 3 * leg, _const(0.5 * xi0), _const(alpha0), zero, zero),
        Segment(3 * leg, 4 * leg, _const(0.0), _const(mid), zero, zero),
    )
    # Order within a shared time: the closing jump of the previous leg
    # fires before the opening jump of the next.
    jumps = (
        JumpEvent(0.0, "alpha", alpha1 - mid, other_value=0.0, order=0),
        JumpEvent(0.0, "xi", 0.5 * xi0, other_value=alpha1, order=1),
        JumpEvent(leg, "xi", 0.5 * xi0, other_value=alpha1, order=0),
        JumpEvent(leg, "alpha", mid - alpha1, other_value=xi0, order=1),
        JumpEvent(2 * leg, "alpha", alpha0 - mid, other_value=xi0, order=0),
        JumpEvent(2 * leg, "xi", -0.5 * xi0, other_value=alpha0, order=1),
        JumpEvent(3 * leg, "xi", -0.5 * xi0, other_value=alpha0, order=0),
        JumpEvent(3 * leg, "alpha", mid - alpha0, other_value=0.0, order=1),
    )
    meta["period_label"] = "4*pi/omega"
    return DrivingProfile(ProfileKind.SEQUENTIAL_SQUARE, T, w, segments, jumps, meta)


def make_broken_ellipsoidal(
    params: PhysicalParams, xi0: float, alpha0: float, delta_T: float
) -> DrivingProfile:
    """Single sine pulse in xi, the same pulse delayed by delta_T in alpha.

    xi(t) = xi0*sin(omega*t/2) for 0 <= t <= 2*T0 and zero afterwards;
    alpha(t) = alpha0*sin(omega*(t - delta_T)/2) on its shifted support.
    The cycle period is T = 2*T0 + delta_T, so the two supports overlap
    on [delta_T, 2*T0] and become disjoint exactly at delta_T = 2*T0.
    """
    _require_finite(xi0=xi0, alpha0=alpha0, delta_T=delta_T)
    w = params.omega
    T0 = 2.0 * math.pi / w
    if not (0.0 <= delta_T <= 2.0 * T0):
        raise InvalidParam(
            f"delta_T must lie in [0, 2*T0] = [0, {2 * T0:.6g}], got {delta_T}"
        )
    T = 2.0 * T0 + delta_T

    def xi_pulse(t):
        return xi0 * np.sin(0.5 * w * np.asarray(t, dtype=float))

    def dxi_pulse(t):
        return 0.5 * w * xi0 * np.cos(0.5 * w * np.asarray(t, dtype=float))

    def al_pulse(t):
        return alpha0 * np.sin(0.5 * w * (np.asarray(t, dtype=float) - delta_T))

    def dal_pulse(t):
        return 0.5 * w * alpha0 * np.cos(0.5 * w * (np.asarray(t, dtype=float) - delta_T))

    zero = _const(0.0)
    edges = sorted({0.0, min(delta_T, 2 * T0), max(delta_T, 2 * T0), T})
    edges = [e for i, e in enumerate(edges) if i == 0 or e - edges[i - 1] > 1e-12 * T]
    if edges[-1] < T - 1e-12 * T:
        edges.append(T)

    segments = []
    for a, b in zip(edges[:-1], edges[1:]):
        tm = 0.5 * (a + b)
        xi_on = tm <= 2 * T0
        al_on = tm >= delta_T
        segments.append(
            Segment(
                a,
                b,
                xi_pulse if xi_on else zero,
                al_pulse if al_on else zero,
                dxi_pulse if xi_on else zero,
                dal_pulse if al_on else zero,
            )
        )
    meta = {
        "xi0": float(xi0),
        "alpha0": float(alpha0),
        "delta_T": float(delta_T),
        "xi_scale": abs(xi0) or 1.0,
        "alpha_scale": abs(alpha0) or 1.0,
    }
    return DrivingProfile(ProfileKind.BROKEN_ELLIPSOIDAL, T, w, tuple(segments), (), meta)


def make_fourier(
    params: PhysicalParams,
    period_T: float,
    xi_const: float = 0.0,
    xi_cos: Sequence[float] = (),
    xi_sin: Sequence[float] = (),
    alpha_const: float = 0.0,
    alpha_cos: Sequence[float] = (),
    alpha_sin: Sequence[float] = (),
) -> DrivingProfile:
    """Trigonometric-series driving.

    xi(t) = xi_const + sum_k xi_cos[k-1]*cos(2*pi*k*t/T)
                     + sum_k xi_sin[k-1]*sin(2*pi*k*t/T),
    and alpha likewise.  Periodic by construction.
    """
    if not (np.isfinite(period_T) and period_T > 0):
        raise InvalidParam(f"period_T must be positive and finite, got {period_T}")
    coeffs = dict(
        xi_const=float(xi_const),
        xi_cos=tuple(float(c) for c in xi_cos),
        xi_sin=tuple(float(c) for c in xi_sin),
        alpha_const=float(alpha_const),
        alpha_cos=tuple(float(c) for c in alpha_cos),
        alpha_sin=tuple(float(c) for c in alpha_sin),
    )
    for name in ("xi_const", "alpha_const"):
        _require_finite(**{name: coeffs[name]})
    for name in ("xi_cos", "xi_sin", "alpha_cos", "alpha_sin"):
        if not all(np.isfinite(c) for c in coeffs[name]):
            raise InvalidParam(f"{name} contains non-finite coefficients")
    base = 2.0 * math.pi / period_T

    def series(const, cos_c, sin_c, deriv):
        def f(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t) if deriv else np.full_like(t, const)
            for k, c in enumerate(cos_c, start=1):
                wk = k * base
                out = out + (-c * wk * np.sin(wk * t) if deriv else c * np.cos(wk * t))
            for k, c in enumerate(sin_c, start=1):
                wk = k * base
                out = out + (c * wk * np.cos(wk * t) if deriv else c * np.sin(wk * t))
            return out

        return f

    seg = Segment(
        0.0,
        float(period_T),
        series(coeffs["xi_const"], coeffs["xi_cos"], coeffs["xi_sin"], False),
        series(coeffs["alpha_const"], coeffs["alpha_cos"], coeffs["alpha_sin"], False),
        series(0.0, coeffs["xi_cos"], coeffs["xi_sin"], True),
        series(0.0, coeffs["alpha_cos"], coeffs["alpha_sin"], True),
    )
    xi_scale = abs(coeffs["xi_const"]) + sum(map(abs, coeffs["xi_cos"])) + sum(
        map(abs, coeffs["xi_sin"])
    )
    al_scale = abs(coeffs["alpha_const"]) + sum(map(abs, coeffs["alpha_cos"])) + sum(
        map(abs, coeffs["alpha_sin"])
    )
    meta = dict(coeffs)
    meta["xi_scale"] = xi_scale or 1.0
    meta["alpha_scale"] = al_scale or 1.0
    return DrivingProfile(ProfileKind.FOURIER, float(period_T), params.omega, (seg,), (), meta)


def make_tabulated(
    params: PhysicalParams,
    t_samples: Sequence[float],
    xi_samples: Sequence[float],
    alpha_samples: Sequence[float],
) -> DrivingProfile:
    """Sampled driving with linear interpolation and two-point derivatives.

    Documented lower accuracy: values are piecewise linear and the
    derivatives piecewise constant.  The first and last samples must
    agree (one full period, endpoints included).
    """
    t = np.asarray(t_samples, dtype=float)
    xi = np.asarray(xi_samples, dtype=float)
    al = np.asarray(alpha_samples, dtype=float)
    if t.ndim != 1 or t.size < 3 or xi.shape != t.shape or al.shape != t.shape:
        raise InvalidParam("tabulated profile needs equally shaped 1-d sample arrays")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(xi)) and np.all(np.isfinite(al))):
        raise InvalidParam("tabulated samples must be finite")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise InvalidParam("t_samples must be strictly increasing and start at 0")
    T = float(t[-1])
    xsc = float(np.max(np.abs(xi))) or 1.0
    asc = float(np.max(np.abs(al))) or 1.0
    if abs(xi[0] - xi[-1]) > 1e-9 * xsc or abs(al[0] - al[-1]) > 1e-9 * asc:
        raise InvalidParam("tabulated samples are not periodic: endpoints differ")

    dxi_tab = np.gradient(xi, t)
    dal_tab = np.gradient(al, t)

    def interp(y):
        def f(tt):
            return np.interp(np.asarray(tt, dtype=float), t, y)

        return f

    seg = Segment(0.0, T, interp(xi), interp(al), interp(dxi_tab), interp(dal_tab))
    meta = {
        "n_samples": int(t.size),
        "xi_scale": xsc,
        "alpha_scale": asc,
        "t_samples": t,
        "xi_samples": xi,
        "alpha_samples": al,
    }
    return DrivingProfile(ProfileKind.TABULATED, T, params.omega, (seg,), (), meta)
