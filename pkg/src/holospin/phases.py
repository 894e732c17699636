"""Scalar phase functionals of one driving cycle.

All phases are line integrals along the cycle, evaluated as
time-parametrized integrals with composite Simpson quadrature (never by
polygon-area formulas, so self-intersecting contours keep their
orientation signs).  Quadrature grids are built per smooth segment, so
kinks and steps of the driving sit exactly on panel edges; step drivings
additionally contribute explicit Stieltjes jump terms.

The functionals, for a cyclic trajectory (m = m_star):

  phi_T   = -m * int da_c/dt * xi dt        spin-rotation phase, equals the
            contour forms m*oint_C1 a_c dxi = m*oint_C2 alpha dx_c
  phi_c   =  m * int a_c * dx_c/dt dt       (contour C3)
  phi_a   =  m * int (dx_c^2 + da_c^2/omega^2) dt   (contours C4 + C5)
  phi_ad  =  m * oint alpha dxi             adiabatic (driving-only) phase
  S       =  int (L_xi + L_alpha) dt        classical action of the cycle
  int E   =  int E(t) dt                    instantaneous-energy integral

with L_xi = m*dx_c^2/2 - m*omega^2*(x_c-xi)^2/2,
     L_alpha = m*da_c^2/(2 omega^2) - m*a_c^2/2 + m*a_c*alpha, and
     E = omega_m + m*(dx_c^2 + da_c^2/omega^2)/2
         + m*omega^2*(x_c-xi)^2/2 + m*a_c^2/2 - m*a_c*alpha.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import simpson

from .driving import DrivingProfile
from .errors import ResonantDriving
from .params import PhysicalParams
from .response import ResponseTrajectory, require_cyclic

DEFAULT_QUAD_POINTS = 4096


@dataclass(frozen=True)
class PhaseSet:
    """All scalar phase functionals of one cycle (radians / hbar = 1)."""

    phi_T: float
    phi_c: float
    phi_a: float
    phi_ad: float
    action_S: float
    energy_integral: float
    omega_m_T: float
    period_T: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


# ----------------------------------------------------------------------
# Quadrature engine
# ----------------------------------------------------------------------

def _even_counts(edges, n_total):
    spans = np.diff(edges)
    counts = []
    for s in spans:
        m = int(round(n_total * s / (edges[-1] - edges[0])))
        m = max(8, m + (m % 2))
        counts.append(m)
    return counts


def _segment_tables(traj, profile, n_points, t_upper=None):
    """Yield (t_grid, responses, drivings) per smooth chunk of [0, t_upper].

    Responses come from the trajectory's exact evaluator when present,
    otherwise from its sampled grid (in which case the trajectory's own
    nodes are used and chunks split at boundary-aligned nodes).
    Drivings are evaluated with the owning segment's formulas when a
    profile is supplied, else returned as None.
    """
    T = traj.period_T
    upper = T if t_upper is None else float(t_upper)
    edges = [b for b in traj.boundaries if b < upper - 1e-12 * T]
    edges = sorted(set(edges + [0.0, upper]))

    if traj.evaluator is not None:
        counts = _even_counts(edges, n_points)
        for (a, b), m in zip(zip(edges[:-1], edges[1:]), counts):
            tg = np.linspace(a, b, m + 1)
            resp = traj.evaluator(tg)
            if profile is not None:
                seg = profile.segment_at(min(0.5 * (a + b), T * (1 - 1e-15)))
                drive = (seg.xi(tg), seg.alpha(tg), seg.dxi(tg), seg.dalpha(tg))
            else:
                drive = None
            yield tg, resp, drive
        return

    # Sampled-grid path: Simpson over the trajectory nodes, chunked at
    # the nodes nearest to each boundary (documented lower accuracy when
    # boundaries fall between nodes).
    t = traj.t
    h = t[1] - t[0]
    cut = sorted({int(round(e / h)) for e in edges})
    cut = [min(max(c, 0), t.size - 1) for c in cut]
    if cut[-1] != t.size - 1 and upper >= T - 1e-12 * T:
        cut[-1] = t.size - 1
    for a, b in zip(cut[:-1], cut[1:]):
        if b <= a:
            continue
        tg = t[a : b + 1]
        resp = (traj.x_c[a : b + 1], traj.dx_c[a : b + 1],
                traj.a_c[a : b + 1], traj.da_c[a : b + 1])
        if profile is not None:
            seg = profile.segment_at(min(0.5 * (tg[0] + tg[-1]), T * (1 - 1e-15)))
            drive = (seg.xi(tg), seg.alpha(tg), seg.dxi(tg), seg.dalpha(tg))
        else:
            drive = None
        yield tg, resp, drive


def _cycle_integral(traj, profile, values, n_points=DEFAULT_QUAD_POINTS, t_upper=None):
    """Simpson integral of values(t, resp, drive) over [0, t_upper]."""
    total = 0.0
    for tg, resp, drive in _segment_tables(traj, profile, n_points, t_upper):
        total += float(simpson(values(tg, resp, drive), x=tg))
    return total


def _xi_jump_sum(profile, point_value):
    """Sum of point_value(t_j) * delta_xi_j over the xi-jump events."""
    return sum(j.delta * point_value(j) for j in profile.jumps if j.var == "xi")


def _a_c_at(traj, t):
    if traj.evaluator is not None:
        return float(traj.evaluator(np.array([t]))[2][0])
    return float(np.interp(t, traj.t, traj.a_c))


# ----------------------------------------------------------------------
# Phase functionals
# ----------------------------------------------------------------------

def phi_spin(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> float:
    """Spin-rotation phase phi_T = -m * int_0^T da_c/dt * xi dt.

    Half the angle by which the qubit rotates about the n axis per cycle.
    The integrand is bounded across step drivings (da_c/dt is continuous),
    so no jump terms appear here.
    """
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    return -m * _cycle_integral(
        traj, profile, lambda tg, r, d: r[3] * d[0], n_points
    )


def phi_contour_C1(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> float:
    """phi_T as the loop integral m*oint a_c dxi in the [xi, a_c] plane.

    Step drivings contribute Stieltjes terms a_c(t_j)*delta_xi_j at every
    xi jump; a_c itself is always continuous.
    """
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    smooth = _cycle_integral(traj, profile, lambda tg, r, d: r[2] * d[2], n_points)
    jumps = _xi_jump_sum(profile, lambda j: _a_c_at(traj, j.t))
    return m * (smooth + jumps)


def phi_contour_C2(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> float:
    """phi_T as the loop integral m*oint alpha dx_c in the [x_c, alpha] plane.

    dx_c/dt is continuous even for step drivings, so this route never
    needs jump terms.  Agreement with phi_contour_C1 (an entirely
    different integrand) is a strong consistency check on the responses.
    """
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    return m * _cycle_integral(traj, profile, lambda tg, r, d: d[1] * r[1], n_points)


def phi_c(
    traj: ResponseTrajectory,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> float:
    """Connection phase phi_c = m*oint a_c dx_c (contour C3)."""
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    return m * _cycle_integral(traj, None, lambda tg, r, d: r[2] * r[1], n_points)


def phi_a(
    traj: ResponseTrajectory,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> float:
    """Aharonov-Anandan kinetic phase m*(oint dx_c dx_c + oint da_c da_c/w^2).

    Evaluated as m * int (dx_c^2 + da_c^2/omega^2) dt; nonnegative, and
    zero only for a static trajectory.
    """
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    w2 = traj.omega**2
    return m * _cycle_integral(
        traj, None, lambda tg, r, d: r[1] ** 2 + r[3] ** 2 / w2, n_points
    )


def phi_ad(
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
) -> float:
    """Adiabatic phase m*oint alpha dxi, a property of the driving alone.

    Step profiles contribute alpha(t_j)*delta_xi_j at each xi jump, with
    simultaneous jumps applied in leg order.
    """
    m = params.m_star
    total = 0.0
    for seg in profile.segments:
        a, b = seg.t0, seg.t1
        span = b - a
        n = max(8, int(round(n_points * span / profile.period_T)))
        n += n % 2
        tg = np.linspace(a, b, n + 1)
        total += float(simpson(seg.alpha(tg) * seg.dxi(tg), x=tg))
    total += _xi_jump_sum(profile, lambda j: j.other_value)
    return m * total


def action_and_energy(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> tuple[float, float]:
    """Cycle action S = int (L_xi + L_alpha) dt and energy integral int E dt.

    The two integrands obey -E + m*(dx_c^2 + da_c^2/w^2) = -omega_m + L
    pointwise, which ties the Anandan decomposition to the total phase.
    """
    require_cyclic(traj, cyclic_tol)
    m = params.m_star
    w2 = traj.omega**2
    om = params.omega_m

    def lagrangian(tg, r, d):
        x, dx, a, da = r
        xi, al = d[0], d[1]
        l_xi = 0.5 * m * dx**2 - 0.5 * m * w2 * (x - xi) ** 2
        l_al = 0.5 * m * da**2 / w2 - 0.5 * m * a**2 + m * a * al
        return l_xi + l_al

    def energy(tg, r, d):
        x, dx, a, da = r
        xi, al = d[0], d[1]
        return (
            om
            + 0.5 * m * (dx**2 + da**2 / w2)
            + 0.5 * m * w2 * (x - xi) ** 2
            + 0.5 * m * a**2
            - m * a * al
        )

    action = _cycle_integral(traj, profile, lagrangian, n_points)
    e_int = _cycle_integral(traj, profile, energy, n_points)
    return action, e_int


def accumulated_phases(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    t: float,
    n_points: int = DEFAULT_QUAD_POINTS,
) -> tuple[float, float, float]:
    """Running phase factors (phi_xi(t), phi_alpha(t), phi(t)) up to time t.

    phi_xi = -int_0^t L_xi, phi_alpha = -int_0^t L_alpha and
    phi = -m int_0^t da_c/dt * xi; the same Simpson rule as the cycle
    functionals so analytic-state phases and cycle phases share one path.
    """
    m = params.m_star
    w2 = traj.omega**2

    def l_xi(tg, r, d):
        return 0.5 * m * r[1] ** 2 - 0.5 * m * w2 * (r[0] - d[0]) ** 2

    def l_al(tg, r, d):
        return 0.5 * m * r[3] ** 2 / w2 - 0.5 * m * r[2] ** 2 + m * r[2] * d[1]

    def sp(tg, r, d):
        return r[3] * d[0]

    p_xi = -_cycle_integral(traj, profile, l_xi, n_points, t_upper=t)
    p_al = -_cycle_integral(traj, profile, l_al, n_points, t_upper=t)
    p_sp = -m * _cycle_integral(traj, profile, sp, n_points, t_upper=t)
    return p_xi, p_al, p_sp


def compute_phase_set(
    traj: ResponseTrajectory,
    profile: DrivingProfile,
    params: PhysicalParams,
    n_points: int = DEFAULT_QUAD_POINTS,
    cyclic_tol: float = 1e-6,
) -> PhaseSet:
    """All cycle functionals of a cyclic trajectory in one record."""
    action, e_int = action_and_energy(traj, profile, params, n_points, cyclic_tol)
    return PhaseSet(
        phi_T=phi_spin(traj, profile, params, n_points, cyclic_tol),
        phi_c=phi_c(traj, params, n_points, cyclic_tol),
        phi_a=phi_a(traj, params, n_points, cyclic_tol),
        phi_ad=phi_ad(profile, params, n_points),
        action_S=action,
        energy_integral=e_int,
        omega_m_T=params.omega_m * traj.period_T,
        period_T=traj.period_T,
    )


# ----------------------------------------------------------------------
# Closed-form references (circular and square families)
# ----------------------------------------------------------------------

def closed_form_circular(
    n: int, xi0: float, alpha0: float, params: PhysicalParams
) -> PhaseSet:
    """Reference PhaseSet of the circular family from its closed forms.

    phi_ad = -pi*m*xi0*alpha0
    phi_T  = n^2/(n^2-1) * phi_ad
    phi_c  = n^2(n^2+1)/(n^2-1)^2 * phi_ad
    phi_a  = pi*m*[n(n^2+1) xi0^2 w + 2 n^3 alpha0^2/w]/(n^2-1)^2
    S      = pi*m*n*(xi0^2 w + alpha0^2 n^2/w)/(2(n^2-1))
    int E  = omega_m*T + phi_a - S   (decomposition identity)
    """
    if int(n) != n or n < 2:
        raise ResonantDriving(f"closed forms need integer n >= 2, got {n}")
    n = int(n)
    m = params.m_star
    w = params.omega
    T = 2.0 * math.pi * n / w
    den = n * n - 1.0
    ad = -math.pi * m * xi0 * alpha0
    p_T = n * n / den * ad
    p_c = n * n * (n * n + 1.0) / den**2 * ad
    p_a = math.pi * m * (n * (n * n + 1.0) * xi0**2 * w + 2.0 * n**3 * alpha0**2 / w) / den**2
    action = math.pi * m * n * (xi0**2 * w + alpha0**2 * n * n / w) / (2.0 * den)
    om_T = params.omega_m * T
    return PhaseSet(
        phi_T=p_T,
        phi_c=p_c,
        phi_a=p_a,
        phi_ad=ad,
        action_S=action,
        energy_integral=om_T + p_a - action,
        omega_m_T=om_T,
        period_T=T,
    )


def closed_form_square(
    xi0: float, alpha0: float, params: PhysicalParams, alpha1: float = 0.0
) -> dict[str, float]:
    """Ramp-independent phases of the sequential square loop.

    phi_T = phi_c = phi_ad = -m*xi0*(alpha0 - alpha1): the loop area in
    every relevant plane, because each leg moves only one coordinate
    while the other response is exactly constant.  phi_a and the action
    depend on the ramp shape and are not included.
    """
    v = -params.m_star * xi0 * (alpha0 - alpha1)
    return {"phi_T": v, "phi_c": v, "phi_ad": v}
