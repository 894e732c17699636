"""The U(2) cycle operator and its dynamical/geometric decomposition.

One driving cycle acts on the Kramers doublet at level m as U = e^{i Phi}
with

    Phi = (-omega_m*T + S) * I - phi_T * (n . sigma)

(plus g*mu_B*B*T * (n . sigma) when a Zeeman field along n lifts the
degeneracy).  Because the exponent is a*I + b*(n.sigma), the exponential
is evaluated exactly: e^{i(aI + b n.sigma)} = e^{ia} (cos b I + i sin b n.sigma).

Sign convention: with phi = -b the matrix is
e^{ia}(cos phi I - i sin phi n.sigma), and conjugation sigma -> U sigma U+
rotates the Bloch vector by the angle 2*phi about n, mapping for example
x_hat -> cos(2 phi) x_hat + sin(2 phi) y_hat for n = z_hat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NonUnitVector
from .params import PhysicalParams
from .phases import PhaseSet

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

_UNITARITY_TOL = 1e-12


def n_dot_sigma(n_axis) -> np.ndarray:
    n = np.asarray(n_axis, dtype=float)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


@dataclass(frozen=True)
class HolonomyU2:
    """Cycle evolution operator on the doublet, with its angle content.

    matrix         : the 2x2 unitary in the lab z-basis
    diagonal_phase : coefficient of I in the exponent (-omega_m*T + S)
    spin_angle     : Bloch rotation angle about n_axis (2*phi_T for zero
                     Zeeman field)
    n_axis         : unit rotation axis
    """

    matrix: np.ndarray = field(repr=False)
    diagonal_phase: float
    spin_angle: float
    n_axis: tuple[float, float, float]

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.shape != (2, 2):
            raise NonUnitVector(f"holonomy matrix must be 2x2, got {u.shape}")
        defect = np.linalg.norm(u.conj().T @ u - IDENTITY_2)
        if defect > 100 * _UNITARITY_TOL:
            raise NonUnitVector(f"holonomy matrix is not unitary (defect {defect:.3g})")
        object.__setattr__(self, "matrix", u)
        object.__setattr__(self, "n_axis", tuple(float(c) for c in self.n_axis))

    @property
    def phi(self) -> float:
        """Half the Bloch rotation angle (phi_T at zero Zeeman field)."""
        return 0.5 * self.spin_angle


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector with |r| <= 1 (pure states on the sphere surface)."""

    r: tuple[float, float, float]

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != (3,) or not np.all(np.isfinite(r)):
            raise NonUnitVector(f"Bloch vector must be a finite 3-vector, got {self.r}")
        if np.linalg.norm(r) > 1.0 + 1e-9:
            raise NonUnitVector(f"Bloch vector lies outside the sphere: |r| = {np.linalg.norm(r)}")
        object.__setattr__(self, "r", tuple(float(c) for c in r))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)


def u2_from_angles(diagonal_phase: float, phi: float, n_axis) -> np.ndarray:
    """Exact e^{i(diagonal_phase*I - phi*n.sigma)}."""
    return np.exp(1j * diagonal_phase) * (
        np.cos(phi) * IDENTITY_2 - 1j * np.sin(phi) * n_dot_sigma(n_axis)
    )


def total_phase_matrix(phases: PhaseSet, params: PhysicalParams) -> HolonomyU2:
    """Assemble U = e^{i Phi} for one cycle from its PhaseSet.

    The identity coefficient is -omega_m*T + S; the n.sigma coefficient
    is -phi_T, shifted by +zeeman*T when params carry a Zeeman splitting
    along n (eigenenergies omega_m -/+ zeeman for n.sigma = +/-1).
    """
    diag = -phases.omega_m_T + phases.action_S
    phi_eff = phases.phi_T - params.zeeman_or_zero * phases.period_T
    return HolonomyU2(
        matrix=u2_from_angles(diag, phi_eff, params.n_axis),
        diagonal_phase=diag,
        spin_angle=2.0 * phi_eff,
        n_axis=params.n_axis,
    )


def total_phase_exponent(phases: PhaseSet, params: PhysicalParams) -> np.ndarray:
    """The Hermitian exponent Phi itself (zero Zeeman field)."""
    return (-phases.omega_m_T + phases.action_S) * IDENTITY_2 - phases.phi_T * n_dot_sigma(
        params.n_axis
    )


def decompose(
    phases: PhaseSet, params: PhysicalParams
) -> tuple[np.ndarray, np.ndarray]:
    """Anandan split Phi = Phi_dyn + Phi_geom for the degenerate doublet.

    Phi_dyn  = -int E dt * I - 2*(phi_T - phi_c) * n.sigma
    Phi_geom = phi_a * I + (phi_T - 2*phi_c) * n.sigma

    Their sum reproduces the total exponent, including the scalar
    identity -int E dt + phi_a = -omega_m*T + S.
    """
    ns = n_dot_sigma(params.n_axis)
    phi_dyn = -phases.energy_integral * IDENTITY_2 - 2.0 * (phases.phi_T - phases.phi_c) * ns
    phi_geom = phases.phi_a * IDENTITY_2 + (phases.phi_T - 2.0 * phases.phi_c) * ns
    return phi_dyn, phi_geom


def anandan_berry(phases: PhaseSet, spin_s: float) -> float:
    """Aharonov-Anandan geometric phase of the Zeeman-split state s = +-1/2.

    beta_s = phi_a + sign(s)*(phi_T - 2*phi_c); in the adiabatic limit it
    tends to the Berry phase -+ phi_ad.
    """
    if spin_s not in (0.5, -0.5):
        raise NonUnitVector(f"spin_s must be +0.5 or -0.5, got {spin_s}")
    sign = 1.0 if spin_s > 0 else -1.0
    return phases.phi_a + sign * (phases.phi_T - 2.0 * phases.phi_c)


def apply(h: HolonomyU2, spinor) -> np.ndarray:
    """Apply the cycle operator to a normalized 2-spinor."""
    psi = np.asarray(spinor, dtype=complex)
    if psi.shape != (2,):
        raise NonUnitVector(f"spinor must be a 2-vector, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise NonUnitVector(f"spinor must be normalized, got |psi| = {norm}")
    return h.matrix @ psi


def rotate_bloch(h: HolonomyU2, r: BlochVector) -> BlochVector:
    """Rotate a Bloch vector by conjugation, r'.sigma = U (r.sigma) U+."""
    u = h.matrix
    rotated = u @ n_dot_sigma(r.array * 1.0) @ u.conj().T
    out = [0.5 * np.trace(s @ rotated).real for s in PAULI]
    return BlochVector(tuple(out))


def _extract_angles(u: np.ndarray, fallback_axis) -> tuple[float, float, tuple]:
    """Recover (diagonal_phase, phi, axis) with u = e^{i d}(cos phi I - i sin phi n.sigma).

    diagonal_phase is reduced to (-pi/2, pi/2] (branch choice); phi lies
    in [0, pi] with the axis carrying the sign.  A nearly diagonal-phase
    matrix (sin phi ~ 0) keeps the fallback axis.
    """
    det = np.linalg.det(u)
    d = 0.5 * np.angle(det)
    v = np.exp(-1j * d) * u
    cos_phi = float(np.clip(0.5 * np.trace(v).real, -1.0, 1.0))
    # v = cos phi I - i sin phi n.sigma  =>  (i/2) tr(sigma_j v) = sin phi * n_j
    s_vec = np.array([(0.5j * np.trace(s @ v)).real for s in PAULI])
    sin_phi = float(np.linalg.norm(s_vec))
    phi = float(np.arctan2(sin_phi, cos_phi))
    if sin_phi > 1e-14:
        axis = tuple(float(c) for c in s_vec / sin_phi)
    else:
        axis = tuple(float(c) for c in fallback_axis)
    return d, phi, axis


def compose(cycles: Sequence[HolonomyU2]) -> HolonomyU2:
    """Ordered product of cycle operators (first entry applied first)."""
    if not cycles:
        raise NonUnitVector("compose needs at least one holonomy")
    product = IDENTITY_2.copy()
    for h in cycles:
        product = h.matrix @ product
    d, phi, axis = _extract_angles(product, cycles[-1].n_axis)
    return HolonomyU2(
        matrix=product, diagonal_phase=d, spin_angle=2.0 * phi, n_axis=axis
    )


def rotation_angle_from_matrix(h: HolonomyU2) -> float:
    """Recover |phi| mod pi from the matrix alone (consistency check)."""
    v = np.exp(-1j * h.diagonal_phase) * h.matrix
    return float(np.arccos(np.clip(0.5 * np.trace(v).real, -1.0, 1.0)))
