"""Physical parameters of the trapped electron, in hbar = 1 units.

Everything downstream works in scaled units: hbar is fixed to 1, so an
energy is a 1/time, a mass is an energy*time^2/length^2, and the product
m_star * xi0 * alpha0 (mass * length * length/time) is dimensionless.
The default scaled system additionally sets omega = m_star = 1, which
makes the oscillator length sqrt(1/(m_star*omega)) equal to 1.  Runs
specified in laboratory units are converted on input (see scenario.py);
no hbar ever appears in the internal math.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParam

_UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Trap and spin parameters entering the Hamiltonian.

    m_star  : effective mass (energy*time^2/length^2, hbar = 1)
    omega   : trap angular frequency (1/time)
    n_axis  : unit 3-vector, the fixed spin-rotation axis of the
              spin-orbit term alpha(t) * p * (n . sigma)
    zeeman  : optional g*mu_B*B along n_axis (energy, hbar = 1); None or
              0 means degenerate Kramers doublets
    level_m : oscillator level index m >= 0 of the qubit doublet
    """

    m_star: float = 1.0
    omega: float = 1.0
    n_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    zeeman: float | None = None
    level_m: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.m_star) and self.m_star > 0):
            raise InvalidParam(f"m_star must be positive and finite, got {self.m_star}")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise InvalidParam(f"omega must be positive and finite, got {self.omega}")
        axis = np.asarray(self.n_axis, dtype=float)
        if axis.shape != (3,) or not np.all(np.isfinite(axis)):
            raise InvalidParam(f"n_axis must be a finite 3-vector, got {self.n_axis}")
        if abs(np.linalg.norm(axis) - 1.0) > _UNIT_NORM_TOL:
            raise InvalidParam(
                f"n_axis must have unit norm within {_UNIT_NORM_TOL}, "
                f"got |n| = {np.linalg.norm(axis)!r}"
            )
        if self.zeeman is not None and not np.isfinite(self.zeeman):
            raise InvalidParam(f"zeeman must be finite, got {self.zeeman}")
        if int(self.level_m) != self.level_m or self.level_m < 0:
            raise InvalidParam(f"level_m must be a non-negative integer, got {self.level_m}")
        object.__setattr__(self, "n_axis", tuple(float(c) for c in axis))
        object.__setattr__(self, "level_m", int(self.level_m))

    @property
    def omega_m(self) -> float:
        """Oscillator level energy (m + 1/2) * omega of the qubit doublet."""
        return (self.level_m + 0.5) * self.omega

    @property
    def zeeman_or_zero(self) -> float:
        return 0.0 if self.zeeman is None else float(self.zeeman)

    @property
    def oscillator_length(self) -> float:
        """Ground-state length sqrt(1/(m_star*omega)) with hbar = 1."""
        return 1.0 / np.sqrt(self.m_star * self.omega)


def normalized_axis(v) -> tuple[float, float, float]:
    """Normalize a 3-vector for use as n_axis; rejects the zero vector."""
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise InvalidParam(f"axis must be a 3-vector, got shape {a.shape}")
    norm = np.linalg.norm(a)
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidParam("axis must be a nonzero finite 3-vector")
    return tuple(float(c) for c in a / norm)
