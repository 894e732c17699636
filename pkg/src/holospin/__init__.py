"""Exact holonomy of a spin-orbit qubit in a driven 1D quantum dot.

The package solves, in closed form and numerically, the cyclic evolution
of an electron in a moving harmonic trap with time-dependent Rashba
coupling: classical driven-oscillator responses, the spin-rotation and
geometric/dynamical phases of one cycle, the resulting U(2) holonomy on
the Kramers doublet, and an independent split-step Schroedinger
integrator that verifies the analytic solution on a position grid.
"""

from .driving import (
    DrivingProfile,
    ProfileKind,
    Ramp,
    make_broken_ellipsoidal,
    make_circular,
    make_fourier,
    make_sequential_square,
    make_tabulated,
)
from .errors import (
    ConfigError,
    GridMismatch,
    GridTooSmall,
    HolospinError,
    InvalidParam,
    NonCyclicTrajectory,
    NonUnitVector,
    NormDrift,
    ResonantDriving,
    ResonantMode,
    StepTooLarge,
    UnsupportedProfile,
)
from .holonomy import (
    BlochVector,
    HolonomyU2,
    anandan_berry,
    apply,
    compose,
    decompose,
    rotate_bloch,
    total_phase_matrix,
)
from .params import PhysicalParams
from .phases import (
    PhaseSet,
    action_and_energy,
    closed_form_circular,
    closed_form_square,
    compute_phase_set,
    phi_a,
    phi_ad,
    phi_c,
    phi_contour_C1,
    phi_contour_C2,
    phi_spin,
)
from .response import (
    ResponseTrajectory,
    check_cyclic,
    find_periodic_ic,
    solve_analytic,
    solve_numeric,
)

__version__ = "0.1.0"
