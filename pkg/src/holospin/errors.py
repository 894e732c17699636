"""Exception types shared across the package."""


class HolospinError(Exception):
    """Base class for all package errors."""


class InvalidParam(HolospinError):
    """A physical or driving parameter is out of its allowed range."""


class ResonantDriving(InvalidParam):
    """Driving frequency coincides with the trap frequency (n < 2)."""


class UnsupportedProfile(HolospinError):
    """No closed-form response exists for the requested profile family."""


class ResonantMode(HolospinError):
    """A nonzero driving Fourier mode sits on the oscillator resonance."""

    def __init__(self, mode_index, message=None):
        self.mode_index = mode_index
        super().__init__(message or f"driving Fourier mode k={mode_index} is resonant")


class StepTooLarge(HolospinError):
    """Integrator residual check failed at the requested step size."""


class NonCyclicTrajectory(HolospinError):
    """A phase functional was requested for a trajectory that does not close."""


class NonUnitVector(HolospinError):
    """A spinor or Bloch vector is not normalized."""


class GridTooSmall(HolospinError):
    """Wavefunction amplitude leaks past the position-grid boundary."""


class GridMismatch(HolospinError):
    """Two grid states live on different position grids."""


class NormDrift(HolospinError):
    """Wavefunction norm drifted beyond tolerance during evolution."""


class ConfigError(HolospinError):
    """Scenario configuration is malformed or inconsistent."""
