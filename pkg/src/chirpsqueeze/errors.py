"""Exception types shared across the package.

Solver routines raise these instead of returning sentinel values, so that
batch drivers can map failure modes to exit codes.
"""


class ChirpSqueezeError(Exception):
    """Base class for all package errors."""


class ConfigError(ChirpSqueezeError):
    """Invalid or inconsistent run configuration."""


class DomainError(ChirpSqueezeError, ValueError):
    """Input outside the validity domain of a model (wavelength, detuning, x range)."""


class OutOfBandError(ChirpSqueezeError):
    """Detuning has no perfect phase-matching point inside the crystal."""


class SingularProfileError(ChirpSqueezeError):
    """Poling profile violates monotonicity or has a vanishing derivative where one is needed."""


class DesignInfeasibleError(ChirpSqueezeError):
    """Requested delay law or band cannot be realized by a monotonic profile."""


class AccuracyLossError(ChirpSqueezeError):
    """A numerical certificate (Wronskian constancy, unitarity drift) exceeded its bound.

    Carries the offending residual so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StiffnessError(ChirpSqueezeError):
    """Adaptive integrator step size underflowed or the step budget was exhausted."""


class UnwrapError(ChirpSqueezeError):
    """Angle unwrapping could not track the branch reliably on the given grid."""
