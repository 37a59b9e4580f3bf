"""Exception types raised by kinkstatics."""


class KinkStaticsError(Exception):
    """Base class for all library errors."""


class NumericalFailure(KinkStaticsError):
    """A quadrature, eigen-solve or integration did not produce a usable number."""


class ModelInconsistency(KinkStaticsError):
    """A field model's analytic data disagree with each other."""


class OutOfRange(KinkStaticsError, ValueError):
    """A collective variable lies outside its admissible interval."""


class SingularConfiguration(KinkStaticsError):
    """A closed-form profile has a vanishing denominator on the requested points."""


class SingularBoundary(KinkStaticsError):
    """Boundary data for the perturbative distortion divide by zero."""


class UnsupportedConfiguration(KinkStaticsError, ValueError):
    """The requested pair kind is not available for this model."""


class UsageError(KinkStaticsError, ValueError):
    """Inputs violate a precondition (mismatched grids, non-vacuum ends, ...)."""


class StepFailure(NumericalFailure):
    """Newton iteration of an implicit relaxation step did not converge.

    Attributes
    ----------
    r : float
        Separation parameter at the start of the failed step.
    residual : float
        Max-norm of the nonlinear residual at the last iterate.
    """

    def __init__(self, message, r, residual):
        super().__init__(message)
        self.r = r
        self.residual = residual
