"""Exception types raised across the package."""


class KmsLabError(Exception):
    """Base class for all package errors."""


class TracialRegime(KmsLabError, ValueError):
    """beta = 0: no conformal measure question, only tracial states."""


class DivergentSeries(KmsLabError):
    """The orbit partition function diverges; no conformal measure lives on the orbit."""


class PeriodicObstruction(KmsLabError):
    """Periodic orbit whose Birkhoff sum over one period is nonzero."""


class UnsupportedCylinder(KmsLabError):
    """Constraint window too wide for an enumerating measure variant."""


class NoConvergence(KmsLabError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InsufficientRecurrences(KmsLabError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class VariantMismatch(KmsLabError):
    """State or measure variant incompatible with the requested operation."""


class UncertifiedTail(KmsLabError):
    """A level sum could not be closed in finite form."""
