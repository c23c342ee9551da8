"""Exception hierarchy shared by all squeezelab modules."""


class SqueezeLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SqueezeLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(DomainError):
    """A documented precondition of an operation is violated."""


class TopologyError(DomainError):
    """Connectivity of a domain or condenser is not the expected one."""


class DegenerateCondenserError(DomainError):
    """The two plates of a condenser touch, so its capacity is infinite."""


class AdmissibilityError(DomainError):
    """A partition candidate is not an admissible pair of domains."""


class RefinementError(DomainError):
    """A geometric feature is smaller than one grid cell."""

    def __init__(self, message, suggested_resolution=None):
        super().__init__(message)
        self.suggested_resolution = suggested_resolution


class GridExtentError(SqueezeLabError):
    """A grid operation needs data outside the grid."""


class AccuracyError(SqueezeLabError):
    """The requested quantity cannot be computed to useful accuracy."""


class SolverError(SqueezeLabError, RuntimeError):
    """An iterative linear solve failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InitializationError(SqueezeLabError):
    """An optimizer has no feasible starting point."""
