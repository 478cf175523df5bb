"""Exception hierarchy shared by all modules."""


class ConjugateError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ConjugateError, ValueError):
    """Input lies outside the domain an operation supports."""


class NoConvergence(ConjugateError, RuntimeError):
    """An iterative procedure exhausted its budget."""


class BudgetExceeded(ConjugateError, RuntimeError):
    """An enumeration would exceed its configured size cap."""


class DepthExceeded(ConjugateError, RuntimeError):
    """Word extension hit the depth cap before reaching the tolerance.

    ``best_bound`` holds the smallest error bound that was achieved.
    """

    def __init__(self, message, best_bound=float("inf"), value=None):
        super().__init__(message)
        self.best_bound = best_bound
        self.value = value


class MissingBoundary(ConjugateError, KeyError):
    """A corner was requested that has no declared boundary value."""


class IncompatibleSystem(ConjugateError, ValueError):
    """Evaluation was requested on a system that failed validation."""


class NonFinite(ConjugateError, ValueError):
    """A function produced NaN or infinity where a finite value is required."""


class EmptyCloud(ConjugateError, ValueError):
    """A distance was requested on an empty point cloud."""


class DegenerateFit(ConjugateError, ValueError):
    """A log-log regression has no usable spread."""
