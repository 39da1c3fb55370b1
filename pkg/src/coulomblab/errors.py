"""Exception classes shared across the package."""


class LabError(Exception):
    """Base class for all errors raised by coulomblab."""


class InvalidWindowError(LabError, ValueError):
    """A window is degenerate or violates its invariants."""


class ResourceError(LabError):
    """A requested computation exceeds a configured size cap."""


class NumericalError(LabError):
    """A numerical routine failed to reach its accuracy target.

    ``residual`` carries the offending residual when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``best``.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message, residual=residual)
        self.best = best


class DomainError(LabError, ValueError):
    """An argument lies outside the domain where a routine is valid."""
