"""Exception types shared across the package."""

__all__ = ["CoexistError", "ConfigError", "ConvergenceError", "SolvabilityError"]


class CoexistError(Exception):
    """Base class for all package errors."""


class ConfigError(CoexistError):
    """Invalid domain spec, model descriptor, or run configuration."""


class ConvergenceError(CoexistError):
    """An iterative solver failed to reach its tolerance.

    Carries the achieved residual and the iteration count so callers can
    report how far the solve got.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class SolvabilityError(CoexistError):
    """A constrained solve produced a kernel component larger than allowed."""

    def __init__(self, message: str, xi: float):
        super().__init__(f"{message} (kernel multiplier xi={xi:.3e})")
        self.xi = xi
