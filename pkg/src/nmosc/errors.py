"""Exception hierarchy.

Every error raised deliberately by the package derives from :class:`NmoscError`.
The CLI maps the three families below onto process exit codes.
"""


class NmoscError(Exception):
    """Base class for all package errors."""


class ConfigError(NmoscError):
    """Invalid or inconsistent run configuration (CLI exit code 1)."""


class NumericError(NmoscError):
    """A numerical procedure failed to deliver its contract (exit code 2)."""


class DomainError(NmoscError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedVariantError(NmoscError, TypeError):
    """Operation is not defined for the given spectral-density variant."""


class DivergenceError(NumericError):
    """An integral required by the operation does not converge."""


class AccuracyError(NumericError):
    """Quadrature did not reach the requested tolerance."""


class StepSizeError(NumericError):
    """Degenerate implicit step for the chosen step size."""


class ConvergenceError(NumericError):
    """Iterative root search exhausted its iteration budget."""


class InsufficientDataError(NumericError):
    """Trajectory too short for the requested analysis."""


class GridMismatchError(NumericError):
    """Time grids of two objects that must share a grid differ."""


class DimensionError(NumericError):
    """Many-body sector too large for dense diagonalization."""


class ConsistencyError(NumericError):
    """Two routes to the same quantity disagree beyond tolerance."""
