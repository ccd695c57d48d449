"""Exception hierarchy shared across the package."""
from __future__ import annotations


class CasimirMembraneError(Exception):
    """Base class for all package errors."""


class DomainError(CasimirMembraneError, ValueError):
    """An argument is outside the physical domain of an operation."""


class SingularInputError(DomainError):
    """An input hits a removable singularity; use the dedicated limit path."""


class GeometryError(DomainError):
    """Geometry outside the validity range of the proximity-force treatment."""


class BoundsError(DomainError):
    """A position falls outside the sampled region (e.g. off the patch map)."""


class NumericalError(CasimirMembraneError):
    """Quadrature or series summation failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved_residual: float | None = None):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class InsufficientDataError(CasimirMembraneError, ValueError):
    """Not enough samples for the requested estimate."""


class FitError(CasimirMembraneError):
    """A least-squares problem is degenerate or failed to converge."""

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class ConvergenceError(FitError):
    """An iterative fit hit its iteration or damping limit."""


class ConfigError(CasimirMembraneError, ValueError):
    """Configuration document is malformed, incomplete or inconsistent."""
