"""Exception types raised by sharpsphere operations."""

from __future__ import annotations


class SharpSphereError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SharpSphereError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class ConstantInputError(SharpSphereError):
    """Raised when a quotient is evaluated on a (numerically) constant function."""


class PositivityError(SharpSphereError):
    """Raised when a function required to be positive is not uniformly positive."""


class DegreeOverflowError(SharpSphereError):
    """Raised when a basis degree exceeds the aliasing guard K <= n/2."""


class DimensionMismatchError(SharpSphereError):
    """Raised when nodal data and a basis live on different quadrature rules."""


class StepSizeError(SharpSphereError):
    """Raised when the nonlinear flow cannot keep positivity or resolution."""


class EmptyWindowError(SharpSphereError):
    """Raised when a decay fit has fewer than two usable samples."""


class SymmetryError(SharpSphereError):
    """Raised when an operation requires even data and receives something else."""


class ConfigError(SharpSphereError):
    """Raised when a run configuration violates a module precondition."""
