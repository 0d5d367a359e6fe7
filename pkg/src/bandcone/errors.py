"""Exception hierarchy shared by every bandcone module."""

from __future__ import annotations


class BandconeError(Exception):
    """Base class for all library errors."""


class DomainError(BandconeError, ValueError):
    """An argument lies outside the domain of a function."""


class DesignError(BandconeError, ValueError):
    """A dataset or design matrix violates its structural invariants."""


class NumericalError(BandconeError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy answer."""


class IntegrationError(NumericalError):
    """Adaptive quadrature ran out of subdivisions.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether it is good enough.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(NumericalError):
    """The root-finding bracket does not straddle a sign change."""


class NotPositiveDefiniteError(NumericalError):
    """A matrix expected to be symmetric positive definite is not."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(NumericalError):
    """An iterative fit diverged or hit its iteration limit."""
