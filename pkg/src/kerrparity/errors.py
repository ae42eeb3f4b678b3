"""Exception hierarchy shared by the library and the command-line front end."""

from __future__ import annotations


class KerrParityError(Exception):
    """Base class for every error raised by :mod:`kerrparity`."""


class UsageError(KerrParityError, ValueError):
    """Invalid arguments or parameters supplied by the caller."""


class DomainError(UsageError):
    """An input lies outside the numerically guarded domain (e.g. huge coherent labels)."""


class ConventionError(UsageError):
    """The requested quadrature convention is not supported by a backend."""


class NumericalError(KerrParityError, ArithmeticError):
    """A numerical procedure failed to converge or a problem turned out infeasible.

    ``estimate`` carries the best value available when the failure occurred and
    ``error_estimate`` its estimated absolute error (``None`` if unknown).
    """

    def __init__(self, message: str, estimate=None, error_estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
