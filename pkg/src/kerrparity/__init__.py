"""Error models for the weak-nonlinearity, bus-mediated two-qubit parity gate.

``kerrparity.analytic`` holds the closed-form error models, ``kerrparity.oracle``
an independent simulation of the hybrid qubit-bus state used to check them,
and ``kerrparity.sweep`` / ``kerrparity.cli`` the sweep and verification
front end.
"""

from .errors import ConventionError, DomainError, KerrParityError, NumericalError, UsageError
from .numerics import NORMALIZED, PAPER, QuadratureConvention

__version__ = "0.1.0"

__all__ = [
    "ConventionError",
    "DomainError",
    "KerrParityError",
    "NORMALIZED",
    "NumericalError",
    "PAPER",
    "QuadratureConvention",
    "UsageError",
]
