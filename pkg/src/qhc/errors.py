"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QHCError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(QHCError, ValueError):
    """Operands have incompatible lengths or shapes."""


class IndexRangeError(QHCError, IndexError):
    """An index or subsystem number lies outside its admissible range."""


class UnsupportedPartitionError(QHCError, ValueError):
    """The operation needs a different number of artificial subsystems."""


class ConventionMismatchError(QHCError, ValueError):
    """Tensor-product structure requested under a non row-major index map."""


class UnsupportedObservableError(QHCError, ValueError):
    """The observable is outside what the operation can handle."""


class ConsistencyError(QHCError, ArithmeticError):
    """A result failed an internal numerical consistency check."""


class ValidationError(QHCError, ValueError):
    """An input violates a domain invariant.

    ``condition`` names the violated invariant (e.g. ``"trace"``) and
    ``magnitude`` says by how much it is violated.
    """

    def __init__(self, condition: str, magnitude: float, message: str | None = None):
        self.condition = condition
        self.magnitude = float(magnitude)
        if message is None:
            message = f"{condition} violated by {self.magnitude:.3e}"
        super().__init__(message)
