"""Custom exceptions for logical state algebra.

This module defines domain-specific exceptions for the qlogic business area.
"""

from typing import Iterable


class QLogicException(Exception):
    """Base exception for all logical-engine errors.

    This base class allows catching all qlogic exceptions with a single except block.
    """

    pass


class UnknownQubitError(QLogicException):
    """Raised when a gate or selection names a qubit absent from the register.

    Attributes:
        label: The unknown qubit label.
        register: Labels of the register that was searched.
    """

    def __init__(self, label: str, register: Iterable[str]) -> None:
        """Initialize UnknownQubitError.

        Args:
            label: The unknown qubit label.
            register: Labels of the register that was searched.
        """
        self.label = label
        self.register = tuple(register)
        super().__init__(f"Qubit {label!r} not in register {self.register}")


class InvalidStateError(QLogicException):
    """Raised when amplitudes or a density matrix violate their invariants.

    Attributes:
        reason: Which invariant failed.
    """

    def __init__(self, reason: str) -> None:
        """Initialize InvalidStateError.

        Args:
            reason: Which invariant failed.
        """
        self.reason = reason
        super().__init__(f"Invalid quantum state: {reason}")


class DimensionMismatchError(QLogicException):
    """Raised when two operands live in Hilbert spaces of different size.

    Attributes:
        left: Dimension of the first operand.
        right: Dimension of the second operand.
    """

    def __init__(self, left: int, right: int) -> None:
        """Initialize DimensionMismatchError.

        Args:
            left: Dimension of the first operand.
            right: Dimension of the second operand.
        """
        self.left = left
        self.right = right
        super().__init__(f"Dimension mismatch: {left} vs {right}")


class EmptySelectionError(QLogicException):
    """Raised when a partial trace is asked to keep no qubit."""

    def __init__(self) -> None:
        """Initialize EmptySelectionError."""
        super().__init__("At least one qubit must be kept")
