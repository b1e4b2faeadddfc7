"""Custom exceptions for experiment runs and report emission.

This module defines domain-specific exceptions for the reports business area.
"""

from pathlib import Path

from qwire.enums import RunMode


class ReportsException(Exception):
    """Base exception for all reports errors.

    This base class allows catching all reports exceptions with a single except block.
    """

    pass


class MissingLayoutError(ReportsException):
    """Raised when a physical run is requested without a device layout.

    Attributes:
        mode: The requested run mode.
    """

    def __init__(self, mode: RunMode) -> None:
        """Initialize MissingLayoutError.

        Args:
            mode: The requested run mode.
        """
        self.mode = mode
        super().__init__(f"Run mode '{mode.value}' needs a device layout in the configuration")


class ReportWriteError(ReportsException):
    """Raised when a report file cannot be written.

    Attributes:
        path: File that failed.
        reason: Underlying I/O error text.
    """

    def __init__(self, path: Path, reason: str) -> None:
        """Initialize ReportWriteError.

        Args:
            path: File that failed.
            reason: Underlying I/O error text.
        """
        self.path = path
        self.reason = reason
        super().__init__(f"Cannot write {path}: {reason}")


class InvariantCheckError(ReportsException):
    """Raised when one or more invariant checks fail.

    Attributes:
        failed: Names of the failing checks.
    """

    def __init__(self, failed: list[str]) -> None:
        """Initialize InvariantCheckError.

        Args:
            failed: Names of the failing checks.
        """
        self.failed = failed
        super().__init__(f"Invariant checks failed: {', '.join(failed)}")
