"""Reports business area module.

This module orchestrates end-to-end factoring runs, emits machine-readable
reports and runs the invariant suite behind the ``verify`` command.
"""

from .exceptions import InvariantCheckError, MissingLayoutError, ReportsException, ReportWriteError
from .model import CheckResult, OutcomeRow, RunReport, SolverDiagnostics, VerifyReport

__all__ = [
    "RunReport",
    "OutcomeRow",
    "SolverDiagnostics",
    "CheckResult",
    "VerifyReport",
    "ReportsException",
    "MissingLayoutError",
    "ReportWriteError",
    "InvariantCheckError",
]
