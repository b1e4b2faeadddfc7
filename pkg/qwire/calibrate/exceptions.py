"""Custom exceptions for geometry calibration.

This module defines domain-specific exceptions for the calibrate business area.
"""

from typing import Optional


class CalibrateException(Exception):
    """Base exception for all calibration errors.

    This base class allows catching all calibrate exceptions with a single except block.
    """

    pass


class InvalidSweepGridError(CalibrateException):
    """Raised when a sweep grid names parameters the sweep cannot vary.

    Attributes:
        reason: What is wrong with the grid.
    """

    def __init__(self, reason: str) -> None:
        """Initialize InvalidSweepGridError.

        Args:
            reason: What is wrong with the grid.
        """
        self.reason = reason
        super().__init__(f"Invalid sweep grid: {reason}")


class NoFeasiblePointError(CalibrateException):
    """Raised when no sweep point meets the transmission and phase constraints.

    Attributes:
        target: Target phase (rad).
        tolerance: Accepted phase error (rad), if one was required.
    """

    def __init__(self, target: float, tolerance: Optional[float]) -> None:
        """Initialize NoFeasiblePointError.

        Args:
            target: Target phase (rad).
            tolerance: Accepted phase error (rad), if one was required.
        """
        self.target = target
        self.tolerance = tolerance
        within = f" within {tolerance:.3g} rad" if tolerance is not None else ""
        super().__init__(f"No sweep point reaches {target:.4f} rad{within} with full transmission")


class PhaseExtractionError(CalibrateException):
    """Raised when a single-gate run of the device geometry yields no usable phase.

    Attributes:
        gate: ``barrier`` or ``coupler``.
        phase: Extracted phase (rad), NaN when the packet was distorted.
        transmitted: Fraction still riding the SAW minimum.
    """

    def __init__(self, gate: str, phase: float, transmitted: float) -> None:
        """Initialize PhaseExtractionError.

        Args:
            gate: ``barrier`` or ``coupler``.
            phase: Extracted phase (rad), NaN when the packet was distorted.
            transmitted: Fraction still riding the SAW minimum.
        """
        self.gate = gate
        self.phase = phase
        self.transmitted = transmitted
        super().__init__(f"No {gate} phase at the device geometry: phase {phase:.4f} rad, transmitted {transmitted:.4f}")
