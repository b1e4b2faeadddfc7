"""Custom exceptions for wavepacket propagation.

This module defines domain-specific exceptions for the wavesim business area.
"""

from typing import Any


class WaveSimException(Exception):
    """Base exception for all wavepacket-engine errors.

    This base class allows catching all wavesim exceptions with a single except block.
    """

    pass


class WindowTooSmallError(WaveSimException):
    """Raised when a particle window cannot hold one SAW wavelength.

    Attributes:
        extent: Window length (nm).
        wavelength: SAW wavelength (nm).
    """

    def __init__(self, extent: float, wavelength: float) -> None:
        """Initialize WindowTooSmallError.

        Args:
            extent: Window length (nm).
            wavelength: SAW wavelength (nm).
        """
        self.extent = extent
        self.wavelength = wavelength
        super().__init__(f"Window of {extent:g} nm is shorter than the SAW wavelength {wavelength:g} nm")


class SolverFailureError(WaveSimException):
    """Raised when a banded Crank-Nicolson solve fails or returns non-finite values.

    Attributes:
        reason: Description of the failure.
    """

    def __init__(self, reason: str) -> None:
        """Initialize SolverFailureError.

        Args:
            reason: Description of the failure.
        """
        self.reason = reason
        super().__init__(f"Crank-Nicolson solve failed: {reason}")


class IncompleteTransmissionError(WaveSimException):
    """Raised when a packet is partly reflected by a barrier.

    Attributes:
        qubit: Label of the qubit crossing the barrier.
        transmitted: Fraction still riding the SAW minimum.
        threshold: Minimum accepted fraction.
    """

    def __init__(self, qubit: str, transmitted: float, threshold: float) -> None:
        """Initialize IncompleteTransmissionError.

        Args:
            qubit: Label of the qubit crossing the barrier.
            transmitted: Fraction still riding the SAW minimum.
            threshold: Minimum accepted fraction.
        """
        self.qubit = qubit
        self.transmitted = transmitted
        self.threshold = threshold
        super().__init__(f"Qubit {qubit}: transmitted norm {transmitted:.4f} below {threshold}")


class PhaseIllDefinedError(WaveSimException):
    """Raised when a normalized positional overlap is too small to carry a phase.

    Attributes:
        overlap: Normalized overlap magnitude.
    """

    def __init__(self, overlap: float) -> None:
        """Initialize PhaseIllDefinedError.

        Args:
            overlap: Normalized overlap magnitude.
        """
        self.overlap = overlap
        super().__init__(f"Overlap magnitude {overlap:.3f} below 0.5; packet distorted")


class RankCapExceededError(WaveSimException):
    """Raised when re-factorization cannot meet the tolerance within the rank cap.

    Attributes:
        rank_cap: Maximum number of kept product terms.
        discarded: Relative weight that would be discarded at the cap.
        tolerance: Largest acceptable discarded weight.
    """

    def __init__(self, rank_cap: int, discarded: float, tolerance: float) -> None:
        """Initialize RankCapExceededError.

        Args:
            rank_cap: Maximum number of kept product terms.
            discarded: Relative weight that would be discarded at the cap.
            tolerance: Largest acceptable discarded weight.
        """
        self.rank_cap = rank_cap
        self.discarded = discarded
        self.tolerance = tolerance
        super().__init__(f"Rank cap {rank_cap} discards weight {discarded:.3e} > {tolerance:.1e}")


class MissingDeviceLayoutError(WaveSimException):
    """Raised when a gate has no barrier or coupler placed for it.

    Attributes:
        gate: The gate lacking a structure.
    """

    def __init__(self, gate: Any) -> None:
        """Initialize MissingDeviceLayoutError.

        Args:
            gate: The gate lacking a structure.
        """
        self.gate = gate
        super().__init__(f"No device structure matches gate {gate}")
