"""Wavepacket business area module.

This module propagates SAW-driven carriers through barriers and couplers on
co-moving grids and reads logical states out of their wavefunctions.
"""

from .exceptions import (
    IncompleteTransmissionError,
    MissingDeviceLayoutError,
    PhaseIllDefinedError,
    RankCapExceededError,
    SolverFailureError,
    WaveSimException,
    WindowTooSmallError,
)
from .model import (
    BarrierSpec,
    CouplerSpec,
    DenseState,
    MaterialParams,
    PotentialStack,
    PropagationDiagnostics,
    SawPotential,
    SemiOneDState,
    Term,
    Window,
)

__all__ = [
    "MaterialParams",
    "SawPotential",
    "BarrierSpec",
    "CouplerSpec",
    "PotentialStack",
    "Window",
    "Term",
    "SemiOneDState",
    "DenseState",
    "PropagationDiagnostics",
    "WaveSimException",
    "WindowTooSmallError",
    "SolverFailureError",
    "IncompleteTransmissionError",
    "PhaseIllDefinedError",
    "RankCapExceededError",
    "MissingDeviceLayoutError",
]
