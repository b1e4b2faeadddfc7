"""Calibration business area module.

This module sweeps barrier and coupler geometries for the phases the
compiled networks need and scans the logical fidelity under detuning.
"""

from .exceptions import CalibrateException, InvalidSweepGridError, NoFeasiblePointError, PhaseExtractionError
from .model import CalibrationResult, SweepAxis, SweepGrid

__all__ = [
    "SweepAxis",
    "SweepGrid",
    "CalibrationResult",
    "CalibrateException",
    "InvalidSweepGridError",
    "NoFeasiblePointError",
    "PhaseExtractionError",
]
