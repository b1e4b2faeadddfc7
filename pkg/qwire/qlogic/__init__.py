"""Logical gate engine.

This module holds exact state algebra, the native quantum-wire gate set and
the compiled modular-exponentiation networks.
"""

from .exceptions import (
    DimensionMismatchError,
    EmptySelectionError,
    InvalidStateError,
    QLogicException,
    UnknownQubitError,
)
from .model import DensityMatrix, GateSequence, GateSpec, PhaseEquivalence, StateVector

__all__ = [
    "StateVector",
    "DensityMatrix",
    "GateSpec",
    "GateSequence",
    "PhaseEquivalence",
    "QLogicException",
    "UnknownQubitError",
    "InvalidStateError",
    "DimensionMismatchError",
    "EmptySelectionError",
]
