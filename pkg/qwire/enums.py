"""Enumeration types shared across the simulator.

This module defines all enum types used across business areas.
"""

import enum


class GateKind(enum.Enum):
    """Native quantum-wire gate kinds.

    Attributes:
        RX: Beam splitter mixing the two wires of one qubit.
        R0: Phase shifter acting on wire 0 of one qubit.
        R1: Phase shifter acting on wire 1 of one qubit.
        T: Coulomb coupler, conditional phase on an ordered qubit pair.
    """

    RX = "RX"
    R0 = "R0"
    R1 = "R1"
    T = "T"


class RunMode(enum.Enum):
    """How an experiment evaluates the compiled network.

    Attributes:
        IDEAL: Logical engine with exact phases (pi).
        DETUNED: Logical engine with the calibrated phases.
        PHYSICAL: Wavepacket engine end-to-end.
    """

    IDEAL = "ideal"
    DETUNED = "detuned"
    PHYSICAL = "physical"


class PropagationMode(enum.Enum):
    """Multi-particle representation used by the wavepacket engine.

    Attributes:
        RANK_LIMITED: Sum of orbital products, SVD re-factorized after couplers.
        DENSE_ORACLE: Full k-particle grid per configuration (coarse).
        PHASE_ORACLE: Barriers and couplers replaced by exact phase factors.
    """

    RANK_LIMITED = "rank_limited"
    DENSE_ORACLE = "dense_oracle"
    PHASE_ORACLE = "phase_oracle"


class OutcomeStatus(enum.Enum):
    """Classification of one measured argument-register outcome.

    Attributes:
        SUCCESS: Order found and non-trivial factors recovered.
        FAILURE: No order can be extracted, or the order is odd.
        TRIVIAL: Order extracted but the factors are 1 and N.
    """

    SUCCESS = "success"
    FAILURE = "failure"
    TRIVIAL = "trivial"


class ReportFormat(enum.Enum):
    """Output format of an emitted run report."""

    JSON = "json"
    CSV_BUNDLE = "csv-bundle"
