"""Pydantic models for run reports and invariant checks.

Complex numbers are stored as ``[re, im]`` pairs; matrices are nested lists
of such pairs, rows first, in the order of ``labels``.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from qwire.classical.model import FactorResult
from qwire.enums import PropagationMode, RunMode

SCHEMA_VERSION = "1.0"
PROBABILITY_TOL = 1e-6

ComplexPair = tuple[float, float]


def encode_matrix(matrix: np.ndarray) -> list[list[ComplexPair]]:
    """Nested ``[re, im]`` lists of a complex matrix."""
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(matrix, dtype=complex)]


def decode_matrix(rows: list[list[ComplexPair]]) -> np.ndarray:
    """Inverse of :func:`encode_matrix`."""
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


class SolverDiagnostics(BaseModel):
    """Bookkeeping of a wavepacket run.

    Attributes:
        initial_norm: Norm after injection.
        final_norm: Norm after the last gate.
        norm_drift: final_norm - initial_norm.
        truncation_weight: Total relative weight discarded by re-factorization.
        max_rank: Largest number of product terms reached.
        steps: Crank-Nicolson steps taken.
        min_transmission: Smallest trapped fraction seen after a barrier.
        elapsed_seconds: Wall-clock time of the propagation.
    """

    initial_norm: float
    final_norm: float
    norm_drift: float
    truncation_weight: float = Field(..., ge=0)
    max_rank: int = Field(..., ge=0)
    steps: int = Field(..., ge=0)
    min_transmission: float
    elapsed_seconds: float = Field(..., ge=0)


class OutcomeRow(BaseModel):
    """Probability and post-processing of one reported outcome.

    Attributes:
        label: Reported bitstring of the argument register.
        probability: Probability of reading it.
        result: Order and factors derived from it.
    """

    label: str
    probability: float = Field(..., ge=0, le=1 + PROBABILITY_TOL)
    result: FactorResult


class RunReport(BaseModel):
    """End-to-end experiment output.

    Attributes:
        schema_version: Format version.
        modulus: N.
        co_prime: C.
        mode: How the network was evaluated.
        propagation: Wavepacket representation of a physical run.
        phi: Phase-shifter phase used (rad).
        gamma: Conditional phase used (rad).
        labels: Register of the density matrix, first label most significant.
        density_matrix: Final logical density matrix.
        fidelity: Overlap with the ideal output state.
        linear_entropy: Normalized linear entropy per argument qubit, and of
            the argument pair when there are two.
        probabilities: Logical probabilities over ``labels``.
        outcomes: Reported argument outcomes with their classification.
        success_probability: Total probability of outcomes yielding factors.
        diagnostics: Solver bookkeeping of a physical run.
    """

    schema_version: str = SCHEMA_VERSION
    modulus: int
    co_prime: int
    mode: RunMode
    propagation: Optional[PropagationMode] = None
    phi: float
    gamma: float
    labels: tuple[str, ...]
    density_matrix: list[list[ComplexPair]]
    fidelity: float = Field(..., ge=0, le=1)
    linear_entropy: dict[str, float]
    probabilities: dict[str, float]
    outcomes: list[OutcomeRow]
    success_probability: float = Field(..., ge=0, le=1 + PROBABILITY_TOL)
    diagnostics: Optional[SolverDiagnostics] = None

    @model_validator(mode="after")
    def _check_probabilities(self) -> "RunReport":
        for name, table in (
            ("probabilities", self.probabilities.values()),
            ("outcomes", [row.probability for row in self.outcomes]),
        ):
            total = math.fsum(table)
            if abs(total - 1.0) > PROBABILITY_TOL:
                raise ValueError(f"{name} sum to {total!r}, not 1")
        return self

    def density(self) -> np.ndarray:
        """Density matrix as a complex array."""
        return decode_matrix(self.density_matrix)


class CheckResult(BaseModel):
    """One named invariant check.

    Attributes:
        name: Check name.
        passed: Whether it held.
        detail: Measured value or failure reason.
    """

    name: str
    passed: bool
    detail: str = ""


class VerifyReport(BaseModel):
    """Results of the invariant suite."""

    schema_version: str = SCHEMA_VERSION
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]
