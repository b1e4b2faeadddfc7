"""Value types for the logical gate engine.

Numeric state types are frozen dataclasses wrapping read-only numpy arrays;
gate descriptions are Pydantic models so networks can be validated and
serialized like any other configuration.
"""

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qwire.enums import GateKind

from .exceptions import InvalidStateError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-10
MAX_QUBITS = 4


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Pure logical state of a small qubit register.

    The first label is the most significant bit of the amplitude index.

    Attributes:
        amplitudes: Complex amplitudes, length 2**n_qubits.
        labels: Ordered qubit names.
    """

    amplitudes: np.ndarray
    labels: tuple[str, ...]
    tol: float = field(default=NORM_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.labels)
        if not 1 <= n <= MAX_QUBITS:
            raise InvalidStateError(f"{n} qubits outside 1..{MAX_QUBITS}")
        if len(set(self.labels)) != n:
            raise InvalidStateError(f"duplicate labels in {self.labels}")
        if amplitudes.size != 2**n:
            raise InvalidStateError(f"{amplitudes.size} amplitudes for {n} qubits")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > self.tol:
            raise InvalidStateError(f"norm {norm!r} differs from 1")

    @property
    def n_qubits(self) -> int:
        """Number of qubits in the register."""
        return len(self.labels)

    @classmethod
    def basis(cls, labels: tuple[str, ...], bits: tuple[int, ...] | None = None) -> "StateVector":
        """Computational basis state.

        Args:
            labels: Ordered qubit names.
            bits: One bit per label; all zeros when omitted.

        Returns:
            The basis state |bits>.
        """
        bits = bits or (0,) * len(labels)
        index = int("".join(str(b) for b in bits), 2)
        amplitudes = np.zeros(2 ** len(labels), dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, tuple(labels))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit."""
        return self.amplitudes.reshape((2,) * self.n_qubits)


@dataclass(frozen=True)
class DensityMatrix:
    """Logical density matrix of a small qubit register.

    Attributes:
        entries: Complex 2**n x 2**n matrix.
        labels: Ordered qubit names, first label most significant.
        tol: Tolerance used when validating trace and Hermiticity.
    """

    entries: np.ndarray
    labels: tuple[str, ...]
    tol: float = field(default=HERMITIAN_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", tuple(self.labels))
        dim = 2 ** len(self.labels)
        if entries.shape != (dim, dim):
            raise InvalidStateError(f"shape {entries.shape} for {len(self.labels)} qubits")
        if np.max(np.abs(entries - entries.conj().T)) > self.tol:
            raise InvalidStateError("matrix is not Hermitian")
        trace = np.trace(entries)
        if abs(trace - 1.0) > self.tol:
            raise InvalidStateError(f"trace {trace!r} differs from 1")
        if np.min(np.linalg.eigvalsh(entries)) < EIGEN_FLOOR:
            raise InvalidStateError("matrix has negative eigenvalues")

    @property
    def n_qubits(self) -> int:
        """Number of qubits in the register."""
        return len(self.labels)

    @property
    def purity(self) -> float:
        """Tr rho^2."""
        return float(np.real(np.trace(self.entries @ self.entries)))


class GateSpec(BaseModel):
    """One native quantum-wire gate.

    Attributes:
        kind: Gate kind.
        angle: theta for RX, phi for R0/R1, gamma for T (radians).
        targets: One qubit name, or the ordered pair (a, b) for T.
    """

    kind: GateKind
    angle: float = Field(allow_inf_nan=False)
    targets: tuple[str, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_targets(self) -> "GateSpec":
        expected = 2 if self.kind is GateKind.T else 1
        if len(self.targets) != expected:
            raise ValueError(f"{self.kind.value} needs {expected} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"targets must be distinct, got {self.targets}")
        return self

    def __str__(self) -> str:
        return f"{self.kind.value}^{','.join(self.targets)}({self.angle / np.pi:.3g}pi)"


class GateSequence(BaseModel):
    """Ordered gate network on a named register.

    Gates are applied first-listed-first, i.e. in time order along the wires.

    Attributes:
        register: Ordered qubit names the network acts on.
        gates: Gates in application order.
    """

    register: tuple[str, ...]
    gates: tuple[GateSpec, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_register(self) -> "GateSequence":
        for gate in self.gates:
            missing = [t for t in gate.targets if t not in self.register]
            if missing:
                raise ValueError(f"gate {gate} targets {missing} outside register {self.register}")
        return self

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class PhaseEquivalence:
    """Outcome of comparing a unitary with a target up to diagonal phases.

    ``diag(left) @ unitary @ diag(right) == target`` when ``equivalent``.

    Attributes:
        equivalent: Whether such diagonal corrections exist.
        magnitudes_match: Whether entrywise magnitudes agree.
        left: Left diagonal phase factors (empty when not equivalent).
        right: Right diagonal phase factors (empty when not equivalent).
    """

    equivalent: bool
    magnitudes_match: bool
    left: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    right: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
