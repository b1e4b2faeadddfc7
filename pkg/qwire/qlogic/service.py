"""Gate algebra, compiled networks and state metrics of the logical engine.

All functions are pure: they take immutable values and return new ones.
"""

import logging
import math
from collections import deque
from typing import Iterable, Optional

import numpy as np

from qwire.classical.exceptions import NonCompiledInstanceError
from qwire.classical.service import mod_exp
from qwire.enums import GateKind

from .exceptions import DimensionMismatchError, EmptySelectionError, UnknownQubitError
from .model import DensityMatrix, GateSequence, GateSpec, PhaseEquivalence, StateVector

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
# T^{(a,b)} phases the (a=0, b=1) component; the only choice that reproduces
# the GHZ and Bell-product network outputs.
T_PHASED_COMPONENT: tuple[int, int] = (0, 1)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
# NOT on the target when the control reads 0.
ZERO_CONTROLLED_NOT = np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)


def make_rx(theta: float) -> np.ndarray:
    """Beam-splitter matrix R_x(theta) on the basis {|0>, |1>}.

    Args:
        theta: Mixing angle in radians.

    Returns:
        2x2 unitary [[cos, i sin], [i sin, cos]] of theta/2.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def make_phase(wire: int, phi: float) -> np.ndarray:
    """Phase-shifter matrix R_wire(phi).

    Args:
        wire: Wire carrying the barrier, 0 or 1.
        phi: Delay phase in radians.

    Returns:
        Diagonal unitary with exp(i phi) on the selected wire.
    """
    if wire not in (0, 1):
        raise ValueError(f"wire must be 0 or 1, got {wire}")
    diagonal = np.ones(2, dtype=complex)
    diagonal[wire] = np.exp(1j * phi)
    return np.diag(diagonal)


def make_t(gamma: float, phased: tuple[int, int] = T_PHASED_COMPONENT) -> np.ndarray:
    """Conditional-phase matrix T(gamma) on an ordered pair (a, b).

    Args:
        gamma: Conditional phase in radians.
        phased: Basis component (a, b) receiving exp(i gamma).

    Returns:
        4x4 diagonal unitary on the basis |ab>, a most significant.
    """
    diagonal = np.ones(4, dtype=complex)
    diagonal[2 * phased[0] + phased[1]] = np.exp(1j * gamma)
    return np.diag(diagonal)


def gate_matrix(gate: GateSpec, t_convention: tuple[int, int] = T_PHASED_COMPONENT) -> np.ndarray:
    """Unitary generated by a gate specification."""
    if gate.kind is GateKind.RX:
        return make_rx(gate.angle)
    if gate.kind is GateKind.R0:
        return make_phase(0, gate.angle)
    if gate.kind is GateKind.R1:
        return make_phase(1, gate.angle)
    return make_t(gate.angle, t_convention)


def apply_matrix(tensor: np.ndarray, matrix: np.ndarray, axes: Iterable[int]) -> np.ndarray:
    """Apply a k-qubit matrix to the given axes of a (2,)*n tensor.

    Args:
        tensor: Array with one length-2 axis per qubit (extra axes allowed).
        matrix: 2**k x 2**k operator, first axis most significant.
        axes: Tensor axes the operator acts on, in operator order.

    Returns:
        Transformed tensor with the original axis layout.
    """
    axes = list(axes)
    k = len(axes)
    op = matrix.reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _axis(labels: tuple[str, ...], label: str) -> int:
    try:
        return labels.index(label)
    except ValueError:
        raise UnknownQubitError(label, labels) from None


def apply_gate(
    state: StateVector, gate: GateSpec, t_convention: tuple[int, int] = T_PHASED_COMPONENT
) -> StateVector:
    """Apply one gate to a pure state.

    Args:
        state: Input state.
        gate: Gate whose targets must be labels of the state.
        t_convention: Component phased by T gates.

    Returns:
        New state with the gate applied on its target qubits.

    Raises:
        UnknownQubitError: If a target is not in the register.
    """
    axes = [_axis(state.labels, target) for target in gate.targets]
    tensor = apply_matrix(state.tensor(), gate_matrix(gate, t_convention), axes)
    return StateVector(tensor.reshape(-1), state.labels)


def run_network(
    network: GateSequence,
    state: Optional[StateVector] = None,
    t_convention: tuple[int, int] = T_PHASED_COMPONENT,
) -> StateVector:
    """Apply a network first-listed-first.

    Args:
        network: Gate network.
        state: Input state; |0...0> on the network register when omitted.
        t_convention: Component phased by T gates.

    Returns:
        Output state.
    """
    state = state or StateVector.basis(network.register)
    for gate in network.gates:
        state = apply_gate(state, gate, t_convention)
    return state


def rx(target: str, theta: float = HALF_PI) -> GateSpec:
    """Shorthand for an RX gate."""
    return GateSpec(kind=GateKind.RX, angle=theta, targets=(target,))


def r0(target: str, phi: float = math.pi) -> GateSpec:
    """Shorthand for an R0 gate."""
    return GateSpec(kind=GateKind.R0, angle=phi, targets=(target,))


def r1(target: str, phi: float = math.pi) -> GateSpec:
    """Shorthand for an R1 gate."""
    return GateSpec(kind=GateKind.R1, angle=phi, targets=(target,))


def t(a: str, b: str, gamma: float = math.pi) -> GateSpec:
    """Shorthand for a T gate on the ordered pair (a, b)."""
    return GateSpec(kind=GateKind.T, angle=gamma, targets=(a, b))


def network_c11() -> GateSequence:
    """Compiled modular-exponentiation network for C=11.

    Returns:
        Nine gates on the register (x0, y3, y1).
    """
    return GateSequence(
        register=("x0", "y3", "y1"),
        gates=(
            rx("x0"),
            rx("y1"),
            t("x0", "y1"),
            rx("y1"),
            rx("y3"),
            r0("y3"),
            t("y3", "x0"),
            r1("x0"),
            rx("y3"),
        ),
    )


def network_c2() -> GateSequence:
    """Compiled modular-exponentiation network for C=2.

    Returns:
        Eight gates on the register (x1, x0, y1, y0); the pairs {x0, y0}
        and {x1, y1} never interact.
    """
    return GateSequence(
        register=("x1", "x0", "y1", "y0"),
        gates=(
            rx("x0"),
            rx("y0"),
            rx("x1"),
            rx("y1"),
            t("x0", "y0"),
            t("x1", "y1"),
            rx("y0"),
            rx("y1"),
        ),
    )


def compiled_network(co_prime: int) -> GateSequence:
    """Network for one of the two compiled co-primes.

    Raises:
        NonCompiledInstanceError: For any co-prime other than 11 or 2.
    """
    if co_prime == 11:
        return network_c11()
    if co_prime == 2:
        return network_c2()
    raise NonCompiledInstanceError(15, co_prime)


def ghz_target() -> StateVector:
    """Expected C=11 output (-|000> + i|111>)/sqrt(2) on (x0, y3, y1)."""
    amplitudes = np.zeros(8, dtype=complex)
    amplitudes[0] = -1 / math.sqrt(2)
    amplitudes[7] = 1j / math.sqrt(2)
    return StateVector(amplitudes, ("x0", "y3", "y1"))


def bell_product_target() -> StateVector:
    """Expected C=2 output on (x1, x0, y1, y0).

    (|0_x1 0_y1> - |1_x1 1_y1>)(|0_x0 0_y0> - |1_x0 1_y0>)/2.
    """
    tensor = np.zeros((2, 2, 2, 2), dtype=complex)
    for b1 in (0, 1):
        for b0 in (0, 1):
            tensor[b1, b0, b1, b0] = (-1) ** b1 * (-1) ** b0 / 2
    return StateVector(tensor.reshape(-1), ("x1", "x0", "y1", "y0"))


def compiled_target(co_prime: int) -> StateVector:
    """Ideal output state of the compiled network for a co-prime."""
    if co_prime == 11:
        return ghz_target()
    if co_prime == 2:
        return bell_product_target()
    raise NonCompiledInstanceError(15, co_prime)


def detuned_network(network: GateSequence, phi: float, gamma: float) -> GateSequence:
    """Replace every pi phase of R0/R1 by phi and of T by gamma.

    Args:
        network: Network written with ideal phases.
        phi: Phase-shifter phase actually realized.
        gamma: Conditional phase actually realized.

    Returns:
        Network with the realized phases.
    """
    gates = []
    for gate in network.gates:
        if gate.kind is not GateKind.RX and math.isclose(gate.angle, math.pi):
            angle = gamma if gate.kind is GateKind.T else phi
            gate = gate.model_copy(update={"angle": angle})
        gates.append(gate)
    return GateSequence(register=network.register, gates=tuple(gates))


def hadamard_decomposition() -> GateSequence:
    """H = R0(3pi/2) Rx(pi/2) R0(pi/2) R1(pi), as printed, on qubit ``q``."""
    return GateSequence(
        register=("q",),
        gates=(r0("q", 3 * HALF_PI), rx("q"), r0("q", HALF_PI), r1("q")),
    )


def cnot_decomposition() -> GateSequence:
    """CNOT as printed, control ``c`` and target ``t``.

    The printed 1/sqrt(2) prefactor cannot belong to a unitary and is dropped.
    """
    return GateSequence(
        register=("c", "t"),
        gates=(
            r0("t", 3 * HALF_PI),
            rx("t", 3 * HALF_PI),
            t("c", "t"),
            rx("t"),
            r0("t", HALF_PI),
            r1("c"),
        ),
    )


def sequence_unitary(
    network: GateSequence, t_convention: tuple[int, int] = T_PHASED_COMPONENT
) -> np.ndarray:
    """Compose a network into one matrix on its register."""
    dim = 2 ** len(network.register)
    columns = []
    for index in range(dim):
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[index] = 1.0
        out = run_network(network, StateVector(amplitudes, network.register), t_convention)
        columns.append(out.amplitudes)
    return np.stack(columns, axis=1)


def phase_equivalence(unitary: np.ndarray, target: np.ndarray, tol: float = 1e-12) -> PhaseEquivalence:
    """Check whether diag(left) @ unitary @ diag(right) equals target.

    Args:
        unitary: Composed matrix.
        target: Ideal matrix.
        tol: Entrywise tolerance.

    Returns:
        PhaseEquivalence with the corrections when they exist.

    Raises:
        DimensionMismatchError: If the shapes differ.
    """
    if unitary.shape != target.shape:
        raise DimensionMismatchError(unitary.shape[0], target.shape[0])
    if not np.allclose(np.abs(unitary), np.abs(target), atol=tol, rtol=0):
        return PhaseEquivalence(equivalent=False, magnitudes_match=False)

    rows, cols = target.shape
    left = np.zeros(rows, dtype=complex)
    right = np.zeros(cols, dtype=complex)
    support = np.abs(target) > tol
    # Breadth-first walk over the bipartite row/column graph of the support.
    for start in range(rows):
        if left[start] != 0:
            continue
        left[start] = 1.0
        queue = deque([("row", start)])
        while queue:
            side, i = queue.popleft()
            if side == "row":
                for j in np.flatnonzero(support[i]):
                    if right[j] == 0:
                        right[j] = target[i, j] / (unitary[i, j] * left[i])
                        queue.append(("col", j))
            else:
                for k in np.flatnonzero(support[:, i]):
                    if left[k] == 0:
                        left[k] = target[k, i] / (unitary[k, i] * right[i])
                        queue.append(("row", k))
    right[right == 0] = 1.0
    corrected = np.diag(left) @ unitary @ np.diag(right)
    equivalent = bool(np.allclose(corrected, target, atol=tol, rtol=0))
    if not equivalent:
        return PhaseEquivalence(equivalent=False, magnitudes_match=True)
    return PhaseEquivalence(equivalent=True, magnitudes_match=True, left=left, right=right)


def density_from_state(state: StateVector) -> DensityMatrix:
    """|psi><psi| of a pure state."""
    return DensityMatrix(np.outer(state.amplitudes, state.amplitudes.conj()), state.labels)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``.

    Args:
        rho: Density matrix of the full register.
        keep: Labels to keep; the result follows the register order.

    Returns:
        Reduced density matrix.

    Raises:
        EmptySelectionError: If ``keep`` is empty.
        UnknownQubitError: If a kept label is not in the register.
    """
    keep = set(keep)
    if not keep:
        raise EmptySelectionError()
    for label in keep:
        _axis(rho.labels, label)
    n = rho.n_qubits
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    kept = [i for i, label in enumerate(rho.labels) if label in keep]
    for i in range(n):
        if i not in kept:
            col[i] = row[i]
    subscripts = "".join(row) + "".join(col) + "->" + "".join(row[i] for i in kept) + "".join(col[i] for i in kept)
    reduced = np.einsum(subscripts, rho.entries.reshape((2,) * (2 * n)))
    dim = 2 ** len(kept)
    labels = tuple(rho.labels[i] for i in kept)
    return DensityMatrix(reduced.reshape(dim, dim), labels, tol=rho.tol)


def reorder(rho: DensityMatrix, labels: Iterable[str]) -> DensityMatrix:
    """Permute the qubits of a density matrix into the given label order."""
    labels = tuple(labels)
    perm = [_axis(rho.labels, label) for label in labels]
    n = rho.n_qubits
    tensor = rho.entries.reshape((2,) * (2 * n)).transpose(perm + [p + n for p in perm])
    return DensityMatrix(tensor.reshape(2**n, 2**n), labels, tol=rho.tol)


def fidelity(rho: DensityMatrix, target: StateVector) -> float:
    """F = <target| rho |target>.

    Raises:
        DimensionMismatchError: If rho and target differ in size.
    """
    if rho.entries.shape[0] != target.amplitudes.size:
        raise DimensionMismatchError(rho.entries.shape[0], target.amplitudes.size)
    value = np.vdot(target.amplitudes, rho.entries @ target.amplitudes).real
    return float(np.clip(value, 0.0, 1.0))


def linear_entropy(rho_reduced: DensityMatrix) -> float:
    """Normalized linear entropy d/(d-1) (1 - Tr rho^2).

    For one qubit this is 2(1 - Tr rho^2): 0 for pure states and 1 for the
    maximally mixed state. Larger registers use the same normalization so
    the maximum stays 1.
    """
    dim = rho_reduced.entries.shape[0]
    return float(dim / (dim - 1) * (1.0 - rho_reduced.purity))


def logical_probabilities(rho: DensityMatrix) -> dict[str, float]:
    """Outcome probabilities keyed by bitstrings in register order."""
    diagonal = np.clip(np.real(np.diag(rho.entries)), 0.0, 1.0)
    return {format(i, f"0{rho.n_qubits}b"): float(p) for i, p in enumerate(diagonal)}


def fix_global_phase(amplitudes: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate amplitudes so the first non-negligible one is real positive."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    nonzero = np.flatnonzero(np.abs(amplitudes) > tol)
    if nonzero.size == 0:
        return amplitudes.copy()
    first = amplitudes[nonzero[0]]
    return amplitudes * (abs(first) / first)


def states_equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    """Compare two states amplitude by amplitude modulo one global phase."""
    if a.labels != b.labels:
        return False
    return bool(np.max(np.abs(fix_global_phase(a.amplitudes) - fix_global_phase(b.amplitudes))) <= tol)


def stage_snapshots(
    network: GateSequence, arguments: Iterable[str], state: Optional[StateVector] = None
) -> dict[str, DensityMatrix]:
    """Register density matrices at input, after initialization and at the end.

    Initialization is the set of leading beam splitters acting on argument
    qubits; they commute with the other leading beam splitters.
    """
    arguments = set(arguments)
    state = state or StateVector.basis(network.register)
    initialized = state
    for gate in network.gates:
        if gate.kind is not GateKind.RX:
            break
        if gate.targets[0] in arguments:
            initialized = apply_gate(initialized, gate)
    final = run_network(network, state)
    return {
        "input": density_from_state(state),
        "initialization": density_from_state(initialized),
        "modular_exponentiation": density_from_state(final),
    }


def textbook_modexp_state(co_prime: int) -> StateVector:
    """Standard-formulation register state after modular exponentiation.

    Builds sum_x |x>|f(x)> with f(x) = 11**x mod 15 on a four-bit function
    register (C=11, only x0 superposed) or f(x) = log2(2**x mod 15) on a
    two-bit register (C=2), then drops qubits left in a fixed basis state.

    Raises:
        NonCompiledInstanceError: For any co-prime other than 11 or 2.
    """
    if co_prime == 11:
        arguments, width = ("x0",), 4

        def function(x: int) -> int:
            return mod_exp(11, x, 15)
    elif co_prime == 2:
        arguments, width = ("x1", "x0"), 2

        def function(x: int) -> int:
            return int(math.log2(mod_exp(2, x, 15)))
    else:
        raise NonCompiledInstanceError(15, co_prime)

    labels = arguments + tuple(f"y{j}" for j in reversed(range(width)))
    count = 2 ** len(arguments)
    amplitudes = np.zeros(2 ** len(labels), dtype=complex)
    for x in range(count):
        amplitudes[(x << width) | function(x)] = 1 / math.sqrt(count)

    tensor = amplitudes.reshape((2,) * len(labels))
    kept = list(labels)
    for label in labels:
        axis = kept.index(label)
        weights = np.sum(np.abs(np.moveaxis(tensor, axis, 0).reshape(2, -1)) ** 2, axis=1)
        if np.min(weights) == 0:
            tensor = np.take(tensor, int(np.argmax(weights)), axis=axis)
            kept.pop(axis)
    return StateVector(tensor.reshape(-1), tuple(kept))


def argument_marginals_match(
    compiled: StateVector, textbook: StateVector, arguments: Iterable[str], tol: float = 1e-10
) -> bool:
    """Whether two states give the same argument-register reduced density."""
    arguments = tuple(arguments)
    a = reorder(partial_trace(density_from_state(compiled), arguments), arguments)
    b = reorder(partial_trace(density_from_state(textbook), arguments), arguments)
    return bool(np.max(np.abs(a.entries - b.entries)) <= tol)
