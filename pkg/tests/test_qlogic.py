import math
from functools import reduce

import numpy as np
import pytest
from pydantic import ValidationError

from qwire.classical import NonCompiledInstanceError
from qwire.enums import GateKind
from qwire.qlogic import (
    DensityMatrix,
    EmptySelectionError,
    GateSequence,
    GateSpec,
    InvalidStateError,
    StateVector,
    UnknownQubitError,
)
from qwire.qlogic.service import (
    HADAMARD,
    ZERO_CONTROLLED_NOT,
    argument_marginals_match,
    bell_product_target,
    cnot_decomposition,
    compiled_network,
    density_from_state,
    detuned_network,
    fidelity,
    ghz_target,
    hadamard_decomposition,
    linear_entropy,
    logical_probabilities,
    make_phase,
    make_rx,
    make_t,
    network_c11,
    network_c2,
    partial_trace,
    phase_equivalence,
    reorder,
    run_network,
    rx,
    sequence_unitary,
    stage_snapshots,
    states_equal_up_to_phase,
    textbook_modexp_state,
)

IDENTITY = np.eye(2, dtype=complex)


def _on_qubit(op: np.ndarray, position: int, n: int) -> np.ndarray:
    mats = [IDENTITY] * n
    mats[position] = op
    return reduce(np.kron, mats)


def _conditional(a: int, b: int, gamma: float, n: int) -> np.ndarray:
    diagonal = []
    for index in range(2**n):
        bits = format(index, f"0{n}b")
        diagonal.append(np.exp(1j * gamma) if bits[a] == "0" and bits[b] == "1" else 1.0)
    return np.diag(diagonal)


def _c11_oracle_fidelity(phi: float, gamma: float) -> float:
    """C=11 network built from Kronecker products on (x0, y3, y1)."""
    c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
    beam = np.array([[c, 1j * s], [1j * s, c]])
    r0 = np.diag([np.exp(1j * phi), 1.0])
    r1 = np.diag([1.0, np.exp(1j * phi)])
    x0, y3, y1 = 0, 1, 2
    steps = [
        _on_qubit(beam, x0, 3),
        _on_qubit(beam, y1, 3),
        _conditional(x0, y1, gamma, 3),
        _on_qubit(beam, y1, 3),
        _on_qubit(beam, y3, 3),
        _on_qubit(r0, y3, 3),
        _conditional(y3, x0, gamma, 3),
        _on_qubit(r1, x0, 3),
        _on_qubit(beam, y3, 3),
    ]
    psi = np.zeros(8, dtype=complex)
    psi[0] = 1.0
    for step in steps:
        psi = step @ psi
    ghz = np.zeros(8, dtype=complex)
    ghz[0], ghz[7] = -1 / math.sqrt(2), 1j / math.sqrt(2)
    return float(abs(np.vdot(ghz, psi)) ** 2)


class TestGateMatrices:
    @pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, 3 * math.pi / 2, 1.234])
    def test_rx_is_unitary(self, theta):
        u = make_rx(theta)
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-14)

    def test_rx_pi_flips_wires(self):
        assert np.allclose(make_rx(math.pi), 1j * np.array([[0, 1], [1, 0]]), atol=1e-15)

    def test_phase_shifter_on_selected_wire(self):
        assert np.allclose(make_phase(0, math.pi), np.diag([-1, 1]))
        assert np.allclose(make_phase(1, math.pi / 2), np.diag([1, 1j]))

    def test_phase_shifter_rejects_bad_wire(self):
        with pytest.raises(ValueError):
            make_phase(2, 0.1)

    def test_t_phases_one_component(self):
        t = make_t(0.7)
        assert np.allclose(np.diag(t), [1, np.exp(0.7j), 1, 1])

    def test_phase_additivity(self):
        a, b = 0.31, 1.27
        assert np.allclose(make_phase(1, a) @ make_phase(1, b), make_phase(1, a + b), atol=1e-14)


class TestGateSpecs:
    def test_t_needs_two_targets(self):
        with pytest.raises(ValidationError):
            GateSpec(kind=GateKind.T, angle=math.pi, targets=("a",))

    def test_targets_distinct(self):
        with pytest.raises(ValidationError):
            GateSpec(kind=GateKind.T, angle=math.pi, targets=("a", "a"))

    def test_angle_must_be_finite(self):
        with pytest.raises(ValidationError):
            GateSpec(kind=GateKind.RX, angle=math.inf, targets=("a",))

    def test_sequence_targets_in_register(self):
        with pytest.raises(ValidationError):
            GateSequence(register=("a",), gates=(rx("b"),))


class TestStates:
    def test_norm_checked(self):
        with pytest.raises(InvalidStateError):
            StateVector(np.array([1.0, 1.0]), ("a",))

    def test_basis_index_first_label_most_significant(self):
        state = StateVector.basis(("a", "b"), (1, 0))
        assert state.amplitudes[2] == 1.0

    def test_density_matrix_checks_hermiticity(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]), ("a",))


class TestCompiledNetworks:
    def test_c11_produces_ghz(self):
        assert states_equal_up_to_phase(run_network(network_c11()), ghz_target())

    def test_c11_flipped_t_convention_misses_ghz(self):
        out = run_network(network_c11(), t_convention=(1, 0))
        assert not states_equal_up_to_phase(out, ghz_target())

    def test_c2_produces_bell_product(self):
        assert states_equal_up_to_phase(run_network(network_c2()), bell_product_target())

    @pytest.mark.parametrize("co_prime", [11, 2])
    def test_networks_unitary(self, co_prime):
        u = sequence_unitary(compiled_network(co_prime))
        assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)

    def test_unknown_co_prime(self):
        with pytest.raises(NonCompiledInstanceError):
            compiled_network(7)

    def test_ghz_probabilities(self):
        probabilities = logical_probabilities(density_from_state(run_network(network_c11())))
        assert probabilities["000"] == pytest.approx(0.5, abs=1e-12)
        assert probabilities["111"] == pytest.approx(0.5, abs=1e-12)
        assert sum(probabilities.values()) == pytest.approx(1.0, abs=1e-12)

    def test_detuned_fidelity_matches_kronecker_oracle(self):
        phi, gamma = 0.92 * math.pi, 0.88 * math.pi
        state = run_network(detuned_network(network_c11(), phi, gamma))
        value = fidelity(density_from_state(state), ghz_target())
        assert value == pytest.approx(_c11_oracle_fidelity(phi, gamma), abs=1e-12)
        assert 0.9 < value < 1.0

    def test_kronecker_oracle_exact_at_pi(self):
        assert _c11_oracle_fidelity(math.pi, math.pi) == pytest.approx(1.0, abs=1e-12)

    def test_detuned_network_keeps_beam_splitters(self):
        detuned = detuned_network(network_c11(), 0.5, 0.6)
        angles = {gate.kind: gate.angle for gate in detuned.gates}
        assert angles[GateKind.RX] == pytest.approx(math.pi / 2)
        assert angles[GateKind.R0] == 0.5
        assert angles[GateKind.T] == 0.6


class TestDecompositions:
    def test_hadamard_up_to_diagonal_phases(self):
        result = phase_equivalence(sequence_unitary(hadamard_decomposition()), HADAMARD)
        assert result.equivalent
        corrected = np.diag(result.left) @ sequence_unitary(hadamard_decomposition()) @ np.diag(result.right)
        assert np.allclose(corrected, HADAMARD, atol=1e-12)

    def test_cnot_magnitudes_are_a_permutation(self):
        u = sequence_unitary(cnot_decomposition())
        assert np.allclose(np.abs(u), np.abs(ZERO_CONTROLLED_NOT), atol=1e-12)
        assert phase_equivalence(u, ZERO_CONTROLLED_NOT).equivalent

    def test_mismatched_magnitudes(self):
        result = phase_equivalence(np.eye(2, dtype=complex), HADAMARD)
        assert not result.equivalent
        assert not result.magnitudes_match


class TestMetrics:
    def test_ghz_argument_maximally_mixed(self):
        rho = density_from_state(ghz_target())
        reduced = partial_trace(rho, ("x0",))
        assert np.allclose(reduced.entries, np.eye(2) / 2, atol=1e-12)
        assert linear_entropy(reduced) == pytest.approx(1.0, abs=1e-12)

    def test_product_state_has_zero_entropy(self):
        rho = density_from_state(StateVector.basis(("a", "b")))
        assert linear_entropy(partial_trace(rho, ("a",))) == pytest.approx(0.0, abs=1e-12)

    def test_bell_product_pair_entropy(self):
        rho = density_from_state(bell_product_target())
        pair = reorder(partial_trace(rho, ("x1", "x0")), ("x1", "x0"))
        assert linear_entropy(pair) == pytest.approx(1.0, abs=1e-12)

    def test_partial_trace_composes(self):
        rho = density_from_state(bell_product_target())
        direct = partial_trace(rho, ("x0",))
        stepwise = partial_trace(partial_trace(rho, ("x1", "x0")), ("x0",))
        assert np.allclose(direct.entries, stepwise.entries, atol=1e-12)

    def test_partial_trace_errors(self):
        rho = density_from_state(ghz_target())
        with pytest.raises(UnknownQubitError):
            partial_trace(rho, ("z9",))
        with pytest.raises(EmptySelectionError):
            partial_trace(rho, ())

    def test_fidelity_of_target_is_one(self):
        assert fidelity(density_from_state(ghz_target()), ghz_target()) == pytest.approx(1.0)


    def test_linear_entropy_keeps_maximum_at_one_for_pairs(self):
        mixed = DensityMatrix(np.eye(4, dtype=complex) / 4, ("a", "b"))
        assert linear_entropy(mixed) == pytest.approx(1.0, abs=1e-12)
        # the unnormalized 2(1 - Tr rho^2) would read 1.5 here
        assert 2 * (1 - mixed.purity) == pytest.approx(1.5, abs=1e-12)


def _random_qubit(rng: np.random.Generator) -> np.ndarray:
    amplitudes = rng.normal(size=2) + 1j * rng.normal(size=2)
    return amplitudes / np.linalg.norm(amplitudes)


class TestRandomized:
    def test_random_angle_gates_unitary(self):
        rng = np.random.default_rng(11)
        for angle in rng.uniform(-4 * math.pi, 4 * math.pi, size=1000):
            for u in (make_rx(angle), make_phase(0, angle), make_phase(1, angle), make_t(angle)):
                assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)

    def test_random_networks_keep_norm(self):
        rng = np.random.default_rng(15)
        register = ("a", "b", "c", "d")
        kinds = [GateKind.RX, GateKind.R0, GateKind.R1, GateKind.T]
        for _ in range(20):
            gates = []
            for _ in range(rng.integers(1, 101)):
                kind = kinds[rng.integers(len(kinds))]
                width = 2 if kind is GateKind.T else 1
                targets = tuple(str(label) for label in rng.choice(register, size=width, replace=False))
                gates.append(GateSpec(kind=kind, angle=float(rng.uniform(0, 2 * math.pi)), targets=targets))
            state = run_network(GateSequence(register=register, gates=tuple(gates)))
            assert np.vdot(state.amplitudes, state.amplitudes).real == pytest.approx(1.0, abs=1e-12)

    def test_partial_trace_of_random_product(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a, b, c = (_random_qubit(rng) for _ in range(3))
            rho = density_from_state(StateVector(reduce(np.kron, [a, b, c]), ("a", "b", "c")))
            assert np.allclose(partial_trace(rho, ("b",)).entries, np.outer(b, b.conj()), atol=1e-12)
            assert np.allclose(
                partial_trace(rho, ("a", "c")).entries, np.kron(np.outer(a, a.conj()), np.outer(c, c.conj())), atol=1e-12
            )

    def test_fidelity_linear_over_mixtures(self):
        rng = np.random.default_rng(5)
        target = ghz_target()
        for _ in range(50):
            first, second = (
                density_from_state(StateVector(reduce(np.kron, [_random_qubit(rng) for _ in range(3)]), target.labels))
                for _ in range(2)
            )
            p = float(rng.uniform())
            mixture = DensityMatrix(p * first.entries + (1 - p) * second.entries, target.labels)
            expected = p * fidelity(first, target) + (1 - p) * fidelity(second, target)
            assert fidelity(mixture, target) == pytest.approx(expected, abs=1e-12)


class TestStages:
    def test_snapshots_of_c11(self):
        snapshots = stage_snapshots(network_c11(), ("x0",))
        assert set(snapshots) == {"input", "initialization", "modular_exponentiation"}
        initialized = partial_trace(snapshots["initialization"], ("x0",))
        final = partial_trace(snapshots["modular_exponentiation"], ("x0",))
        assert linear_entropy(initialized) == pytest.approx(0.0, abs=1e-12)
        assert linear_entropy(final) == pytest.approx(1.0, abs=1e-12)

    def test_textbook_c11_drops_fixed_qubits(self):
        assert textbook_modexp_state(11).labels == ("x0", "y3", "y1")

    @pytest.mark.parametrize("co_prime,arguments", [(11, ("x0",)), (2, ("x1", "x0"))])
    def test_argument_marginals_match_textbook(self, co_prime, arguments):
        compiled = run_network(compiled_network(co_prime))
        assert argument_marginals_match(compiled, textbook_modexp_state(co_prime), arguments)
