"""Injection, logical gates and end-to-end propagation of a gate network.

R_x gates act as exact matrices on the configuration amplitudes; phase
shifters and couplers are propagated through the device potentials.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from qwire.config import DeviceSettings, GridSettings, SimulationSettings
from qwire.enums import GateKind, PropagationMode
from qwire.qlogic.model import GateSequence, GateSpec
from qwire.qlogic.service import T_PHASED_COMPONENT, apply_matrix, make_phase, make_rx, make_t

from .exceptions import MissingDeviceLayoutError, WindowTooSmallError
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
from .potentials import trap_potential
from .propagation import (
    densify,
    propagate_coupler,
    propagate_dense,
    propagate_phase_shifter,
    traversal_steps,
)
from .readout import norm

logger = logging.getLogger(__name__)

AnyState = Union[SemiOneDState, DenseState]


def _check_window(saw: SawPotential, window: Window) -> None:
    if window.extent < saw.wavelength:
        raise WindowTooSmallError(window.extent, saw.wavelength)


def centered_window(saw: SawPotential, spacing: float, points: int) -> Window:
    """Window whose middle point sits on a SAW minimum at t = 0.

    Raises:
        WindowTooSmallError: If the window is shorter than one wavelength.
    """
    _check_window(saw, Window(spacing=spacing, points=points))
    return Window(origin=saw.minimum(0.0) - (points // 2) * spacing, spacing=spacing, points=points)


def harmonic_width(saw: SawPotential, material: MaterialParams) -> float:
    """Density standard deviation (hbar^2 / (4 m* k))^(1/4) of the trap ground state (nm)."""
    return (material.kinetic_prefactor / (2 * saw.curvature)) ** 0.25


def gaussian_orbital(window: Window, center: float, sigma: float) -> np.ndarray:
    """Normalized Gaussian whose density has standard deviation ``sigma``."""
    xi = window.coordinates()
    orbital = np.exp(-((xi - center) ** 2) / (4 * sigma**2)).astype(complex)
    return orbital / math.sqrt(np.sum(np.abs(orbital) ** 2) * window.spacing)


def _minimum_coordinate(saw: SawPotential, window: Window) -> float:
    middle = window.origin + window.extent / 2
    return saw.minimum(middle) - window.origin


def init_wavepacket(saw: SawPotential, window: Window, material: MaterialParams) -> np.ndarray:
    """Harmonic ground state of the SAW minimum nearest the window middle.

    Raises:
        WindowTooSmallError: If the window is shorter than one wavelength.
    """
    _check_window(saw, window)
    if saw.amplitude == 0:
        raise ValueError("a SAW of zero amplitude has no trap")
    return gaussian_orbital(window, _minimum_coordinate(saw, window), harmonic_width(saw, material))


def relax_wavepacket(saw: SawPotential, window: Window, material: MaterialParams) -> np.ndarray:
    """Lowest eigenvector of the discretized trap Hamiltonian.

    Injecting this instead of the harmonic Gaussian removes the breathing
    caused by the anharmonic SAW profile and by the grid.
    """
    _check_window(saw, window)
    kinetic = material.kinetic_prefactor / window.spacing**2
    diagonal = 2 * kinetic + trap_potential(saw, window, 0.0)
    off_diagonal = np.full(window.points - 1, -kinetic)
    _, vectors = eigh_tridiagonal(diagonal, off_diagonal, select="i", select_range=(0, 0))
    orbital = vectors[:, 0].astype(complex)
    if orbital[np.argmax(np.abs(orbital))].real < 0:
        orbital = -orbital
    return orbital / math.sqrt(np.sum(np.abs(orbital) ** 2) * window.spacing)


def injected_orbital(saw: SawPotential, window: Window, material: MaterialParams, grid: GridSettings) -> np.ndarray:
    """Orbital every carrier starts in."""
    if grid.relaxed_injection:
        return relax_wavepacket(saw, window, material)
    return init_wavepacket(saw, window, material)


def product_state(
    particles: tuple[str, ...],
    window: Window,
    orbital: np.ndarray,
    bits: Optional[tuple[int, ...]] = None,
    amplitudes: Optional[np.ndarray] = None,
) -> SemiOneDState:
    """Every carrier in ``orbital``, in the wire configuration given by bits or amplitudes.

    Args:
        particles: Qubit labels.
        window: Shared grid.
        orbital: Normalized orbital on ``window``.
        bits: Wire of each carrier; all wire 0 when neither bits nor amplitudes are given.
        amplitudes: Normalized configuration amplitudes of shape (2,)*k.
    """
    k = len(particles)
    if amplitudes is None:
        amplitudes = np.zeros((2,) * k, dtype=complex)
        amplitudes[tuple(bits or (0,) * k)] = 1.0
    amplitudes = np.asarray(amplitudes, dtype=complex).reshape((2,) * k)
    term = Term(amplitudes=amplitudes, factors=tuple(orbital for _ in particles))
    return SemiOneDState(particles=tuple(particles), window=window, terms=(term,))


def _map_amplitudes(state: AnyState, matrix: np.ndarray, qubits: tuple[str, ...]) -> AnyState:
    axes = [state.particles.index(q) for q in qubits]
    if isinstance(state, DenseState):
        components = apply_matrix(state.components, matrix, axes)
        return DenseState(state.particles, state.window, components, state.time)
    terms = tuple(Term(apply_matrix(t.amplitudes, matrix, axes), t.factors) for t in state.terms)
    return state.advanced(terms, 0.0)


def apply_logical_rx(state: AnyState, qubit: str, theta: float) -> AnyState:
    """Mix the wire amplitudes of one carrier with R_x(theta)."""
    return _map_amplitudes(state, make_rx(theta), (qubit,))


def apply_logical_phase(state: AnyState, qubit: str, wire: int, phi: float) -> AnyState:
    """Exact phase exp(i phi) on the configurations with ``qubit`` in ``wire``."""
    return _map_amplitudes(state, make_phase(wire, phi), (qubit,))


def apply_logical_t(state: AnyState, pair: tuple[str, str], gamma: float) -> AnyState:
    """Exact conditional phase exp(i gamma) on the phased pair configuration."""
    return _map_amplitudes(state, make_t(gamma, T_PHASED_COMPONENT), pair)


def _phased_wire(gate: GateSpec) -> int:
    return 0 if gate.kind is GateKind.R0 else 1


def barrier_wire(gate: GateSpec) -> int:
    """Wire holding the barrier of a phase shifter.

    A barrier of delay phi multiplies its own wire by exp(-i phi), which up
    to a global phase is exp(i phi) on the other wire; R0 therefore delays
    wire 1 and R1 delays wire 0.
    """
    return 1 - _phased_wire(gate)


def build_device(
    network: GateSequence, device: DeviceSettings, saw: SawPotential, window: Window, dt: float
) -> PotentialStack:
    """Place one barrier per phase shifter and one coupler per T gate along the lab axis.

    Each structure starts one wavelength ahead of the SAW minimum at the
    moment its gate begins, so the carriers cross it completely before the
    next gate.
    """
    start = saw.minimum(window.origin + window.extent / 2)
    t = 0.0
    barriers: list[BarrierSpec] = []
    couplers: list[CouplerSpec] = []
    for gate in network.gates:
        if gate.kind is GateKind.RX:
            continue
        length = device.coupler_length if gate.kind is GateKind.T else device.barrier_length
        center = start + saw.velocity * t + saw.wavelength + length / 2
        if gate.kind is GateKind.T:
            couplers.append(
                CouplerSpec(
                    region_length=length,
                    near_distance=device.near_distance,
                    far_distance=device.far_distance,
                    debye_k=device.debye_k,
                    center=center,
                    pair=gate.targets,
                    interacting_config=T_PHASED_COMPONENT,
                )
            )
        else:
            barriers.append(
                BarrierSpec(
                    height=device.barrier_height,
                    length=length,
                    wire=barrier_wire(gate),
                    center=center,
                    qubit=gate.targets[0],
                )
            )
        t += traversal_steps(length, saw, dt) * dt
    return PotentialStack(saw=saw, barriers=tuple(barriers), couplers=tuple(couplers))


def initial_state(network: GateSequence, settings: SimulationSettings, mode: PropagationMode) -> AnyState:
    """All carriers injected in wire 0 on the grid the mode runs on."""
    grid = settings.grid
    if mode is PropagationMode.DENSE_ORACLE:
        window = centered_window(settings.saw, grid.dense_spacing, grid.dense_points)
    else:
        window = centered_window(settings.saw, grid.spacing, grid.points)
    orbital = injected_orbital(settings.saw, window, settings.material, grid)
    state = product_state(network.register, window, orbital)
    return densify(state) if mode is PropagationMode.DENSE_ORACLE else state


def run_physical_network(
    network: GateSequence,
    device: PotentialStack,
    mode: PropagationMode,
    settings: SimulationSettings,
    diagnostics: Optional[PropagationDiagnostics] = None,
    phases: Optional[tuple[float, float]] = None,
) -> AnyState:
    """Execute a network on the wavepacket engine, gate by gate.

    Args:
        network: Network of RX, R0, R1 and T gates.
        device: Structures placed for the network, e.g. from :func:`build_device`.
        mode: Product terms, the dense cross-check, or exact phases.
        settings: Material, SAW and grid settings.
        diagnostics: Accumulates solver bookkeeping.
        phases: Phase-shifter and conditional phases (phi, gamma) the phase
            oracle multiplies in place of propagation, as extracted from
            single-gate runs of the device geometry.

    Returns:
        Final state.

    Raises:
        MissingDeviceLayoutError: If a gate has no matching structure, or the
            phase oracle was given no phases.
    """
    diagnostics = diagnostics if diagnostics is not None else PropagationDiagnostics()
    state = initial_state(network, settings, mode)
    diagnostics.initial_norm = norm(state)
    barriers = iter(device.barriers)
    couplers = iter(device.couplers)
    saw, material, grid = device.saw, settings.material, settings.grid

    for position, gate in enumerate(network.gates):
        logger.info("Gate %d/%d: %s (%s)", position + 1, len(network), gate, mode.value)
        if gate.kind is GateKind.RX:
            state = apply_logical_rx(state, gate.targets[0], gate.angle)
            continue
        if mode is PropagationMode.PHASE_ORACLE:
            if phases is None:
                raise MissingDeviceLayoutError(gate)
            phi, gamma = phases
            if gate.kind is GateKind.T:
                state = apply_logical_t(state, gate.targets, gamma)
            else:
                state = apply_logical_phase(state, gate.targets[0], _phased_wire(gate), phi)
            continue

        if gate.kind is GateKind.T:
            coupler = next(couplers, None)
            if coupler is None or set(coupler.pair) != set(gate.targets):
                raise MissingDeviceLayoutError(gate)
            stack = PotentialStack(saw=saw, couplers=(coupler,))
            steps = traversal_steps(coupler.region_length, saw, grid.dt)
            if mode is PropagationMode.DENSE_ORACLE:
                state = propagate_dense(state, stack, steps, material, grid, diagnostics)
            else:
                state = propagate_coupler(state, coupler, saw, material, grid, steps, diagnostics)
        else:
            barrier = next(barriers, None)
            if barrier is None or barrier.qubit != gate.targets[0] or barrier.wire != barrier_wire(gate):
                raise MissingDeviceLayoutError(gate)
            stack = PotentialStack(saw=saw, barriers=(barrier,))
            steps = traversal_steps(barrier.length, saw, grid.dt)
            if mode is PropagationMode.DENSE_ORACLE:
                state = propagate_dense(state, stack, steps, material, grid, diagnostics)
            else:
                state = propagate_phase_shifter(state, barrier, saw, material, grid, steps, diagnostics)

    diagnostics.final_norm = norm(state)
    if isinstance(state, SemiOneDState):
        diagnostics.max_rank = max(diagnostics.max_rank, state.rank)
    logger.info("Network done: norm drift %.2e, rank %d", diagnostics.norm_drift, diagnostics.max_rank)
    return state
