"""Gate propagation for product-term and dense multi-particle states.

A barrier or coupler only changes the orbitals of configurations whose wires
meet it. Each term is therefore split by the signature of its
configurations (which barriers and couplers they meet), every distinct
orbital is propagated once per signature, and coupled pairs are folded back
into product terms by a truncated SVD.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from qwire.config import GridSettings

from .exceptions import IncompleteTransmissionError, RankCapExceededError
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
from .potentials import PairCoupling, barrier_potential, trap_potential
from .readout import transmitted_fraction
from .solver import Track, evolve_tracks

logger = logging.getLogger(__name__)

TRANSMISSION_THRESHOLD = 0.99


def traversal_steps(length: float, saw: SawPotential, dt: float) -> int:
    """Steps for the SAW minimum to go from one wavelength before a structure to one after it."""
    duration = (2 * saw.wavelength + length) / saw.velocity
    return math.ceil(duration / dt - 1e-9)


def refactorize(
    values: np.ndarray, rank_cap: int, tolerance: float
) -> tuple[list[tuple[float, np.ndarray, np.ndarray]], float]:
    """Split a pair grid function into at most ``rank_cap`` product terms.

    Args:
        values: Grid function of shape (n_a, n_b).
        rank_cap: Maximum number of kept terms.
        tolerance: Largest relative weight allowed to be discarded.

    Returns:
        Kept (singular value, orbital a, orbital b) triples and the discarded
        relative weight.

    Raises:
        RankCapExceededError: If meeting ``tolerance`` needs more than ``rank_cap`` terms.
    """
    u, s, vh = np.linalg.svd(values, full_matrices=False)
    weights = s**2
    total = float(np.sum(weights))
    if total == 0.0:
        return [], 0.0
    # tail[r] is the relative weight discarded when keeping r terms
    tail = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]]) / total
    rank = int(np.argmax(tail <= tolerance))
    rank = max(rank, 1)
    if rank > rank_cap:
        raise RankCapExceededError(rank_cap, float(tail[rank_cap]), tolerance)
    kept = [(float(s[i]), u[:, i], vh[i, :]) for i in range(rank)]
    return kept, float(tail[rank])


@dataclass(frozen=True)
class _Signature:
    barriers: tuple[bool, ...]
    couplers: tuple[bool, ...]


def _configurations(k: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=k))


def _signature(config: tuple[int, ...], index: dict[str, int], stack: PotentialStack) -> _Signature:
    barriers = tuple(config[index[b.qubit]] == b.wire for b in stack.barriers)
    couplers = tuple(
        (config[index[c.pair[0]]], config[index[c.pair[1]]]) == c.interacting_config for c in stack.couplers
    )
    return _Signature(barriers, couplers)


class _Potentials:
    """Cached single-particle and pair potentials of one propagation."""

    def __init__(self, stack: PotentialStack, window: Window, material: MaterialParams) -> None:
        self.stack = stack
        self.window = window
        self.material = material
        self._trap = trap_potential(stack.saw, window, 0.0)
        self._single: dict[tuple[int, ...], Callable[[float], np.ndarray]] = {}
        self._pair: dict[tuple[int, bool], PairCoupling] = {}

    def single(self, active: tuple[int, ...]) -> Callable[[float], np.ndarray]:
        """SAW plus the barriers with the given indices."""
        if active not in self._single:
            barriers = [self.stack.barriers[i] for i in active]
            trap, saw, window = self._trap, self.stack.saw, self.window

            def potential(t: float) -> np.ndarray:
                lab = window.lab_positions(saw.velocity, t)
                return trap + sum((barrier_potential(b, lab) for b in barriers), np.zeros_like(trap))

            self._single[active] = potential
        return self._single[active]

    def pair(self, coupler_index: int, interacting: bool) -> PairCoupling:
        key = (coupler_index, interacting)
        if key not in self._pair:
            coupler = self.stack.couplers[coupler_index]
            self._pair[key] = PairCoupling(self.material, coupler, self.window, self.stack.saw.velocity, interacting)
        return self._pair[key]


def _blocks(particles: tuple[str, ...], stack: PotentialStack) -> list[tuple[tuple[int, ...], Optional[int]]]:
    """Particle groups propagated together, with the coupler driving each pair."""
    index = {label: i for i, label in enumerate(particles)}
    paired: dict[int, int] = {}
    for c, coupler in enumerate(stack.couplers):
        for label in coupler.pair:
            if index[label] in paired:
                raise ValueError(f"qubit {label} takes part in two simultaneous couplers")
            paired[index[label]] = c
    blocks: list[tuple[tuple[int, ...], Optional[int]]] = []
    for c, coupler in enumerate(stack.couplers):
        blocks.append(((index[coupler.pair[0]], index[coupler.pair[1]]), c))
    blocks.extend(((p,), None) for p in range(len(particles)) if p not in paired)
    return blocks


def _active_barriers(stack: PotentialStack, particle: str, signature: _Signature) -> tuple[int, ...]:
    return tuple(i for i, b in enumerate(stack.barriers) if b.qubit == particle and signature.barriers[i])


def propagate(
    state: SemiOneDState,
    stack: PotentialStack,
    steps: int,
    material: MaterialParams,
    grid: GridSettings,
    diagnostics: Optional[PropagationDiagnostics] = None,
) -> SemiOneDState:
    """Advance a product-term state under every structure of ``stack``.

    Args:
        state: Input state.
        stack: SAW plus the barriers and couplers active during the steps.
        steps: Number of Crank-Nicolson steps of ``grid.dt``.
        material: Material constants.
        grid: Time step, rank cap, truncation tolerance and worker count.
        diagnostics: Accumulates step count, truncation weight and rank.

    Returns:
        The advanced state.
    """
    particles = state.particles
    index = {label: i for i, label in enumerate(particles)}
    for label in [b.qubit for b in stack.barriers] + [q for c in stack.couplers for q in c.pair]:
        if label not in index:
            raise ValueError(f"structure targets qubit {label} absent from state {particles}")
    if stack.couplers and material.coulomb_prefactor == 0.0:
        # no interaction: pairs stay products
        stack = stack.model_copy(update={"couplers": ()})
    potentials = _Potentials(stack, state.window, material)
    blocks = _blocks(particles, stack)
    configs = _configurations(len(particles))
    signatures = {config: _signature(config, index, stack) for config in configs}
    groups: dict[_Signature, np.ndarray] = {}
    for config, signature in signatures.items():
        mask = groups.setdefault(signature, np.zeros((2,) * len(particles), dtype=bool))
        mask[config] = True

    tracks: list[Track] = []
    keys: dict[tuple, int] = {}
    alive: list[np.ndarray] = []

    def track_for(term: Term, block: tuple[int, ...], coupler: Optional[int], signature: _Signature) -> int:
        factors = [term.factors[p] for p in block]
        active = tuple(_active_barriers(stack, particles[p], signature) for p in block)
        interacting = signature.couplers[coupler] if coupler is not None else None
        key = (tuple(id(f) for f in factors), active, coupler, interacting)
        if key not in keys:
            alive.extend(factors)
            singles = tuple(potentials.single(a) for a in active)
            if coupler is None:
                tracks.append(Track(values=factors[0], single=singles))
            else:
                values = np.multiply.outer(factors[0], factors[1])
                tracks.append(Track(values=values, single=singles, coupling=potentials.pair(coupler, interacting)))
            keys[key] = len(tracks) - 1
        return keys[key]

    plan: list[tuple[np.ndarray, list[tuple[tuple[int, ...], Optional[int], int]]]] = []
    for term in state.terms:
        for signature, mask in groups.items():
            amplitudes = np.where(mask, term.amplitudes, 0)
            if not np.any(amplitudes):
                continue
            plan.append(
                (amplitudes, [(block, coupler, track_for(term, block, coupler, signature)) for block, coupler in blocks])
            )

    results = evolve_tracks(tracks, state.time, steps, grid.dt, state.window.spacing, material, grid.workers)

    expansions: dict[int, list[tuple[float, tuple[np.ndarray, ...]]]] = {}
    truncation = 0.0
    for block, coupler, slot in (entry for _, entries in plan for entry in entries):
        if slot in expansions:
            continue
        if coupler is None:
            expansions[slot] = [(1.0, (results[slot],))]
        else:
            kept, discarded = refactorize(results[slot], grid.rank_cap, grid.truncation_tol)
            truncation = max(truncation, discarded)
            expansions[slot] = [(s, (u, v)) for s, u, v in kept]

    terms: list[Term] = []
    for amplitudes, entries in plan:
        choices = [[(block, scale, factors) for scale, factors in expansions[slot]] for block, _, slot in entries]
        for combination in itertools.product(*choices):
            new_factors: list[Optional[np.ndarray]] = [None] * len(particles)
            scale = 1.0
            for block, block_scale, factors in combination:
                scale *= block_scale
                for p, factor in zip(block, factors):
                    new_factors[p] = factor
            terms.append(Term(amplitudes=amplitudes * scale, factors=tuple(new_factors)))

    if truncation > 0.1 * grid.truncation_tol:
        logger.warning("Re-factorization discarded relative weight %.2e", truncation)
    out = state.advanced(tuple(terms), steps * grid.dt)
    if diagnostics is not None:
        diagnostics.steps += steps
        diagnostics.truncation_weight = max(diagnostics.truncation_weight, truncation)
        diagnostics.max_rank = max(diagnostics.max_rank, out.rank)
    logger.debug("Propagated %d steps: %d tracks, rank %d -> %d", steps, len(tracks), state.rank, out.rank)
    return out


def cn_step(
    state: SemiOneDState, stack: PotentialStack, material: MaterialParams, grid: GridSettings
) -> SemiOneDState:
    """One Crank-Nicolson step from ``state.time`` to ``state.time + grid.dt``."""
    return propagate(state, stack, 1, material, grid)


def propagate_phase_shifter(
    state: SemiOneDState,
    barrier: BarrierSpec,
    saw: SawPotential,
    material: MaterialParams,
    grid: GridSettings,
    steps: Optional[int] = None,
    diagnostics: Optional[PropagationDiagnostics] = None,
    check_transmission: bool = True,
) -> SemiOneDState:
    """Carry the state past one barrier.

    Args:
        state: Input state.
        barrier: Barrier placed on the lab axis.
        saw: Surface acoustic wave.
        material: Material constants.
        grid: Solver settings.
        steps: Number of steps; a full traversal when omitted.
        diagnostics: Accumulates solver bookkeeping.
        check_transmission: Raise when the packet is partly reflected.

    Returns:
        State after the traversal.

    Raises:
        IncompleteTransmissionError: If less than 99% of the barrier-wire norm
            still rides the SAW minimum.
    """
    steps = steps if steps is not None else traversal_steps(barrier.length, saw, grid.dt)
    out = propagate(state, PotentialStack(saw=saw, barriers=(barrier,)), steps, material, grid, diagnostics)
    transmitted = transmitted_fraction(out, barrier.qubit, barrier.wire, saw)
    if diagnostics is not None:
        diagnostics.min_transmission = min(diagnostics.min_transmission, transmitted)
    if check_transmission and transmitted < TRANSMISSION_THRESHOLD:
        raise IncompleteTransmissionError(barrier.qubit, transmitted, TRANSMISSION_THRESHOLD)
    return out


def propagate_coupler(
    state: SemiOneDState,
    coupler: CouplerSpec,
    saw: SawPotential,
    material: MaterialParams,
    grid: GridSettings,
    steps: Optional[int] = None,
    diagnostics: Optional[PropagationDiagnostics] = None,
) -> SemiOneDState:
    """Carry the state through one coupling region.

    The coupled pair is promoted to a 2D grid per signature and folded back
    into product terms afterwards.

    Raises:
        RankCapExceededError: If the pair needs more terms than the rank cap.
    """
    steps = steps if steps is not None else traversal_steps(coupler.region_length, saw, grid.dt)
    return propagate(state, PotentialStack(saw=saw, couplers=(coupler,)), steps, material, grid, diagnostics)


def densify(state: SemiOneDState) -> DenseState:
    """Expand a product-term state onto the full k-particle grid."""
    components = None
    for term in state.terms:
        grid_values = term.factors[0]
        for factor in term.factors[1:]:
            grid_values = np.multiply.outer(grid_values, factor)
        contribution = np.multiply.outer(term.amplitudes, grid_values)
        components = contribution if components is None else components + contribution
    return DenseState(particles=state.particles, window=state.window, components=components, time=state.time)


def _broadcast_pair(coupling: PairCoupling, axes: tuple[int, int], k: int) -> Callable[[float], np.ndarray]:
    a, b = axes
    shape = [1] * k

    def potential(t: float) -> np.ndarray:
        values = coupling(t)
        if a > b:
            values = values.T
        shape[a] = shape[b] = values.shape[0]
        return values.reshape(shape)

    return potential


def _summed(terms: list[Callable[[float], np.ndarray]]) -> Callable[[float], np.ndarray]:
    def potential(t: float) -> np.ndarray:
        return sum(term(t) for term in terms)

    return potential


def propagate_dense(
    state: DenseState,
    stack: PotentialStack,
    steps: int,
    material: MaterialParams,
    grid: GridSettings,
    diagnostics: Optional[PropagationDiagnostics] = None,
) -> DenseState:
    """Advance every configuration of a dense state on its full grid."""
    particles = state.particles
    k = len(particles)
    index = {label: i for i, label in enumerate(particles)}
    potentials = _Potentials(stack, state.window, material)
    configs = _configurations(k)
    tracks = []
    for config in configs:
        signature = _signature(config, index, stack)
        singles = tuple(potentials.single(_active_barriers(stack, label, signature)) for label in particles)
        pair_terms = [
            _broadcast_pair(potentials.pair(c, signature.couplers[c]), (index[cp.pair[0]], index[cp.pair[1]]), k)
            for c, cp in enumerate(stack.couplers)
        ]
        coupling = _summed(pair_terms) if pair_terms else None
        tracks.append(Track(values=state.components[config], single=singles, coupling=coupling))

    results = evolve_tracks(tracks, state.time, steps, grid.dt, state.window.spacing, material, grid.workers)
    components = np.empty_like(state.components)
    for config, values in zip(configs, results):
        components[config] = values
    if diagnostics is not None:
        diagnostics.steps += steps
    return DenseState(particles=particles, window=state.window, components=components, time=state.time + steps * grid.dt)
