"""Readouts of multi-particle states: norms, logical densities, phases.

Positional integrals of product terms reduce to per-particle overlap
matrices, so no readout ever builds the k-particle grid.
"""

import math
from typing import Iterable, Union

import numpy as np
import pandas as pd

from qwire.qlogic.model import DensityMatrix
from qwire.qlogic.service import partial_trace

from .exceptions import PhaseIllDefinedError
from .model import DenseState, SawPotential, SemiOneDState
from .potentials import trap_mask

PHASE_OVERLAP_FLOOR = 0.5
PHYSICAL_TOL = 1e-8

AnyState = Union[SemiOneDState, DenseState]


def _overlaps(bra: SemiOneDState, ket: SemiOneDState, particle: int) -> np.ndarray:
    """M[s, t] = <bra_s | ket_t> for one particle."""
    left = np.stack([term.factors[particle] for term in bra.terms])
    right = np.stack([term.factors[particle] for term in ket.terms])
    return left.conj() @ right.T * ket.window.spacing


def _coefficients(state: SemiOneDState) -> np.ndarray:
    return np.stack([term.amplitudes.reshape(-1) for term in state.terms])


def _full_density(state: AnyState) -> np.ndarray:
    if isinstance(state, DenseState):
        k = len(state.particles)
        flat = state.components.reshape(2**k, -1)
        return flat @ flat.conj().T * state.window.spacing**k
    gram = np.ones((state.rank, state.rank), dtype=complex)
    for p in range(len(state.particles)):
        gram = gram * _overlaps(state, state, p)
    coefficients = _coefficients(state)
    # rho[X, X'] = sum_{t,t'} c^t_X <phi^t'|phi^t> conj(c^t'_X')
    return coefficients.T @ gram.T @ coefficients.conj()


def norm(state: AnyState) -> float:
    """Total norm sum_X integral |Phi_X(Y)|^2 dY."""
    return float(np.real(np.trace(_full_density(state))))


def configuration_norms(state: AnyState) -> np.ndarray:
    """Positional norm of every configuration, shape (2,)*k."""
    weights = np.real(np.diag(_full_density(state)))
    return weights.reshape((2,) * len(state.particles))


def logical_density_matrix(state: AnyState, keep: Iterable[str]) -> DensityMatrix:
    """Logical density matrix with every position integrated out.

    Args:
        state: Product-term or dense state.
        keep: Qubits to keep; the result follows the state's particle order.

    Returns:
        Trace-normalized reduced density matrix.
    """
    rho = _full_density(state)
    rho = rho / np.trace(rho)
    rho = (rho + rho.conj().T) / 2
    full = DensityMatrix(rho, state.particles, tol=PHYSICAL_TOL)
    keep = tuple(keep)
    if set(keep) == set(state.particles):
        return full
    return partial_trace(full, keep)


def positional_density(state: AnyState, qubit: str) -> pd.DataFrame:
    """Single-particle density of one qubit in each wire.

    Returns:
        Frame with the co-moving window coordinate ``y`` (nm) and the curves ``wire0`` and
        ``wire1`` (1/nm); together they integrate to 1.
    """
    q = state.particles.index(qubit)
    k = len(state.particles)
    spacing = state.window.spacing
    if isinstance(state, DenseState):
        weights = np.abs(np.moveaxis(state.components, [q, k + q], [0, 1])) ** 2
        curves = weights.reshape(2, state.window.points, -1).sum(axis=2) * spacing ** (k - 1)
    else:
        rest = np.ones((state.rank, state.rank), dtype=complex)
        for p in range(k):
            if p != q:
                rest = rest * _overlaps(state, state, p)
        factors = np.stack([term.factors[q] for term in state.terms])
        curves = np.zeros((2, state.window.points))
        for wire in (0, 1):
            by_wire = np.stack([np.take(term.amplitudes, wire, axis=q).reshape(-1) for term in state.terms])
            weight = (by_wire @ by_wire.conj().T) * rest.T
            curves[wire] = np.real(np.einsum("ty,tu,uy->y", factors, weight, factors.conj()))
    total = curves.sum() * spacing
    curves = curves / total
    return pd.DataFrame(
        {
            "y": state.window.coordinates(),
            "wire0": curves[0],
            "wire1": curves[1],
        }
    )


def transmitted_fraction(state: AnyState, qubit: str, wire: int, saw: SawPotential) -> float:
    """Share of one wire's norm still within half a wavelength of the SAW minimum."""
    density = positional_density(state, qubit)[f"wire{wire}"].to_numpy()
    total = density.sum()
    if total == 0.0:
        return 1.0
    return float(density[trap_mask(saw, state.window, state.time)].sum() / total)


def extract_phase(
    state: SemiOneDState, reference: SemiOneDState, config_pair: tuple[tuple[int, ...], tuple[int, ...]]
) -> float:
    """Phase of the positional overlap <reference_X'|state_X>.

    Args:
        state: State holding the component X.
        reference: State holding the component X'; may be ``state`` itself.
        config_pair: The configurations (X, X').

    Returns:
        Phase in (-pi, pi].

    Raises:
        PhaseIllDefinedError: If the normalized overlap is below 0.5.
    """
    if state.window != reference.window or state.particles != reference.particles:
        raise ValueError("states live on different grids")
    config, reference_config = config_pair
    cross = np.ones((reference.rank, state.rank), dtype=complex)
    self_gram = np.ones((state.rank, state.rank), dtype=complex)
    reference_gram = np.ones((reference.rank, reference.rank), dtype=complex)
    for p in range(len(state.particles)):
        cross = cross * _overlaps(reference, state, p)
        self_gram = self_gram * _overlaps(state, state, p)
        reference_gram = reference_gram * _overlaps(reference, reference, p)
    c = np.array([term.amplitudes[tuple(config)] for term in state.terms])
    r = np.array([term.amplitudes[tuple(reference_config)] for term in reference.terms])
    overlap = r.conj() @ cross @ c
    weight = np.real(c.conj() @ self_gram @ c) * np.real(r.conj() @ reference_gram @ r)
    magnitude = abs(overlap) / math.sqrt(weight) if weight > 0 else 0.0
    if magnitude < PHASE_OVERLAP_FLOOR:
        raise PhaseIllDefinedError(magnitude)
    phase = float(np.angle(overlap))
    return math.pi if phase <= -math.pi else phase


def conditional_phase(
    state: SemiOneDState, pair: tuple[str, str], interacting: tuple[int, int] = (0, 1)
) -> float:
    """Phase of the interacting configuration relative to the opposite one.

    The remaining particles are read in wire 0.
    """
    a, b = (state.particles.index(label) for label in pair)
    phased = [0] * len(state.particles)
    opposite = [0] * len(state.particles)
    phased[a], phased[b] = interacting
    opposite[a], opposite[b] = 1 - interacting[0], 1 - interacting[1]
    return extract_phase(state, state, (tuple(phased), tuple(opposite)))


def grid_frame(state: SemiOneDState) -> pd.DataFrame:
    """Grid dump (y, Re, Im per wire) of a single-particle state."""
    if len(state.particles) != 1:
        raise ValueError("grid dumps hold single-particle states")
    frame = {"y": state.window.coordinates()}
    for wire in (0, 1):
        component = sum(term.amplitudes[wire] * term.factors[0] for term in state.terms)
        frame[f"re_{wire}"] = np.real(component)
        frame[f"im_{wire}"] = np.imag(component)
    return pd.DataFrame(frame)
