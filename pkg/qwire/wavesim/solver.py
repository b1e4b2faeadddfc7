"""Crank-Nicolson stepping on uniform grids.

One step of the 1D equation solves
``(1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi`` with
``H = -K d^2/dy^2 + V`` as a tridiagonal system. Multi-dimensional grids are
advanced by a Strang split: half a step of the pair coupling as an exact
phase, one Crank-Nicolson sweep per axis with that axis' own potential,
then the second half of the coupling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .exceptions import SolverFailureError
from .model import MaterialParams

logger = logging.getLogger(__name__)

PotentialFn = Callable[[float], np.ndarray]


def cn_axis_step(
    values: np.ndarray,
    axis: int,
    potential: np.ndarray,
    dt: float,
    spacing: float,
    material: MaterialParams,
) -> np.ndarray:
    """One Crank-Nicolson step along one axis of a grid function.

    Args:
        values: Grid function, any number of axes.
        axis: Axis carrying the kinetic term.
        potential: Potential along ``axis`` (meV), shared by every line.
        dt: Time step (ps).
        spacing: Grid spacing (nm).
        material: Supplies hbar and hbar^2/2m*.

    Returns:
        Advanced grid function, same shape as ``values``.

    Raises:
        SolverFailureError: If the banded solve fails or yields non-finite values.
    """
    n = values.shape[axis]
    ratio = 1j * dt / (2 * material.hbar)
    kinetic = material.kinetic_prefactor / spacing**2
    diagonal = 2 * kinetic + potential

    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    lines = moved.reshape(n, -1)

    h_lines = diagonal[:, None] * lines
    h_lines[1:] -= kinetic * lines[:-1]
    h_lines[:-1] -= kinetic * lines[1:]
    rhs = lines - ratio * h_lines

    bands = np.zeros((3, n), dtype=complex)
    bands[0, 1:] = -ratio * kinetic
    bands[1] = 1 + ratio * diagonal
    bands[2, :-1] = -ratio * kinetic
    try:
        solved = solve_banded((1, 1), bands, rhs, check_finite=False)
    except (LinAlgError, ValueError) as exc:
        raise SolverFailureError(str(exc)) from exc
    if not np.isfinite(solved).all():
        raise SolverFailureError("non-finite values")
    return np.moveaxis(solved.reshape(shape), 0, axis)


@dataclass(frozen=True)
class Track:
    """A grid function together with the potentials that drive it.

    Attributes:
        values: Initial grid function.
        single: Per-axis potential at a given time; None means zero.
        coupling: Non-separable potential broadcastable to ``values``.
    """

    values: np.ndarray
    single: tuple[Optional[PotentialFn], ...]
    coupling: Optional[PotentialFn] = None


def step_track(
    values: np.ndarray, track: Track, t: float, dt: float, spacing: float, material: MaterialParams
) -> np.ndarray:
    """Advance a track's grid function from t to t + dt.

    Potentials are evaluated at the midpoint t + dt/2.
    """
    midpoint = t + dt / 2
    half_phase = None
    if track.coupling is not None:
        half_phase = np.exp(-1j * track.coupling(midpoint) * dt / (2 * material.hbar))
        values = values * half_phase
    for axis, potential in enumerate(track.single):
        on_axis = potential(midpoint) if potential is not None else np.zeros(values.shape[axis])
        values = cn_axis_step(values, axis, on_axis, dt, spacing, material)
    if half_phase is not None:
        values = values * half_phase
    return values


def evolve_track(
    track: Track, t0: float, steps: int, dt: float, spacing: float, material: MaterialParams
) -> np.ndarray:
    """Run a track for ``steps`` Crank-Nicolson steps starting at t0."""
    values = np.array(track.values, dtype=complex)
    for step in range(steps):
        values = step_track(values, track, t0 + step * dt, dt, spacing, material)
    return values


def evolve_tracks(
    tracks: Sequence[Track],
    t0: float,
    steps: int,
    dt: float,
    spacing: float,
    material: MaterialParams,
    workers: int = 1,
) -> list[np.ndarray]:
    """Evolve independent tracks, concurrently when ``workers`` > 1.

    Returns:
        Final grid functions in the order of ``tracks``.
    """
    logger.debug("Evolving %d track(s) for %d steps", len(tracks), steps)
    if workers <= 1 or len(tracks) <= 1:
        return [evolve_track(track, t0, steps, dt, spacing, material) for track in tracks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(evolve_track, track, t0, steps, dt, spacing, material) for track in tracks
        ]
        return [future.result() for future in futures]
