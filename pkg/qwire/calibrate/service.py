"""Calibration sweeps for phase-shifter and coupler geometries.

Every sweep point is an independent single-gate propagation, so points run
on a thread pool and the table is assembled in grid order afterwards.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from qwire.config import DeviceSettings, SimulationSettings
from qwire.qlogic.service import (
    compiled_network,
    compiled_target,
    density_from_state,
    detuned_network,
    fidelity,
    run_network,
)
from qwire.wavesim.exceptions import PhaseIllDefinedError
from qwire.wavesim.model import BarrierSpec, CouplerSpec, MaterialParams, SawPotential, SemiOneDState
from qwire.wavesim.propagation import TRANSMISSION_THRESHOLD, propagate_coupler, propagate_phase_shifter
from qwire.wavesim.readout import conditional_phase, extract_phase, grid_frame, transmitted_fraction
from qwire.wavesim.service import centered_window, injected_orbital, product_state

from .exceptions import InvalidSweepGridError, NoFeasiblePointError, PhaseExtractionError
from .model import CalibrationResult, SweepGrid

logger = logging.getLogger(__name__)

BARRIER_PARAMETERS = ("height", "length")
COUPLER_PARAMETERS = ("region_length", "near_distance")

PointResult = tuple[float, float]


def wrap_phase(phase: float) -> float:
    """Map a phase into (-pi, pi]."""
    wrapped = math.remainder(phase, 2 * math.pi)
    return math.pi if wrapped <= -math.pi else wrapped


def phase_error(phase: float, target: float) -> float:
    """Distance between two phases on the circle."""
    return abs(wrap_phase(phase - target))


def semiclassical_phase(height: float, length: float, saw: SawPotential, material: MaterialParams) -> float:
    """Delay phase V L / (hbar v) of a carrier crossing a barrier at the SAW speed."""
    return wrap_phase(height * length / (material.hbar * saw.velocity))


def semiclassical_oracle(settings: SimulationSettings) -> Callable[[float, float], PointResult]:
    """Barrier evaluator returning the semiclassical phase at full transmission."""

    def evaluate(height: float, length: float) -> PointResult:
        return semiclassical_phase(height, length, settings.saw, settings.material), 1.0

    return evaluate


def _barrier_run(barriers: Sequence[tuple[float, float]], settings: SimulationSettings) -> SemiOneDState:
    """One carrier in an equal superposition carried past wire-1 barriers, one after the other."""
    saw, material, grid = settings.saw, settings.material, settings.grid
    window = centered_window(saw, grid.spacing, grid.points)
    orbital = injected_orbital(saw, window, material, grid)
    state = product_state(("q",), window, orbital, amplitudes=np.full(2, 1 / math.sqrt(2)))
    start = saw.minimum(window.origin + window.extent / 2)
    for height, length in barriers:
        center = start + saw.velocity * state.time + saw.wavelength + length / 2
        barrier = BarrierSpec(height=height, length=length, wire=1, center=center, qubit="q")
        state = propagate_phase_shifter(state, barrier, saw, material, grid, check_transmission=False)
    return state


def barrier_sequence_phase(barriers: Sequence[tuple[float, float]], settings: SimulationSettings) -> PointResult:
    """Phase of wire 0 relative to wire 1 after crossing (height, length) barriers in wire 1.

    Returns:
        That phase (NaN when the packet is too distorted to carry one) and
        the trapped fraction of wire 1.
    """
    out = _barrier_run(barriers, settings)
    transmitted = transmitted_fraction(out, "q", 1, settings.saw)
    try:
        phase = extract_phase(out, out, ((0,), (1,)))
    except PhaseIllDefinedError:
        phase = math.nan
    return phase, transmitted


def barrier_phase(height: float, length: float, settings: SimulationSettings) -> PointResult:
    """Propagate one carrier in an equal superposition past a barrier in wire 1.

    The barrier delays wire 1, so the phase of wire 0 relative to wire 1 is
    the phase R0 realizes; it grows with height and length.

    Returns:
        That phase and the trapped fraction of wire 1.
    """
    return barrier_sequence_phase([(height, length)], settings)


def barrier_grid(height: float, length: float, settings: SimulationSettings) -> pd.DataFrame:
    """Grid dump of the carrier after one barrier, see :func:`grid_frame`."""
    return grid_frame(_barrier_run([(height, length)], settings))


def coupler_phase(
    region_length: float,
    near_distance: float,
    settings: SimulationSettings,
    device: DeviceSettings,
    swapped: bool = False,
) -> PointResult:
    """Propagate two carriers in a uniform superposition through one coupler.

    With ``swapped`` the coupler lists the pair as (b, a) and interacts on
    (1, 0), which is the same physical configuration.

    Returns:
        The conditional phase of the interacting configuration and the
        smaller trapped fraction of the two interacting wires.
    """
    saw, material, grid = settings.saw, settings.material, settings.grid
    window = centered_window(saw, grid.spacing, grid.points)
    orbital = injected_orbital(saw, window, material, grid)
    state = product_state(("a", "b"), window, orbital, amplitudes=np.full((2, 2), 0.5))
    center = saw.minimum(window.origin + window.extent / 2) + saw.wavelength + region_length / 2
    coupler = CouplerSpec(
        region_length=region_length,
        near_distance=near_distance,
        far_distance=device.far_distance,
        debye_k=device.debye_k,
        center=center,
        pair=("b", "a") if swapped else ("a", "b"),
        interacting_config=(1, 0) if swapped else (0, 1),
    )
    out = propagate_coupler(state, coupler, saw, material, grid)
    transmitted = min(transmitted_fraction(out, "a", 0, saw), transmitted_fraction(out, "b", 1, saw))
    try:
        phase = conditional_phase(out, ("a", "b"), (0, 1))
    except PhaseIllDefinedError:
        phase = math.nan
    return phase, transmitted


def extracted_phases(settings: SimulationSettings) -> tuple[float, float]:
    """Phases (phi, gamma) the configured device geometry actually produces.

    Runs one barrier and one coupler propagation on the configured grid,
    concurrently.

    Raises:
        PhaseExtractionError: If either run loses its phase or its packet.
    """
    device = settings.device or DeviceSettings()
    with ThreadPoolExecutor(max_workers=2) as pool:
        barrier = pool.submit(barrier_phase, device.barrier_height, device.barrier_length, settings)
        coupler = pool.submit(coupler_phase, device.coupler_length, device.near_distance, settings, device)
        results = {"barrier": barrier.result(), "coupler": coupler.result()}
    for gate, (phase, transmitted) in results.items():
        if math.isnan(phase) or transmitted < TRANSMISSION_THRESHOLD:
            raise PhaseExtractionError(gate, phase, transmitted)
    phi, gamma = results["barrier"][0], results["coupler"][0]
    logger.info("Extracted phi %.4f pi, gamma %.4f pi", phi / math.pi, gamma / math.pi)
    return phi, gamma


def _check_names(grid: SweepGrid, allowed: tuple[str, ...]) -> None:
    unknown = [name for name in grid.names if name not in allowed]
    if unknown:
        raise InvalidSweepGridError(f"cannot sweep {unknown}; choose from {list(allowed)}")


def _run_points(
    evaluate: Callable[[dict[str, float]], PointResult], psets: list[dict[str, float]], workers: int
) -> list[PointResult]:
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, psets))


def select_best(table: pd.DataFrame, grid: SweepGrid) -> CalibrationResult:
    """Pick the feasible row closest to the target.

    Ties go to the smaller first parameter, then the smaller second one.

    Raises:
        NoFeasiblePointError: If no row is feasible.
    """
    feasible = table[table["feasible"]]
    if feasible.empty:
        raise NoFeasiblePointError(grid.target, grid.tolerance)
    ranked = feasible.sort_values(["phase_error", *grid.names], kind="mergesort")
    best = ranked.iloc[0]
    records = table.astype(object).where(table.notna(), None).to_dict(orient="records")
    return CalibrationResult(
        target=grid.target,
        best={name: float(best[name]) for name in grid.names},
        achieved_phase=float(best["phase"]),
        phase_error=float(best["phase_error"]),
        transmitted_norm=float(min(best["transmitted"], 1.0)),
        table=records,
    )


def _sweep(
    grid: SweepGrid, evaluate: Callable[[dict[str, float]], PointResult], workers: int
) -> CalibrationResult:
    psets = grid.psets()
    logger.info("Sweeping %s over %d points (target %.4f rad)", grid.names, len(psets), grid.target)
    results = _run_points(evaluate, psets, workers)
    rows = []
    for pset, (phase, transmitted) in zip(psets, results):
        error = phase_error(phase, grid.target) if not math.isnan(phase) else math.nan
        feasible = not math.isnan(phase) and transmitted >= TRANSMISSION_THRESHOLD
        if feasible and grid.tolerance is not None:
            feasible = error <= grid.tolerance
        rows.append({**pset, "phase": phase, "phase_error": error, "transmitted": transmitted, "feasible": feasible})
    table = pd.DataFrame(rows)
    flagged = int((~table["feasible"]).sum())
    if flagged:
        logger.warning("%d of %d sweep points are infeasible", flagged, len(table))
    result = select_best(table, grid)
    logger.info("Best point %s: phase %.4f rad, error %.2e", result.best, result.achieved_phase, result.phase_error)
    return result


def sweep_barrier(
    grid: SweepGrid,
    settings: SimulationSettings,
    phase_of: Optional[Callable[[float, float], PointResult]] = None,
) -> CalibrationResult:
    """Search barrier (height, length) for the target single-wire phase.

    Args:
        grid: Axes drawn from ``height`` (meV) and ``length`` (nm); an axis
            left out is held at the configured device value.
        settings: Material, SAW, grid and device settings.
        phase_of: Replaces the wavepacket propagation, e.g. with
            :func:`semiclassical_oracle`.

    Raises:
        InvalidSweepGridError: If an axis is not a barrier parameter.
        NoFeasiblePointError: If no point qualifies.
    """
    _check_names(grid, BARRIER_PARAMETERS)
    device = settings.device or DeviceSettings()
    defaults = {"height": device.barrier_height, "length": device.barrier_length}
    evaluate_point = phase_of or (lambda height, length: barrier_phase(height, length, settings))

    def evaluate(pset: dict[str, float]) -> PointResult:
        point = {**defaults, **pset}
        return evaluate_point(point["height"], point["length"])

    return _sweep(grid, evaluate, settings.grid.workers)


def sweep_coupler(grid: SweepGrid, settings: SimulationSettings) -> CalibrationResult:
    """Search coupler (region_length, near_distance) for the target conditional phase.

    Args:
        grid: Axes drawn from ``region_length`` and ``near_distance`` (nm); an
            axis left out is held at the configured device value.
        settings: Material, SAW, grid and device settings.

    Raises:
        InvalidSweepGridError: If an axis is not a coupler parameter.
        NoFeasiblePointError: If no point qualifies.
    """
    _check_names(grid, COUPLER_PARAMETERS)
    device = settings.device or DeviceSettings()
    defaults = {"region_length": device.coupler_length, "near_distance": device.near_distance}

    def evaluate(pset: dict[str, float]) -> PointResult:
        point = {**defaults, **pset}
        return coupler_phase(point["region_length"], point["near_distance"], settings, device)

    return _sweep(grid, evaluate, settings.grid.workers)


def robustness_scan(co_prime: int, phi_values: Iterable[float], gamma_values: Iterable[float]) -> pd.DataFrame:
    """Fidelity of the detuned compiled network against its ideal output.

    Returns:
        One row per (phi, gamma) with columns ``phi``, ``gamma`` and ``fidelity``.
    """
    network = compiled_network(co_prime)
    target = compiled_target(co_prime)
    gammas = list(gamma_values)
    rows = []
    for phi in phi_values:
        for gamma in gammas:
            state = run_network(detuned_network(network, phi, gamma))
            rows.append({"phi": phi, "gamma": gamma, "fidelity": fidelity(density_from_state(state), target)})
    return pd.DataFrame(rows)


def write_result(result: CalibrationResult, out_dir: Path, stem: str) -> list[Path]:
    """Persist a calibration as ``<stem>.json`` plus its sweep table as ``<stem>.csv``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{stem}.json"
    csv_path = out_dir / f"{stem}.csv"
    json_path.write_text(json.dumps(result.model_dump(), indent=2, allow_nan=False), encoding="utf-8")
    result.frame().to_csv(csv_path, index=False)
    return [json_path, csv_path]
