"""End-to-end experiments, report emission and the invariant suite.

Every run mode produces the logical density matrix of the compiled network's
register; post-processing is shared: fidelity against the ideal output,
linear entropies of the argument qubits, and the classified outcome table.
"""

import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
import pandas as pd

from qwire.calibrate.model import SweepAxis, SweepGrid
from qwire.calibrate.service import (
    barrier_phase,
    barrier_sequence_phase,
    coupler_phase,
    extracted_phases,
    phase_error,
    robustness_scan,
    sweep_barrier,
)
from qwire.classical.model import ShorInstance
from qwire.classical.service import (
    ACTIVE_ARGUMENTS,
    argument_outcomes,
    classify_outcomes,
    compiled_instance,
    coprimes,
    factors_from_order,
    mod_exp,
    table1,
)
from qwire.config import DeviceSettings, GridSettings, SimulationSettings
from qwire.enums import OutcomeStatus, PropagationMode, ReportFormat, RunMode
from qwire.qlogic.model import DensityMatrix
from qwire.qlogic.service import (
    HADAMARD,
    ZERO_CONTROLLED_NOT,
    argument_marginals_match,
    cnot_decomposition,
    compiled_network,
    compiled_target,
    density_from_state,
    detuned_network,
    fidelity,
    hadamard_decomposition,
    linear_entropy,
    logical_probabilities,
    partial_trace,
    phase_equivalence,
    reorder,
    run_network,
    sequence_unitary,
    states_equal_up_to_phase,
    textbook_modexp_state,
)
from qwire.wavesim.model import BarrierSpec, DenseState, PotentialStack, PropagationDiagnostics, SemiOneDState
from qwire.wavesim.propagation import propagate_phase_shifter
from qwire.wavesim.readout import configuration_norms, logical_density_matrix, norm, positional_density
from qwire.wavesim.service import (
    build_device,
    centered_window,
    injected_orbital,
    product_state,
    run_physical_network,
)

from .exceptions import InvariantCheckError, MissingLayoutError, ReportWriteError
from .model import CheckResult, OutcomeRow, RunReport, SolverDiagnostics, VerifyReport, encode_matrix

logger = logging.getLogger(__name__)

AnyState = Union[SemiOneDState, DenseState]

TABLE1_EXPECTED = {
    2: (1, 2, 4, 1),
    4: (1, 4, 1, 1),
    7: (1, 7, 4, 1),
    8: (1, 8, 4, 1),
    11: (1, 11, 1, 1),
    13: (1, 13, 4, 1),
    14: (1, 14, 1, 1),
}


@dataclass(frozen=True)
class Experiment:
    """A run report together with the final wavepacket state of a physical run."""

    report: RunReport
    state: Optional[AnyState] = None


def _physical(
    co_prime: int, settings: SimulationSettings, propagation: PropagationMode, phases: tuple[float, float]
) -> tuple[DensityMatrix, SolverDiagnostics, AnyState]:
    network = compiled_network(co_prime)
    grid = settings.grid
    if propagation is PropagationMode.DENSE_ORACLE:
        window = centered_window(settings.saw, grid.dense_spacing, grid.dense_points)
    else:
        window = centered_window(settings.saw, grid.spacing, grid.points)
    if propagation is PropagationMode.PHASE_ORACLE:
        device = PotentialStack(saw=settings.saw)
    else:
        device = build_device(network, settings.device, settings.saw, window, grid.dt)
    diagnostics = PropagationDiagnostics()
    started = time.perf_counter()
    state = run_physical_network(network, device, propagation, settings, diagnostics, phases)
    elapsed = time.perf_counter() - started
    rho = logical_density_matrix(state, network.register)
    summary = SolverDiagnostics(
        initial_norm=diagnostics.initial_norm,
        final_norm=diagnostics.final_norm,
        norm_drift=diagnostics.final_norm - diagnostics.initial_norm,
        truncation_weight=diagnostics.truncation_weight,
        max_rank=diagnostics.max_rank,
        steps=diagnostics.steps,
        min_transmission=diagnostics.min_transmission,
        elapsed_seconds=elapsed,
    )
    return rho, summary, state


def _outcome_rows(instance: ShorInstance, rho: DensityMatrix) -> list[OutcomeRow]:
    arguments = ACTIVE_ARGUMENTS[instance.co_prime]
    argument_rho = reorder(partial_trace(rho, arguments), arguments)
    reported = argument_outcomes(logical_probabilities(argument_rho), arguments, instance.argument_width)
    results = {row.outcome.label: row.result for row in classify_outcomes(instance)}
    return [OutcomeRow(label=label, probability=p, result=results[label]) for label, p in reported.items()]


def _entropies(rho: DensityMatrix, arguments: tuple[str, ...]) -> dict[str, float]:
    entropies = {label: linear_entropy(partial_trace(rho, (label,))) for label in arguments}
    if len(arguments) > 1:
        entropies[",".join(arguments)] = linear_entropy(reorder(partial_trace(rho, arguments), arguments))
    return entropies


def run_experiment(
    co_prime: int,
    mode: RunMode,
    settings: SimulationSettings,
    propagation: PropagationMode = PropagationMode.RANK_LIMITED,
) -> Experiment:
    """Run the compiled network for one co-prime and post-process it.

    Args:
        co_prime: 11 or 2.
        mode: Exact phases, calibrated phases, or wavepacket propagation.
        settings: Simulator settings; the calibrated phases come from
            ``settings.device`` (defaults when absent, except in physical mode).
        propagation: Wavepacket representation of a physical run; the
            phase oracle reports the phases extracted from single-gate
            propagations of the device geometry.

    Returns:
        The report, plus the final state of a physical run.

    Raises:
        MissingLayoutError: If a physical run has no device layout.
        NonCompiledInstanceError: For co-primes without a compiled network.
    """
    instance = compiled_instance(co_prime)
    network = compiled_network(co_prime)
    target = compiled_target(co_prime)
    device = settings.device or DeviceSettings()
    phi, gamma = (math.pi, math.pi) if mode is RunMode.IDEAL else (device.phi, device.gamma)
    logger.info("Running C=%d in %s mode", co_prime, mode.value)

    diagnostics: Optional[SolverDiagnostics] = None
    state: Optional[AnyState] = None
    if mode is RunMode.IDEAL:
        rho = density_from_state(run_network(network))
    elif mode is RunMode.DETUNED:
        rho = density_from_state(run_network(detuned_network(network, phi, gamma)))
    else:
        if settings.device is None:
            raise MissingLayoutError(mode)
        if propagation is PropagationMode.PHASE_ORACLE:
            phi, gamma = extracted_phases(settings)
        rho, diagnostics, state = _physical(co_prime, settings, propagation, (phi, gamma))
    rho = reorder(rho, target.labels)

    outcomes = _outcome_rows(instance, rho)
    success = math.fsum(row.probability for row in outcomes if row.result.status is OutcomeStatus.SUCCESS)
    report = RunReport(
        modulus=instance.modulus,
        co_prime=co_prime,
        mode=mode,
        propagation=propagation if mode is RunMode.PHYSICAL else None,
        phi=phi,
        gamma=gamma,
        labels=rho.labels,
        density_matrix=encode_matrix(rho.entries),
        fidelity=fidelity(rho, target),
        linear_entropy=_entropies(rho, ACTIVE_ARGUMENTS[co_prime]),
        probabilities=logical_probabilities(rho),
        outcomes=outcomes,
        success_probability=min(success, 1.0),
        diagnostics=diagnostics,
    )
    logger.info("C=%d %s: fidelity %.4f, success %.3f", co_prime, mode.value, report.fidelity, success)
    return Experiment(report=report, state=state)


def run_shor15(
    co_prime: int,
    mode: RunMode,
    settings: SimulationSettings,
    propagation: PropagationMode = PropagationMode.RANK_LIMITED,
) -> RunReport:
    """Report of one compiled factoring run of N=15; see :func:`run_experiment`."""
    return run_experiment(co_prime, mode, settings, propagation).report


def _stem(report: RunReport) -> str:
    return f"shor15_C{report.co_prime}_{report.mode.value}"


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(path, str(exc)) from exc
    return path


def _csv(frame: pd.DataFrame, path: Path) -> Path:
    return _write(path, frame.to_csv(index=False, float_format="%.12g"))


def emit(
    report: RunReport, fmt: ReportFormat, out_dir: Path, state: Optional[AnyState] = None
) -> list[Path]:
    """Write a report as one JSON file or as a CSV bundle.

    The bundle is a directory holding ``report.json`` plus ``density_matrix.csv``,
    ``probabilities.csv``, ``outcomes.csv``, ``linear_entropy.csv`` and, when the
    final state of a physical run is given, ``positional_density_<qubit>.csv``
    for every argument qubit.

    Raises:
        ReportWriteError: On any I/O failure.
    """
    out_dir = Path(out_dir)
    text = report.model_dump_json(indent=2) + "\n"
    if fmt is ReportFormat.JSON:
        return [_write(out_dir / f"{_stem(report)}.json", text)]

    bundle = out_dir / _stem(report)
    rho = report.density()
    dim = len(rho)
    paths = [_write(bundle / "report.json", text)]
    paths.append(
        _csv(
            pd.DataFrame(
                {
                    "row": np.repeat(np.arange(dim), dim),
                    "col": np.tile(np.arange(dim), dim),
                    "re": rho.real.reshape(-1),
                    "im": rho.imag.reshape(-1),
                }
            ),
            bundle / "density_matrix.csv",
        )
    )
    paths.append(
        _csv(
            pd.DataFrame({"bits": list(report.probabilities), "probability": list(report.probabilities.values())}),
            bundle / "probabilities.csv",
        )
    )
    outcome_rows = [
        {
            "label": row.label,
            "probability": row.probability,
            "status": row.result.status.value,
            "order": row.result.order,
            "factors": " ".join(str(f) for f in row.result.factors or ()),
        }
        for row in report.outcomes
    ]
    paths.append(_csv(pd.DataFrame(outcome_rows), bundle / "outcomes.csv"))
    paths.append(
        _csv(
            pd.DataFrame({"qubits": list(report.linear_entropy), "linear_entropy": list(report.linear_entropy.values())}),
            bundle / "linear_entropy.csv",
        )
    )
    if state is not None:
        for qubit in ACTIVE_ARGUMENTS[report.co_prime]:
            paths.append(_csv(positional_density(state, qubit), bundle / f"positional_density_{qubit}.csv"))
    logger.info("Wrote %d files to %s", len(paths), bundle)
    return paths


def write_table(frame: pd.DataFrame, path: Path, index: bool = True) -> Path:
    """Write a table as CSV.

    Raises:
        ReportWriteError: On any I/O failure.
    """
    return _write(Path(path), frame.to_csv(index=index, float_format="%.12g"))


# Invariant suite. Each check returns (passed, detail).

Check = Callable[[SimulationSettings], tuple[bool, str]]


def _check_compiled_outputs(settings: SimulationSettings) -> tuple[bool, str]:
    ok = {c: states_equal_up_to_phase(run_network(compiled_network(c)), compiled_target(c)) for c in (11, 2)}
    return all(ok.values()), f"exact per co-prime: {ok}"


def _check_unitarity(settings: SimulationSettings) -> tuple[bool, str]:
    worst = 0.0
    for c in (11, 2):
        u = sequence_unitary(compiled_network(c))
        worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(len(u))))))
    return worst < 1e-12, f"max |U^dag U - I| = {worst:.2e}"


def _check_decompositions(settings: SimulationSettings) -> tuple[bool, str]:
    h = phase_equivalence(sequence_unitary(hadamard_decomposition()), HADAMARD)
    cnot = phase_equivalence(sequence_unitary(cnot_decomposition()), ZERO_CONTROLLED_NOT)
    return h.equivalent and cnot.equivalent, f"H {h.equivalent}, CNOT {cnot.equivalent}"


def _check_density_matrices(settings: SimulationSettings) -> tuple[bool, str]:
    device = settings.device or DeviceSettings()
    worst = 0.0
    for c in (11, 2):
        rho = density_from_state(run_network(detuned_network(compiled_network(c), device.phi, device.gamma)))
        worst = max(worst, abs(np.trace(rho.entries) - 1.0), float(np.max(np.abs(rho.entries - rho.entries.conj().T))))
    return worst < 1e-12, f"trace/hermiticity deviation {worst:.2e}"


def _check_partial_traces(settings: SimulationSettings) -> tuple[bool, str]:
    rho = density_from_state(run_network(compiled_network(2)))
    at_once = partial_trace(rho, ("x0",))
    stepwise = partial_trace(partial_trace(rho, ("x1", "x0")), ("x0",))
    deviation = float(np.max(np.abs(at_once.entries - stepwise.entries)))
    return deviation < 1e-12 and abs(np.trace(at_once.entries) - 1.0) < 1e-12, f"deviation {deviation:.2e}"


def _check_table1(settings: SimulationSettings) -> tuple[bool, str]:
    frame = table1()
    mismatched = [c for c, column in TABLE1_EXPECTED.items() if tuple(frame[c]) != column]
    return not mismatched, f"mismatched co-primes: {mismatched}"


def _check_classification(settings: SimulationSettings) -> tuple[bool, str]:
    statuses = {c: [row.result.status.value for row in classify_outcomes(compiled_instance(c))] for c in (11, 2)}
    expected = {11: ["failure", "success"], 2: ["failure", "success", "trivial", "success"]}
    return statuses == expected, f"statuses {statuses}"


def _check_factor_rule(settings: SimulationSettings) -> tuple[bool, str]:
    for n in range(3, 51):
        for c in coprimes(n):
            order = next(r for r in range(1, n + 1) if mod_exp(c, r, n) == 1)
            result = factors_from_order(c, order, n)
            if result.factors is not None and (result.factors[0] * result.factors[1] != n or 1 in result.factors):
                return False, f"N={n}, C={c}, r={order} gave {result.factors}"
    return True, "N <= 50"


def _check_argument_marginals(settings: SimulationSettings) -> tuple[bool, str]:
    ok = {
        c: argument_marginals_match(run_network(compiled_network(c)), textbook_modexp_state(c), ACTIVE_ARGUMENTS[c])
        for c in (11, 2)
    }
    return all(ok.values()), f"match per co-prime: {ok}"


def _check_robustness_peak(settings: SimulationSettings) -> tuple[bool, str]:
    scan = robustness_scan(11, [math.pi, 0.92 * math.pi], [math.pi, 0.88 * math.pi])
    exact = float(scan.loc[(scan["phi"] == math.pi) & (scan["gamma"] == math.pi), "fidelity"].iloc[0])
    detuned = float(scan["fidelity"].min())
    return abs(exact - 1.0) < 1e-12 and 0.9 < detuned < 1.0, f"exact {exact:.6f}, detuned {detuned:.6f}"


def coarse_settings(settings: SimulationSettings) -> SimulationSettings:
    """Copy of ``settings`` on a 40 nm SAW and a 24-point grid, where gate propagations take seconds."""
    return settings.model_copy(
        update={
            "saw": settings.saw.model_copy(update={"wavelength": 40.0}),
            "grid": GridSettings(
                spacing=2.0,
                points=24,
                dt=0.01,
                dense_spacing=2.0,
                dense_points=24,
                rank_cap=24,
                truncation_tol=1e-10,
                workers=settings.grid.workers,
            ),
            "device": DeviceSettings(coupler_length=20.0, near_distance=5.0, far_distance=40.0),
        }
    )


def _network_states(settings: SimulationSettings, co_prime: int, *modes: PropagationMode) -> list[AnyState]:
    network = compiled_network(co_prime)
    window = centered_window(settings.saw, settings.grid.spacing, settings.grid.points)
    device = build_device(network, settings.device, settings.saw, window, settings.grid.dt)
    return [run_physical_network(network, device, mode, settings) for mode in modes]


def _check_norm_conservation(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    worst = 0.0
    for c in (11, 2):
        (state,) = _network_states(coarse, c, PropagationMode.RANK_LIMITED)
        worst = max(worst, abs(norm(state) - 1.0))
    return worst < 1e-8, f"max norm drift over a propagated network {worst:.2e}"


def _check_configuration_decoupling(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    saw, material, grid = coarse.saw, coarse.material, coarse.grid
    window = centered_window(saw, grid.spacing, grid.points)
    amplitudes = np.array([[0.6, 0.48j], [0.32, 0.56]])
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    state = product_state(("a", "b"), window, injected_orbital(saw, window, material, grid), amplitudes=amplitudes)
    center = saw.minimum(window.origin + window.extent / 2) + saw.wavelength + 4.0
    barrier = BarrierSpec(height=2.0, length=8.0, wire=1, center=center, qubit="a")
    out = propagate_phase_shifter(state, barrier, saw, material, grid)
    deviation = float(np.max(np.abs(configuration_norms(out) - configuration_norms(state))))
    return deviation < 1e-10, f"max change of a configuration norm {deviation:.2e}"


def _check_phase_additivity(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    first, _ = barrier_phase(1.0, 8.0, coarse)
    second, _ = barrier_phase(1.5, 8.0, coarse)
    both, _ = barrier_sequence_phase([(1.0, 8.0), (1.5, 8.0)], coarse)
    deviation = phase_error(both, first + second)
    return deviation < 2e-2, f"phases {first:.4f} + {second:.4f} vs {both:.4f} rad"


def _check_coupler_symmetry(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    device = coarse.device
    forward, _ = coupler_phase(device.coupler_length, device.near_distance, coarse, device)
    swapped, _ = coupler_phase(device.coupler_length, device.near_distance, coarse, device, swapped=True)
    deviation = phase_error(forward, swapped)
    return deviation < 1e-3, f"gamma {forward:.6f} vs swapped {swapped:.6f} rad"


def _check_dense_low_rank(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    register = compiled_network(11).register
    ranked, dense = _network_states(coarse, 11, PropagationMode.RANK_LIMITED, PropagationMode.DENSE_ORACLE)
    deviation = float(
        np.max(np.abs(logical_density_matrix(ranked, register).entries - logical_density_matrix(dense, register).entries))
    )
    return deviation < 1e-3, f"max entry deviation {deviation:.2e}"


def _check_calibration_determinism(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    grid = SweepGrid(axes=(SweepAxis(name="height", minimum=0.5, maximum=1.5, step=0.5),), target=0.5 * math.pi)
    first = sweep_barrier(grid, coarse)
    second = sweep_barrier(grid, coarse)
    same = first.model_dump_json() == second.model_dump_json()
    return same, f"best {first.best}, phase {first.achieved_phase:.6f} rad"


def _check_phase_oracle(settings: SimulationSettings) -> tuple[bool, str]:
    coarse = coarse_settings(settings)
    phi, gamma = extracted_phases(coarse)
    worst = 0.0
    for c in (11, 2):
        network = compiled_network(c)
        state = run_physical_network(
            network, PotentialStack(saw=coarse.saw), PropagationMode.PHASE_ORACLE, coarse, phases=(phi, gamma)
        )
        physical = logical_density_matrix(state, network.register)
        logical = density_from_state(run_network(detuned_network(network, phi, gamma)))
        worst = max(worst, float(np.max(np.abs(physical.entries - logical.entries))))
    return worst < 1e-10, f"extracted phi {phi:.4f}, gamma {gamma:.4f} rad; max deviation {worst:.2e}"


INVARIANT_CHECKS: dict[str, Check] = {
    "compiled_outputs": _check_compiled_outputs,
    "unitarity": _check_unitarity,
    "gate_decompositions": _check_decompositions,
    "density_trace_hermiticity": _check_density_matrices,
    "partial_trace_identities": _check_partial_traces,
    "table1": _check_table1,
    "outcome_classification": _check_classification,
    "factor_rule": _check_factor_rule,
    "argument_marginals": _check_argument_marginals,
    "robustness_peak": _check_robustness_peak,
    "norm_conservation": _check_norm_conservation,
    "configuration_decoupling": _check_configuration_decoupling,
    "phase_additivity": _check_phase_additivity,
    "coupler_symmetry": _check_coupler_symmetry,
    "dense_low_rank_agreement": _check_dense_low_rank,
    "calibration_determinism": _check_calibration_determinism,
    "phase_oracle_equivalence": _check_phase_oracle,
}

# Checks that propagate wavepackets; they run on coarse_settings and take minutes together.
PROPAGATION_CHECKS = (
    "norm_conservation",
    "configuration_decoupling",
    "phase_additivity",
    "coupler_symmetry",
    "dense_low_rank_agreement",
    "calibration_determinism",
    "phase_oracle_equivalence",
)


def verify(settings: SimulationSettings, names: Optional[list[str]] = None) -> VerifyReport:
    """Run the named invariant checks, or all of them.

    A check that raises counts as failed with the exception text as detail.

    Raises:
        KeyError: If a requested check does not exist.
    """
    selected = names or list(INVARIANT_CHECKS)
    checks = []
    for name in selected:
        check = INVARIANT_CHECKS[name]
        try:
            passed, detail = check(settings)
        except Exception as exc:
            logger.exception("Check %s raised", name)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, "%-28s %s  %s", name, "PASS" if passed else "FAIL", detail)
        checks.append(CheckResult(name=name, passed=bool(passed), detail=detail))
    return VerifyReport(checks=checks)


def require_passed(report: VerifyReport) -> VerifyReport:
    """Raise when any check of a verify report failed.

    Raises:
        InvariantCheckError: Naming the failing checks.
    """
    if not report.passed:
        raise InvariantCheckError(report.failed)
    return report


def dump_verify(report: VerifyReport, out_dir: Path) -> Path:
    """Write a verify report as ``verify.json``."""
    return _write(Path(out_dir) / "verify.json", json.dumps(report.model_dump(), indent=2) + "\n")
