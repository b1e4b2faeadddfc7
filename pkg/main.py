"""Command-line entry point of the quantum-wire Shor simulator.

Subcommands:
    run        Run the compiled N=15 network for one co-prime and emit a report.
    calibrate  Sweep barrier or coupler geometries, or scan detuning robustness.
    verify     Run the invariant suite; exit code 1 names the failing checks.
    table1     Print and write the table of C**x mod 15.

``--seed`` is accepted for reproducible invocations but has no effect: no
part of the simulator is stochastic.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from qwire.calibrate import CalibrateException, SweepAxis, SweepGrid
from qwire.calibrate.service import semiclassical_oracle
from qwire.classical import ClassicalException
from qwire.config import DeviceSettings, SimulationSettings, load_settings
from qwire.dispatch import DISPATCH
from qwire.enums import PropagationMode, ReportFormat, RunMode
from qwire.qlogic import QLogicException
from qwire.reports import ReportsException
from qwire.reports.service import INVARIANT_CHECKS
from qwire.wavesim import WaveSimException

logger = logging.getLogger("qwire")

AREA_EXCEPTIONS = (QLogicException, ClassicalException, WaveSimException, CalibrateException, ReportsException)


def parse_axis(text: str) -> SweepAxis:
    """Parse ``name:min:max:step`` into a sweep axis."""
    try:
        name, low, high, step = text.split(":")
        return SweepAxis(name=name, minimum=float(low), maximum=float(high), step=float(step))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected name:min:max:step, got {text!r} ({exc})") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Compiled Shor factoring of 15 on quantum-wire qubits")
    parser.add_argument("--config", type=Path, default=None, help="JSON configuration file")
    parser.add_argument("--out", type=Path, default=Path("results"), help="Output directory")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--seed", type=int, default=None, help="Accepted and ignored; nothing is stochastic")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one factoring experiment")
    run.add_argument("--co-prime", type=int, choices=[11, 2], required=True)
    run.add_argument("--mode", choices=[m.value for m in RunMode], default=RunMode.IDEAL.value)
    oracle = run.add_mutually_exclusive_group()
    oracle.add_argument("--dense-oracle", action="store_true", help="Propagate on the coarse dense grid")
    oracle.add_argument("--phase-oracle", action="store_true", help="Replace gate propagation by extracted phases")
    run.add_argument("--format", choices=[f.value for f in ReportFormat], default=ReportFormat.JSON.value)

    calibrate = sub.add_parser("calibrate", help="Sweep gate geometries")
    calibrate.add_argument("--gate", choices=["barrier", "coupler"], default="barrier")
    calibrate.add_argument("--sweep", type=parse_axis, action="append", default=[], help="name:min:max:step")
    calibrate.add_argument("--target", type=float, default=None, help="Target phase in units of pi")
    calibrate.add_argument("--tolerance", type=float, default=None, help="Accepted phase error (rad)")
    calibrate.add_argument("--semiclassical", action="store_true", help="Barrier phases from V L / (hbar v)")
    calibrate.add_argument("--robustness", action="store_true", help="Scan fidelity over detuned phases")
    calibrate.add_argument("--co-prime", type=int, choices=[11, 2], default=11)
    calibrate.add_argument("--scan-min", type=float, default=0.8, help="Lowest scanned phase in units of pi")
    calibrate.add_argument("--scan-points", type=int, default=11)

    verify = sub.add_parser("verify", help="Run the invariant suite")
    verify.add_argument(
        "--check", action="append", default=None, choices=list(INVARIANT_CHECKS), help="Run only the named check"
    )

    sub.add_parser("table1", help="Tabulate C**x mod 15")
    return parser


def command_run(args: argparse.Namespace, settings: SimulationSettings) -> int:
    mode = RunMode(args.mode)
    propagation = PropagationMode.RANK_LIMITED
    if args.dense_oracle:
        propagation = PropagationMode.DENSE_ORACLE
    elif args.phase_oracle:
        propagation = PropagationMode.PHASE_ORACLE
    experiment = DISPATCH.reports.run_experiment(args.co_prime, mode, settings, propagation)
    paths = DISPATCH.reports.emit(experiment.report, ReportFormat(args.format), args.out, experiment.state)
    report = experiment.report
    print(f"C={report.co_prime} {report.mode.value}: fidelity {report.fidelity:.4f}")
    for row in report.outcomes:
        print(f"  {row.label}  p={row.probability:.4f}  {row.result.status.value}  r={row.result.order}")
    for path in paths:
        print(f"  wrote {path}")
    return 0


def command_calibrate(args: argparse.Namespace, settings: SimulationSettings) -> int:
    if args.robustness:
        values = np.linspace(args.scan_min * math.pi, math.pi, args.scan_points)
        frame = DISPATCH.calibrate.robustness_scan(args.co_prime, values, values)
        path = DISPATCH.reports.write_table(frame, args.out / f"robustness_C{args.co_prime}.csv", index=False)
        print(frame.pivot(index="phi", columns="gamma", values="fidelity").round(4).to_string())
        print(f"wrote {path}")
        return 0

    device = settings.device or DeviceSettings()
    if args.gate == "barrier":
        target = args.target if args.target is not None else device.phi / math.pi
        axes = args.sweep or [SweepAxis(name="height", minimum=0.5, maximum=4.0, step=0.1)]
    else:
        target = args.target if args.target is not None else device.gamma / math.pi
        axes = args.sweep or [SweepAxis(name="region_length", minimum=50.0, maximum=250.0, step=10.0)]
    grid = SweepGrid(axes=tuple(axes), target=target * math.pi, tolerance=args.tolerance)
    if args.gate == "barrier":
        phase_of = semiclassical_oracle(settings) if args.semiclassical else None
        result = DISPATCH.calibrate.sweep_barrier(grid, settings, phase_of=phase_of)
    else:
        result = DISPATCH.calibrate.sweep_coupler(grid, settings)
    paths = DISPATCH.calibrate.write_result(result, args.out, f"calibrate_{args.gate}")
    if args.gate == "barrier" and not args.semiclassical:
        point = {"height": device.barrier_height, "length": device.barrier_length, **result.best}
        frame = DISPATCH.calibrate.barrier_grid(point["height"], point["length"], settings)
        paths.append(DISPATCH.reports.write_table(frame, args.out / "calibrate_barrier_grid.csv", index=False))
    print(f"best {result.best}: phase {result.achieved_phase / math.pi:.4f} pi, error {result.phase_error:.2e} rad")
    for path in paths:
        print(f"wrote {path}")
    return 0


def command_verify(args: argparse.Namespace, settings: SimulationSettings) -> int:
    report = DISPATCH.reports.verify(settings, args.check)
    DISPATCH.reports.dump_verify(report, args.out)
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
    DISPATCH.reports.require_passed(report)
    return 0


def command_table1(args: argparse.Namespace, settings: SimulationSettings) -> int:
    frame = DISPATCH.classical.table1()
    print(frame.to_string())
    print(f"wrote {DISPATCH.reports.write_table(frame, args.out / 'table1.csv')}")
    return 0


COMMANDS = {
    "run": command_run,
    "calibrate": command_calibrate,
    "verify": command_verify,
    "table1": command_table1,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = load_settings(args.config)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        logger.error("Cannot load configuration %s: %s", args.config, exc)
        return 1
    try:
        return COMMANDS[args.command](args, settings)
    except AREA_EXCEPTIONS as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
