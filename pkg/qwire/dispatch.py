"""Dispatch system for accessing business area service functions.

This module maps business areas to the service functions the command line
drives, so every subcommand reaches the engines through one interface.
"""

from dataclasses import dataclass, field
from typing import Callable

from qwire.calibrate import service as calibrate_service
from qwire.classical import service as classical_service
from qwire.reports import service as reports_service


@dataclass(frozen=True)
class ClassicalDispatch:
    """Dispatch implementation for classical Shor processing.

    Attributes:
        table1: Function tabulating C**x mod N.
    """

    table1: Callable = field(default=classical_service.table1)


@dataclass(frozen=True)
class CalibrateDispatch:
    """Dispatch implementation for calibration sweeps.

    Attributes:
        sweep_barrier: Function sweeping phase-shifter geometries.
        barrier_grid: Function dumping the carrier grid after one barrier.
        sweep_coupler: Function sweeping coupler geometries.
        robustness_scan: Function scanning fidelity over detuned phases.
        write_result: Function persisting a calibration result.
    """

    sweep_barrier: Callable = field(default=calibrate_service.sweep_barrier)
    barrier_grid: Callable = field(default=calibrate_service.barrier_grid)
    sweep_coupler: Callable = field(default=calibrate_service.sweep_coupler)
    robustness_scan: Callable = field(default=calibrate_service.robustness_scan)
    write_result: Callable = field(default=calibrate_service.write_result)


@dataclass(frozen=True)
class ReportsDispatch:
    """Dispatch implementation for experiments and reports.

    Attributes:
        run_experiment: Function running one compiled factoring experiment.
        emit: Function writing a run report.
        verify: Function running the invariant suite.
        require_passed: Function raising when a verify report has failures.
        dump_verify: Function writing a verify report.
        write_table: Function writing a table as CSV.
    """

    run_experiment: Callable = field(default=reports_service.run_experiment)
    emit: Callable = field(default=reports_service.emit)
    verify: Callable = field(default=reports_service.verify)
    require_passed: Callable = field(default=reports_service.require_passed)
    dump_verify: Callable = field(default=reports_service.dump_verify)
    write_table: Callable = field(default=reports_service.write_table)


@dataclass(frozen=True)
class Dispatch:
    """Central dispatch container for all business area operations.

    Attributes:
        classical: Classical Shor processing.
        calibrate: Calibration sweeps.
        reports: Experiments and reports.
    """

    classical: ClassicalDispatch = field(default_factory=ClassicalDispatch)
    calibrate: CalibrateDispatch = field(default_factory=CalibrateDispatch)
    reports: ReportsDispatch = field(default_factory=ReportsDispatch)


DISPATCH = Dispatch()
"""Central dispatch instance for accessing all business area service operations.

Example:
    ```python
    from qwire.dispatch import DISPATCH

    report = DISPATCH.reports.run_experiment(11, RunMode.IDEAL, settings).report
    frame = DISPATCH.classical.table1()
    ```
"""
