import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from qwire.calibrate import PhaseExtractionError
from qwire.calibrate.service import extracted_phases
from qwire.classical import NonCompiledInstanceError
from qwire.config import SimulationSettings, load_settings
from qwire.enums import OutcomeStatus, PropagationMode, ReportFormat, RunMode
from qwire.reports import InvariantCheckError, MissingLayoutError, ReportWriteError, RunReport
from qwire.reports.service import (
    INVARIANT_CHECKS,
    PROPAGATION_CHECKS,
    coarse_settings,
    dump_verify,
    emit,
    require_passed,
    run_experiment,
    run_shor15,
    verify,
    write_table,
)
from qwire.wavesim import MaterialParams


def _outcomes(report: RunReport) -> dict[str, float]:
    return {row.label: row.probability for row in report.outcomes}


class TestIdealRuns:
    def test_c11(self):
        report = run_shor15(11, RunMode.IDEAL, SimulationSettings())
        assert report.fidelity == pytest.approx(1.0, abs=1e-12)
        assert report.labels == ("x0", "y3", "y1")
        assert report.phi == report.gamma == math.pi
        assert _outcomes(report) == pytest.approx({"00": 0.5, "10": 0.5}, abs=1e-12)
        assert report.success_probability == pytest.approx(0.5, abs=1e-12)
        assert report.linear_entropy["x0"] == pytest.approx(1.0, abs=1e-12)
        assert report.propagation is None
        assert report.diagnostics is None

    def test_c2(self):
        report = run_shor15(2, RunMode.IDEAL, SimulationSettings())
        assert _outcomes(report) == pytest.approx({"00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25}, abs=1e-12)
        statuses = {row.label: row.result.status for row in report.outcomes}
        assert statuses["10"] is OutcomeStatus.TRIVIAL
        assert report.success_probability == pytest.approx(0.5, abs=1e-12)
        assert report.linear_entropy["x1,x0"] == pytest.approx(1.0, abs=1e-12)

    def test_density_trace_and_hermiticity(self):
        rho = run_shor15(2, RunMode.IDEAL, SimulationSettings()).density()
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(rho, rho.conj().T, atol=1e-12)

    def test_unknown_co_prime(self):
        with pytest.raises(NonCompiledInstanceError):
            run_shor15(7, RunMode.IDEAL, SimulationSettings())


class TestDetunedAndPhysical:
    def test_detuned_c11_below_one(self, device_settings):
        report = run_shor15(11, RunMode.DETUNED, device_settings)
        assert 0.9 < report.fidelity < 1.0
        assert report.phi == pytest.approx(0.92 * math.pi)

    def test_detuned_uses_default_phases_without_layout(self):
        report = run_shor15(11, RunMode.DETUNED, SimulationSettings())
        assert report.gamma == pytest.approx(0.88 * math.pi)

    def test_physical_needs_layout(self):
        with pytest.raises(MissingLayoutError):
            run_shor15(11, RunMode.PHYSICAL, SimulationSettings())

    @pytest.mark.parametrize("co_prime", [11, 2])
    def test_phase_oracle_uses_extracted_phases(self, small_saw_settings, co_prime):
        phi, gamma = extracted_phases(small_saw_settings)
        physical = run_shor15(co_prime, RunMode.PHYSICAL, small_saw_settings, PropagationMode.PHASE_ORACLE)
        assert (physical.phi, physical.gamma) == pytest.approx((phi, gamma), abs=1e-12)
        assert (phi, gamma) != (small_saw_settings.device.phi, small_saw_settings.device.gamma)
        device = small_saw_settings.device.model_copy(update={"phi": phi, "gamma": gamma})
        detuned = run_shor15(co_prime, RunMode.DETUNED, small_saw_settings.model_copy(update={"device": device}))
        assert np.allclose(physical.density(), detuned.density(), atol=1e-10)
        assert physical.propagation is PropagationMode.PHASE_ORACLE
        assert physical.diagnostics.norm_drift == pytest.approx(0.0, abs=1e-12)

    def test_phase_oracle_reports_failed_extraction(self, small_saw_settings):
        device = small_saw_settings.device.model_copy(update={"barrier_height": 200.0})
        settings = small_saw_settings.model_copy(update={"device": device})
        with pytest.raises(PhaseExtractionError):
            run_shor15(11, RunMode.PHYSICAL, settings, PropagationMode.PHASE_ORACLE)


class TestEmit:
    def test_json_is_reproducible(self, tmp_path):
        settings = SimulationSettings()
        first = emit(run_shor15(11, RunMode.IDEAL, settings), ReportFormat.JSON, tmp_path / "a")
        second = emit(run_shor15(11, RunMode.IDEAL, settings), ReportFormat.JSON, tmp_path / "b")
        assert first[0].name == "shor15_C11_ideal.json"
        assert first[0].read_bytes() == second[0].read_bytes()

    def test_json_round_trip(self, tmp_path):
        report = run_shor15(2, RunMode.IDEAL, SimulationSettings())
        (path,) = emit(report, ReportFormat.JSON, tmp_path)
        restored = RunReport.model_validate(json.loads(path.read_text()))
        assert restored.labels == report.labels
        assert np.allclose(restored.density(), report.density())
        assert restored.outcomes == report.outcomes

    def test_csv_bundle(self, tmp_path, small_saw_settings):
        experiment = run_experiment(2, RunMode.PHYSICAL, small_saw_settings, PropagationMode.PHASE_ORACLE)
        paths = emit(experiment.report, ReportFormat.CSV_BUNDLE, tmp_path, experiment.state)
        assert {path.name for path in paths} == {
            "report.json",
            "density_matrix.csv",
            "probabilities.csv",
            "outcomes.csv",
            "linear_entropy.csv",
            "positional_density_x1.csv",
            "positional_density_x0.csv",
        }
        bundle = tmp_path / "shor15_C2_physical"
        density = pd.read_csv(bundle / "density_matrix.csv")
        assert len(density) == 256
        outcomes = pd.read_csv(bundle / "outcomes.csv", dtype={"label": str})
        assert list(outcomes["label"]) == ["00", "01", "10", "11"]
        assert outcomes["probability"].sum() == pytest.approx(1.0, abs=1e-9)

    def test_unwritable_target(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        with pytest.raises(ReportWriteError):
            emit(run_shor15(11, RunMode.IDEAL, SimulationSettings()), ReportFormat.JSON, blocker)
        with pytest.raises(ReportWriteError):
            write_table(pd.DataFrame({"a": [1]}), blocker / "table.csv")


class TestRunReportModel:
    def test_probabilities_must_sum_to_one(self):
        report = run_shor15(11, RunMode.IDEAL, SimulationSettings())
        data = report.model_dump()
        data["probabilities"] = {key: value / 2 for key, value in data["probabilities"].items()}
        with pytest.raises(ValidationError):
            RunReport.model_validate(data)


class TestVerify:
    def test_logical_checks_pass(self, tmp_path):
        names = [name for name in INVARIANT_CHECKS if name not in PROPAGATION_CHECKS]
        report = verify(SimulationSettings(), names)
        assert [check.name for check in report.checks] == names
        assert report.passed, report.failed
        assert require_passed(report) is report
        path = dump_verify(report, tmp_path)
        assert json.loads(path.read_text())["checks"][0]["passed"] is True

    @pytest.mark.slow
    def test_propagation_checks_pass(self):
        report = verify(SimulationSettings(), list(PROPAGATION_CHECKS))
        assert report.passed, [(check.name, check.detail) for check in report.checks if not check.passed]

    def test_coarse_settings_keep_material(self):
        settings = SimulationSettings(material=MaterialParams(coulomb_override=0.0))
        coarse = coarse_settings(settings)
        assert coarse.material.coulomb_prefactor == 0.0
        assert coarse.saw.wavelength == 40.0
        assert coarse.window_extent >= coarse.saw.wavelength

    def test_phase_additivity_detects_a_broken_engine(self, monkeypatch):
        import qwire.reports.service as reports_service

        monkeypatch.setattr(reports_service, "barrier_phase", lambda height, length, settings: (0.3, 1.0))
        monkeypatch.setattr(reports_service, "barrier_sequence_phase", lambda barriers, settings: (0.0, 1.0))
        report = verify(SimulationSettings(), ["phase_additivity"])
        assert report.failed == ["phase_additivity"]

    def test_selected_checks(self):
        report = verify(SimulationSettings(), ["table1", "factor_rule"])
        assert [check.name for check in report.checks] == ["table1", "factor_rule"]

    def test_failed_check_raises(self, monkeypatch):
        monkeypatch.setitem(INVARIANT_CHECKS, "table1", lambda settings: (False, "forced"))
        report = verify(SimulationSettings(), ["table1", "unitarity"])
        assert report.failed == ["table1"]
        with pytest.raises(InvariantCheckError):
            require_passed(report)

    def test_raising_check_is_a_failure(self, monkeypatch):
        def broken(settings):
            raise RuntimeError("boom")

        monkeypatch.setitem(INVARIANT_CHECKS, "table1", broken)
        report = verify(SimulationSettings(), ["table1"])
        assert not report.passed
        assert "boom" in report.checks[0].detail


SHIPPED_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "calibrated_device.json"


@pytest.mark.slow
class TestShippedDeviceRuns:
    @pytest.fixture(scope="class")
    def settings(self):
        return load_settings(SHIPPED_CONFIG)

    @pytest.fixture(scope="class")
    def phases(self, settings):
        return extracted_phases(settings)

    @pytest.mark.parametrize("co_prime,outcome_probability", [(11, 0.5), (2, 0.25)])
    def test_rank_limited_run_follows_extracted_phases(self, settings, phases, co_prime, outcome_probability):
        physical = run_shor15(co_prime, RunMode.PHYSICAL, settings, PropagationMode.RANK_LIMITED)
        diagnostics = physical.diagnostics
        assert diagnostics.truncation_weight <= settings.grid.truncation_tol
        assert abs(diagnostics.norm_drift) < 1e-3
        assert diagnostics.min_transmission >= 0.99
        assert all(row.probability == pytest.approx(outcome_probability, abs=0.01) for row in physical.outcomes)

        phi, gamma = phases
        extracted = settings.model_copy(update={"device": settings.device.model_copy(update={"phi": phi, "gamma": gamma})})
        detuned = run_shor15(co_prime, RunMode.DETUNED, extracted)
        assert physical.fidelity == pytest.approx(detuned.fidelity, abs=0.03)
        for key, entropy in detuned.linear_entropy.items():
            assert physical.linear_entropy[key] == pytest.approx(entropy, abs=0.01)
