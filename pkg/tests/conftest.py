"""Shared fixtures: settings coarse enough for wavepacket tests to run in seconds."""

import pytest

from qwire.config import DeviceSettings, GridSettings, SimulationSettings
from qwire.wavesim.model import MaterialParams, SawPotential


@pytest.fixture
def material() -> MaterialParams:
    return MaterialParams()


@pytest.fixture
def saw() -> SawPotential:
    return SawPotential()


@pytest.fixture
def coarse_settings() -> SimulationSettings:
    """Device wavelength on a 2 nm grid."""
    return SimulationSettings(
        grid=GridSettings(spacing=2.0, points=128, dt=0.01, workers=2),
        device=DeviceSettings(),
    )


@pytest.fixture
def small_saw_settings() -> SimulationSettings:
    """Short-wavelength SAW so dense pair grids stay tiny."""
    return SimulationSettings(
        saw=SawPotential(amplitude=20.0, wavelength=40.0, velocity=3.3),
        grid=GridSettings(
            spacing=2.0,
            points=24,
            dt=0.01,
            dense_spacing=2.0,
            dense_points=24,
            rank_cap=24,
            truncation_tol=1e-10,
            workers=2,
        ),
        device=DeviceSettings(coupler_length=20.0, near_distance=5.0, far_distance=40.0),
    )


@pytest.fixture
def device_settings() -> SimulationSettings:
    """Default grid with the default device layout."""
    return SimulationSettings(device=DeviceSettings())
