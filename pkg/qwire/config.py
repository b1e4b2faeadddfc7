"""Simulation configuration using Pydantic Settings.

This module provides validated configuration for the wavepacket engine, the
calibration sweeps and the device layout, with settings loaded from
environment variables, .env files or a JSON configuration file.
"""

import json
import math
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict

from qwire.wavesim.model import MaterialParams, SawPotential


class GridSettings(BaseModel):
    """Discretization and solver settings.

    Attributes:
        spacing: Grid resolution along the wires (nm).
        points: Points per particle window.
        dt: Crank-Nicolson time step (ps).
        rank_cap: Maximum Schmidt rank kept per pair after a coupler.
        truncation_tol: Largest relative weight discarded by re-factorization.
        dense_spacing: Grid resolution of the dense oracle (nm).
        dense_points: Points per particle window of the dense oracle.
        relaxed_injection: Inject the discrete trap ground state instead of
            the harmonic Gaussian.
        workers: Thread count for independent sweep points.
    """

    spacing: float = Field(default=1.0, gt=0, description="Grid spacing (nm)")
    points: int = Field(default=256, ge=8, description="Points per window")
    dt: float = Field(default=0.005, gt=0, description="Time step (ps)")
    rank_cap: int = Field(default=64, ge=1)
    truncation_tol: float = Field(default=1e-4, gt=0, lt=1)
    dense_spacing: float = Field(default=2.0, gt=0)
    dense_points: int = Field(default=112, ge=8)
    relaxed_injection: bool = True
    workers: int = Field(default=4, ge=1)


class DeviceSettings(BaseModel):
    """Gate geometry of the quantum-wire device.

    One geometry is shared by every phase shifter and every coupler of a
    network. ``phi`` and ``gamma`` are the calibrated phases those
    geometries produce; they drive detuned runs and the phase oracle.

    Attributes:
        barrier_height: Phase-shifter barrier height (meV).
        barrier_length: Phase-shifter barrier length (nm).
        coupler_length: Length of the coupling region (nm).
        near_distance: Inter-wire distance of the interacting wires (nm).
        far_distance: Inter-wire distance of every other wire pair (nm).
        debye_k: Debye screening wave vector (1/nm).
        phi: Calibrated phase-shifter phase (rad).
        gamma: Calibrated conditional phase (rad).
    """

    barrier_height: float = Field(default=2.82, ge=0)
    barrier_length: float = Field(default=8.0, gt=0)
    coupler_length: float = Field(default=150.0, gt=0)
    near_distance: float = Field(default=5.0, gt=0)
    far_distance: float = Field(default=200.0, gt=0)
    debye_k: float = Field(default=0.2, ge=0)
    phi: float = Field(default=0.92 * math.pi)
    gamma: float = Field(default=0.88 * math.pi)


class SimulationSettings(BaseSettings):
    """Top-level simulator settings.

    Validates and groups material constants, SAW parameters, grid settings
    and the optional device layout. Physical runs require ``device``.

    Attributes:
        material: Effective mass, permittivity and derived prefactors.
        saw: Surface acoustic wave parameters.
        grid: Discretization and solver settings.
        device: Gate geometry; None when no layout was configured.
    """

    material: MaterialParams = Field(default_factory=MaterialParams)
    saw: SawPotential = Field(default_factory=SawPotential)
    grid: GridSettings = Field(default_factory=GridSettings)
    device: Optional[DeviceSettings] = None

    model_config = SettingsConfigDict(
        env_prefix="QWIRE_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @computed_field
    @property
    def window_extent(self) -> float:
        """Length covered by one particle window.

        Returns:
            Window extent in nm.
        """
        return self.grid.spacing * self.grid.points


def load_settings(path: Optional[Path] = None) -> SimulationSettings:
    """Build settings, letting a JSON file override environment and defaults.

    Args:
        path: Optional JSON configuration file.

    Returns:
        Validated simulation settings.
    """
    if path is None:
        return SimulationSettings()
    overrides = json.loads(Path(path).read_text(encoding="utf-8"))
    return SimulationSettings(**overrides)

