"""Pydantic models for calibration sweeps.

This module defines sweep grids and the results persisted after a sweep.
"""

import math
from typing import Any, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = "1.0"


class SweepAxis(BaseModel):
    """One swept parameter.

    Attributes:
        name: Parameter name, e.g. ``height``.
        minimum: First value, physical units.
        maximum: Last value, physical units.
        step: Increment, physical units.
    """

    name: str
    minimum: float
    maximum: float
    step: float = Field(..., gt=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_range(self) -> "SweepAxis":
        if not self.minimum < self.maximum:
            raise ValueError(f"{self.name}: minimum {self.minimum} must be below maximum {self.maximum}")
        return self

    def values(self) -> list[float]:
        """Grid values from minimum to maximum inclusive."""
        count = int(math.floor((self.maximum - self.minimum) / self.step + 1e-9)) + 1
        return [float(v) for v in np.round(self.minimum + self.step * np.arange(count), 12)]


class SweepGrid(BaseModel):
    """Grid of geometries evaluated against a target phase.

    Attributes:
        axes: One or two swept parameters.
        target: Target phase (rad).
        tolerance: When set, points whose phase error exceeds it are infeasible.
    """

    axes: tuple[SweepAxis, ...]
    target: float
    tolerance: Optional[float] = Field(default=None, gt=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("axes")
    @classmethod
    def _check_axes(cls, axes: tuple[SweepAxis, ...]) -> tuple[SweepAxis, ...]:
        if not 1 <= len(axes) <= 2:
            raise ValueError(f"a sweep varies one or two parameters, got {len(axes)}")
        names = [axis.name for axis in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate swept parameter in {names}")
        return axes

    @property
    def names(self) -> list[str]:
        return [axis.name for axis in self.axes]

    def psets(self) -> list[dict[str, float]]:
        """Every grid point as a parameter dict, first axis varying slowest."""
        points: list[dict[str, float]] = [{}]
        for axis in self.axes:
            points = [{**point, axis.name: value} for point in points for value in axis.values()]
        return points


class CalibrationResult(BaseModel):
    """Outcome of a calibration sweep.

    Attributes:
        schema_version: Format version of the persisted result.
        target: Target phase (rad).
        best: Parameters of the selected point.
        achieved_phase: Phase at the selected point, in (-pi, pi].
        phase_error: Wrapped distance from the target (rad).
        transmitted_norm: Trapped fraction at the selected point.
        table: Every sweep row, including infeasible ones.
    """

    schema_version: str = SCHEMA_VERSION
    target: float
    best: dict[str, float]
    achieved_phase: float = Field(..., gt=-math.pi, le=math.pi)
    phase_error: float = Field(..., ge=0)
    transmitted_norm: float = Field(..., ge=0, le=1)
    table: list[dict[str, Any]]

    def frame(self) -> pd.DataFrame:
        """Sweep table as a DataFrame."""
        return pd.DataFrame(self.table)
