"""Physical models and state containers of the wavepacket engine.

Units throughout are meV, nm and ps. Parameter models are Pydantic so they
slot into the settings tree; wavefunction containers are dataclasses over
numpy arrays.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator
from scipy import constants

_MEV = constants.e * 1e-3


class MaterialParams(BaseModel):
    """Host-material constants.

    Attributes:
        effective_mass: Effective mass in free-electron masses.
        rel_permittivity: Relative permittivity.
        coulomb_override: Replaces the derived Coulomb prefactor when set
            (0 switches the interaction off).
    """

    effective_mass: float = Field(default=0.067, gt=0)
    rel_permittivity: float = Field(default=12.9, gt=0)
    coulomb_override: Optional[float] = Field(default=None, ge=0)

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def hbar(self) -> float:
        """Reduced Planck constant (meV ps)."""
        return constants.hbar / _MEV / 1e-12

    @computed_field
    @property
    def kinetic_prefactor(self) -> float:
        """hbar^2 / 2m* (meV nm^2)."""
        joule_m2 = constants.hbar**2 / (2 * self.effective_mass * constants.m_e)
        return joule_m2 / _MEV * 1e18

    @computed_field
    @property
    def coulomb_prefactor(self) -> float:
        """e^2 / (4 pi eps0 eps_r) (meV nm)."""
        if self.coulomb_override is not None:
            return self.coulomb_override
        joule_m = constants.e**2 / (4 * math.pi * constants.epsilon_0 * self.rel_permittivity)
        return joule_m / _MEV * 1e9


class SawPotential(BaseModel):
    """Surface acoustic wave V(y, t) = -A cos(2 pi (y - v t) / lambda + phase_origin).

    Attributes:
        amplitude: A (meV).
        wavelength: lambda (nm).
        velocity: Sound velocity v (nm/ps).
        phase_origin: Phase of the wave at y = 0, t = 0 (rad).
    """

    amplitude: float = Field(default=20.0, ge=0)
    wavelength: float = Field(default=200.0, gt=0)
    velocity: float = Field(default=3.3, gt=0)
    phase_origin: float = 0.0

    model_config = ConfigDict(frozen=True)

    @property
    def wave_number(self) -> float:
        """2 pi / lambda (1/nm)."""
        return 2 * math.pi / self.wavelength

    @property
    def curvature(self) -> float:
        """Harmonic constant A (2 pi / lambda)^2 of a minimum (meV/nm^2)."""
        return self.amplitude * self.wave_number**2

    def minimum(self, near: float, t: float = 0.0) -> float:
        """Lab position of the minimum closest to ``near`` at time t."""
        base = self.velocity * t - self.phase_origin / self.wave_number
        return base + round((near - base) / self.wavelength) * self.wavelength


class BarrierSpec(BaseModel):
    """Rectangular barrier implementing a phase shifter.

    Attributes:
        height: Barrier height (meV).
        length: Barrier length (nm).
        wire: Wire carrying the barrier.
        center: Lab position of the barrier center (nm).
        qubit: Qubit whose wire holds the barrier.
    """

    height: float = Field(..., ge=0)
    length: float = Field(..., gt=0)
    wire: int = Field(..., ge=0, le=1)
    center: float
    qubit: str

    model_config = ConfigDict(frozen=True)


class CouplerSpec(BaseModel):
    """Region where two wires approach and the carriers interact.

    Attributes:
        region_length: Length of the coupling region (nm).
        near_distance: Distance of the interacting wires inside the region (nm).
        far_distance: Distance of every other wire pair (nm).
        debye_k: Debye screening wave vector (1/nm).
        center: Lab position of the region center (nm).
        pair: Ordered qubit pair (a, b).
        interacting_config: Wires (x_a, x_b) brought to ``near_distance``.
    """

    region_length: float = Field(..., gt=0)
    near_distance: float = Field(..., gt=0)
    far_distance: float = Field(default=200.0, gt=0)
    debye_k: float = Field(default=0.2, ge=0)
    center: float
    pair: tuple[str, str]
    interacting_config: tuple[int, int] = (0, 1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_geometry(self) -> "CouplerSpec":
        if self.near_distance >= self.far_distance:
            raise ValueError("near_distance must be smaller than far_distance")
        if self.pair[0] == self.pair[1]:
            raise ValueError("a coupler needs two distinct qubits")
        if any(w not in (0, 1) for w in self.interacting_config):
            raise ValueError("interacting_config holds wire indices 0 or 1")
        return self

    @property
    def start(self) -> float:
        return self.center - self.region_length / 2

    @property
    def end(self) -> float:
        return self.center + self.region_length / 2


class PotentialStack(BaseModel):
    """Every potential of a device: the SAW plus placed barriers and couplers.

    Attributes:
        saw: Surface acoustic wave.
        barriers: Phase-shifter barriers in gate order.
        couplers: Couplers in gate order.
    """

    saw: SawPotential = Field(default_factory=SawPotential)
    barriers: tuple[BarrierSpec, ...] = ()
    couplers: tuple[CouplerSpec, ...] = ()

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_couplers(self) -> "PotentialStack":
        for i, first in enumerate(self.couplers):
            for second in self.couplers[i + 1 :]:
                same_pair = set(first.pair) == set(second.pair)
                if same_pair and first.start < second.end and second.start < first.end:
                    raise ValueError(f"overlapping couplers on pair {first.pair}")
        return self


class Window(BaseModel):
    """Uniform per-particle grid riding with the SAW.

    Grid point i sits at lab position ``origin + v t + i * spacing``.

    Attributes:
        origin: Lab position of point 0 at t = 0 (nm).
        spacing: Grid spacing (nm).
        points: Number of grid points.
    """

    origin: float = 0.0
    spacing: float = Field(default=1.0, gt=0)
    points: int = Field(default=256, ge=8)

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def extent(self) -> float:
        """Length covered by the grid (nm)."""
        return self.spacing * self.points

    def coordinates(self) -> np.ndarray:
        """Window coordinates xi_i = i * spacing (nm)."""
        return np.arange(self.points) * self.spacing

    def lab_positions(self, velocity: float, t: float) -> np.ndarray:
        """Lab positions of the grid points at time t (nm)."""
        return self.origin + velocity * t + self.coordinates()


@dataclass(frozen=True)
class Term:
    """One product term: configuration amplitudes times per-particle orbitals.

    Attributes:
        amplitudes: Complex array of shape (2,)*k over wire configurations.
        factors: One orbital per particle, sampled on the window grid.
    """

    amplitudes: np.ndarray
    factors: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class SemiOneDState:
    """Multi-particle wavefunction Phi_X(Y) as a sum of product terms.

    Attributes:
        particles: Ordered qubit labels; axis order of every amplitude array.
        window: Grid shared by every particle.
        terms: Product terms; their sum is the wavefunction.
        time: Elapsed time since injection (ps).
    """

    particles: tuple[str, ...]
    window: Window
    terms: tuple[Term, ...]
    time: float = 0.0

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a state needs at least one term")

    @property
    def rank(self) -> int:
        """Number of product terms."""
        return len(self.terms)

    def advanced(self, terms: tuple[Term, ...], duration: float) -> "SemiOneDState":
        """Copy with new terms and the clock moved forward."""
        return replace(self, terms=tuple(terms), time=self.time + duration)


@dataclass(frozen=True)
class DenseState:
    """Full k-particle grid per configuration, used as a cross-check.

    Attributes:
        particles: Ordered qubit labels.
        window: Grid shared by every particle.
        components: Array of shape (2,)*k + (points,)*k.
        time: Elapsed time since injection (ps).
    """

    particles: tuple[str, ...]
    window: Window
    components: np.ndarray
    time: float = 0.0


@dataclass
class PropagationDiagnostics:
    """Solver bookkeeping accumulated over a run.

    Attributes:
        initial_norm: Norm at the start of the run.
        final_norm: Norm at the end of the run.
        truncation_weight: Largest relative weight discarded by one re-factorization.
        max_rank: Largest term count reached.
        steps: Crank-Nicolson steps taken.
        min_transmission: Smallest trapped fraction seen after a barrier.
    """

    initial_norm: float = 1.0
    final_norm: float = 1.0
    truncation_weight: float = 0.0
    max_rank: int = 1
    steps: int = 0
    min_transmission: float = 1.0

    @property
    def norm_drift(self) -> float:
        return abs(self.final_norm - self.initial_norm)
