"""Potential profiles evaluated on window grids.

Every function takes lab positions, so the same code serves the per-particle
orbitals and the pair grids.
"""

import numpy as np

from .model import BarrierSpec, CouplerSpec, MaterialParams, SawPotential, Window


def saw_potential(saw: SawPotential, lab: np.ndarray, t: float) -> np.ndarray:
    """SAW potential -A cos(k (y - v t) + phase_origin) (meV)."""
    return -saw.amplitude * np.cos(saw.wave_number * (lab - saw.velocity * t) + saw.phase_origin)


def barrier_potential(barrier: BarrierSpec, lab: np.ndarray) -> np.ndarray:
    """Rectangular barrier with hard edges (meV)."""
    inside = np.abs(lab - barrier.center) <= barrier.length / 2
    return np.where(inside, barrier.height, 0.0)


def screened_coulomb(material: MaterialParams, debye_k: float, separation: np.ndarray, distance: float) -> np.ndarray:
    """C exp(-k_D r) / r with r = sqrt(separation^2 + distance^2) (meV).

    ``distance`` is at least the near wire distance, so r never vanishes.
    """
    r = np.sqrt(separation**2 + distance**2)
    return material.coulomb_prefactor * np.exp(-debye_k * r) / r


def coupler_region(coupler: CouplerSpec, lab_a: np.ndarray, lab_b: np.ndarray) -> np.ndarray:
    """Pair grid points whose midpoint lies inside the coupling region."""
    midpoint = (lab_a[:, None] + lab_b[None, :]) / 2
    return (midpoint >= coupler.start) & (midpoint <= coupler.end)


class PairCoupling:
    """Time-dependent Coulomb term of one coupler on a shared pair window.

    Both particles ride the same window, so the separation grid is fixed and
    only the region mask moves with time.
    """

    def __init__(
        self, material: MaterialParams, coupler: CouplerSpec, window: Window, velocity: float, interacting: bool
    ) -> None:
        xi = window.coordinates()
        separation = xi[:, None] - xi[None, :]
        self.coupler = coupler
        self.window = window
        self.velocity = velocity
        self.interacting = interacting
        self.far = screened_coulomb(material, coupler.debye_k, separation, coupler.far_distance)
        self.near = screened_coulomb(material, coupler.debye_k, separation, coupler.near_distance)

    def __call__(self, t: float) -> np.ndarray:
        if not self.interacting:
            return self.far
        lab = self.window.lab_positions(self.velocity, t)
        return np.where(coupler_region(self.coupler, lab, lab), self.near, self.far)


def trap_potential(saw: SawPotential, window: Window, t: float) -> np.ndarray:
    """SAW potential on a window at time t; constant in the co-moving frame."""
    return saw_potential(saw, window.lab_positions(saw.velocity, t), t)


def trap_mask(saw: SawPotential, window: Window, t: float) -> np.ndarray:
    """Points within half a wavelength of the SAW minimum nearest the window center."""
    lab = window.lab_positions(saw.velocity, t)
    center = saw.minimum(float(lab[len(lab) // 2]), t)
    return np.abs(lab - center) <= saw.wavelength / 2
