"""
physics/tweezer_array.py — Gaussian tweezer geometry and trap parameters

Every tweezer propagates along +z with its focus in the z = 0 plane and a
linear polarization in the x–y plane, at angle `polarization_angle` from the
x axis. The complex focus amplitude is E_j = |E_j| e^{iφ_j} ê_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import constants as csts

from errors import ScenarioError
from physics.particle_optics import ParticleSpec


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants (CODATA values from scipy.constants unless overridden)."""
    epsilon_0: float = csts.epsilon_0
    c: float = csts.c
    hbar: float = csts.hbar
    k_B: float = csts.k

    @classmethod
    def with_overrides(cls, overrides: dict | None) -> "PhysicalConstants":
        if not overrides:
            return cls()
        unknown = set(overrides) - {"epsilon_0", "c", "hbar", "k_B"}
        if unknown:
            raise ScenarioError(f"unknown constants {sorted(unknown)}", field="constants")
        return cls(**{k: float(v) for k, v in overrides.items()})


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class TweezerSpec:
    focus: tuple[float, float, float]
    waist: float
    wavelength: float
    amplitude: float                     # |E_j| in V/m
    phase: float = 0.0                   # φ_j in rad
    polarization_angle: float = np.pi / 2
    rayleigh_range: float = field(init=False)

    def __post_init__(self) -> None:
        focus = tuple(float(x) for x in self.focus)
        if len(focus) == 2:
            focus = focus + (0.0,)
        if len(focus) != 3:
            raise ScenarioError(f"focus needs x and y, got {self.focus}", field="focus")
        if focus[2] != 0.0:
            raise ScenarioError("tweezer foci must lie in the z = 0 plane", field="focus")
        if not self.waist > 0:
            raise ScenarioError(f"waist must be positive, got {self.waist}", field="waist")
        if not self.wavelength > 0:
            raise ScenarioError(f"wavelength must be positive, got {self.wavelength}", field="wavelength")
        if self.amplitude < 0:
            raise ScenarioError("amplitude is a modulus and must be non-negative", field="amplitude")
        object.__setattr__(self, "focus", focus)
        object.__setattr__(self, "rayleigh_range", self.wavenumber * self.waist**2 / 2.0)

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def polarization(self) -> np.ndarray:
        a = self.polarization_angle
        return np.array([np.cos(a), np.sin(a), 0.0])

    @property
    def field_vector(self) -> np.ndarray:
        """Complex focus amplitude E_j = |E_j| e^{iφ_j} ê_j."""
        return self.amplitude * np.exp(1j * self.phase) * self.polarization

    def with_changes(self, **changes) -> "TweezerSpec":
        return replace(self, **changes)


def tweezer_envelope(r, spec: TweezerSpec) -> complex:
    """f_tw(r) = exp(−(x²+y²)/w²(1 + iz/z_R)) / (1 + iz/z_R), r relative to the focus."""
    x, y, z = np.asarray(r, dtype=float).reshape(3)
    q = 1.0 + 1j * z / spec.rayleigh_range
    return complex(np.exp(-(x * x + y * y) / (spec.waist**2 * q)) / q)


def laser_field(r, tweezers: Sequence[TweezerSpec]) -> np.ndarray:
    """E_L(r) = Σ_j E_j e^{ikz} f_tw(r − d_j)."""
    if not tweezers:
        raise ScenarioError("laser_field needs at least one tweezer")
    r = np.asarray(r, dtype=float).reshape(3)
    total = np.zeros(3, dtype=complex)
    for spec in tweezers:
        rel = r - np.asarray(spec.focus)
        total += spec.field_vector * np.exp(1j * spec.wavenumber * r[2]) * tweezer_envelope(rel, spec)
    return total


def local_wavenumber(k_l: float, rayleigh_range: float) -> float:
    """Gouy-reduced axial wavenumber k − 1/z_R near a focus."""
    if not rayleigh_range > 0:
        raise ScenarioError(f"Rayleigh range must be positive, got {rayleigh_range}")
    return k_l - 1.0 / rayleigh_range


def amplitude_from_power(power: float, waist: float, constants: PhysicalConstants = CODATA) -> float:
    """|E|² = 4P/(π ε₀ c w²) for a Gaussian beam."""
    return float(np.sqrt(4.0 * power / (np.pi * constants.epsilon_0 * constants.c * waist**2)))


def power_from_amplitude(amplitude: float, waist: float, constants: PhysicalConstants = CODATA) -> float:
    return float(amplitude**2 * np.pi * constants.epsilon_0 * constants.c * waist**2 / 4.0)


def _scalar_chi(chi_tilde) -> float:
    chi = np.asarray(chi_tilde, dtype=float)
    value = float(chi) if chi.ndim == 0 else float(np.trace(chi) / 3.0)
    if not value > 0:
        raise ScenarioError(f"susceptibility must be positive, got {value}")
    return value


def trap_frequency(particle: ParticleSpec, tweezer: TweezerSpec, chi_tilde,
                   constants: PhysicalConstants = CODATA) -> float:
    """ω_j = sqrt(ε₀ χ̃ V |E_j|² / (2 m z_R²)) in rad/s."""
    chi = _scalar_chi(chi_tilde)
    return float(np.sqrt(constants.epsilon_0 * chi * particle.volume * tweezer.amplitude**2
                         / (2.0 * particle.mass * tweezer.rayleigh_range**2)))


def amplitude_for_trap_frequency(particle: ParticleSpec, tweezer: TweezerSpec, chi_tilde,
                                 omega: float, constants: PhysicalConstants = CODATA) -> float:
    """Field modulus |E| for which trap_frequency returns `omega`."""
    chi = _scalar_chi(chi_tilde)
    return float(omega * tweezer.rayleigh_range
                 * np.sqrt(2.0 * particle.mass / (constants.epsilon_0 * chi * particle.volume)))
