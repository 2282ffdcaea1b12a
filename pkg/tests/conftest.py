"""
Shared fixtures: seeded random generators and far-field array scenarios.
"""

from __future__ import annotations

import numpy as np
import pytest

import config
from physics.binding_model import ArrayScenario, ChainLayout, chain_scenario
from physics.particle_optics import ParticleSpec
from physics.tweezer_array import TweezerSpec

WAVELENGTH = 1064e-9
WAIST = 1e-6


def sphere(radius: float = 100e-9, permittivity: float = 2.1, density: float = 1850.0) -> ParticleSpec:
    return ParticleSpec.sphere(radius, permittivity, density=density)


def tweezer(x: float = 0.0, y: float = 0.0, amplitude: float = 3e7, phase: float = 0.0,
            polarization: float = np.pi / 2) -> TweezerSpec:
    return TweezerSpec((x, y), WAIST, WAVELENGTH, amplitude, phase, polarization)


def random_scenario(rng: np.random.Generator, N: int, gas_damping: float = 1e3) -> ArrayScenario:
    """N random spheres on well-separated random foci in the focal plane."""
    foci: list[np.ndarray] = []
    while len(foci) < N:
        candidate = rng.uniform(-40e-6, 40e-6, size=2)
        if all(np.linalg.norm(candidate - f) > 6.5e-6 for f in foci):
            foci.append(candidate)
    particles = [sphere(rng.uniform(50e-9, 150e-9), rng.uniform(1.5, 4.0), rng.uniform(1800.0, 2700.0))
                 for _ in range(N)]
    tweezers = [tweezer(f[0], f[1], rng.uniform(1e7, 5e7), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi))
                for f in foci]
    return ArrayScenario(tuple(particles), tuple(tweezers), gas_damping=gas_damping)


def pair_scenario(d: float, phase1: float = 0.0, phase2: float = 0.0, pol1: float = np.pi / 2,
                  pol2: float = np.pi / 2, **kwargs) -> ArrayScenario:
    return ArrayScenario((sphere(), sphere()), (tweezer(0.0, 0.0, phase=phase1, polarization=pol1),
                                                tweezer(d, 0.0, phase=phase2, polarization=pol2)), **kwargs)


def chain(N: int, n: int = 5, **kwargs) -> ArrayScenario:
    return chain_scenario([sphere()], tweezer(), ChainLayout(N, n), **kwargs)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(config.DEFAULT_SEED)


@pytest.fixture
def single() -> ArrayScenario:
    return ArrayScenario((sphere(),), (tweezer(),), gas_damping=1e3)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Redirect run directories into a temporary folder."""
    monkeypatch.setattr(config, "OUTPUT_DIR", tmp_path / "runs")
    return tmp_path / "runs"
