import numpy as np
import pytest
from scipy.constants import epsilon_0

from errors import AccuracyWarning, ScenarioError
from physics.particle_optics import (ParticleSpec, depolarization_tensor, particle_susceptibility, polarizability,
                                     radiation_correction, sphere_radiation_correction, sphere_susceptibility,
                                     susceptibility, susceptibility_tensors)
from tests.conftest import sphere

K = 2 * np.pi / 1064e-9


def test_depolarization_tensor_when_sphere_should_be_one_third():
    assert np.allclose(depolarization_tensor([2e-7] * 3), np.eye(3) / 3, rtol=0, atol=1e-10)


def test_depolarization_tensor_when_random_ellipsoids_should_have_unit_trace(rng):
    for diameters in rng.uniform(0.05, 1.0, size=(1000, 3)):
        tensor = depolarization_tensor(diameters)
        assert abs(np.trace(tensor) - 1.0) <= 1e-10
        assert np.all((np.diag(tensor) > 0) & (np.diag(tensor) < 1))


def test_depolarization_tensor_when_prolate_spheroid_should_match_closed_form():
    tensor = depolarization_tensor([10.0, 1.0, 1.0])
    e = np.sqrt(1 - 1 / 100)
    expected = (1 - e**2) / e**3 * (np.arctanh(e) - e)
    assert tensor[0, 0] == pytest.approx(expected, rel=1e-8)
    assert tensor[1, 1] == pytest.approx(tensor[2, 2], rel=1e-10)


def test_depolarization_tensor_when_longest_axis_should_depolarize_least():
    eig = np.diag(depolarization_tensor([3.0, 2.0, 1.0]))
    assert eig[0] < eig[1] < eig[2]


def test_depolarization_tensor_when_axis_not_positive_should_raise():
    with pytest.raises(ScenarioError):
        depolarization_tensor([1.0, 0.0, 1.0])


@pytest.mark.parametrize("eps", [1.5, 2.1, 4.0, 11.7])
def test_sphere_susceptibility_when_isotropic_depolarization_should_match_clausius_mossotti(eps):
    chi = susceptibility(eps, np.eye(3) / 3)
    assert np.allclose(chi, 3 * (eps - 1) / (eps + 2) * np.eye(3), rtol=1e-12, atol=0)
    assert sphere_susceptibility(eps) == pytest.approx(3 * (eps - 1) / (eps + 2), rel=1e-12)


def test_particle_susceptibility_when_ellipsoid_should_be_largest_along_long_axis():
    particle = ParticleSpec((300e-9, 100e-9, 100e-9), 2.1, 1e-17)
    chi = np.diag(particle_susceptibility(particle))
    assert chi[0] > chi[1] == pytest.approx(chi[2])


def test_polarizability_when_scalar_chi_should_promote_to_tensor():
    particle = sphere()
    alpha = polarizability(particle, 0.8)
    assert alpha.shape == (3, 3)
    assert alpha[0, 0] == pytest.approx(epsilon_0 * particle.volume * 0.8, rel=1e-14)


def test_radiation_correction_when_sphere_should_use_closed_form():
    particle = sphere(100e-9, 2.1)
    result = radiation_correction(particle, K)
    chi = sphere_susceptibility(2.1)
    assert result.method == "closed_form"
    assert np.allclose(result.tensor, 4 / 15 * chi**2 * K**2 * (100e-9) ** 2 * np.eye(3), rtol=1e-14, atol=0)


@pytest.mark.filterwarnings("ignore::errors.AccuracyWarning")
def test_radiation_correction_when_sampled_for_sphere_should_agree_with_closed_form():
    particle = sphere(100e-9, 2.1)
    sampled = radiation_correction(particle, K, method="qmc", log2_points=14, replicates=8)
    exact = sphere_radiation_correction(sphere_susceptibility(2.1), 100e-9, K)
    assert sampled.method == "qmc"
    assert sampled.points == 8 * 2**14
    assert np.allclose(np.diag(sampled.tensor), exact, rtol=2e-2)
    assert sampled.relative_error < 2e-2


@pytest.mark.filterwarnings("ignore::errors.AccuracyWarning")
def test_radiation_correction_when_same_seed_should_be_reproducible():
    particle = ParticleSpec((240e-9, 160e-9, 120e-9), 2.1, 1e-17)
    first = radiation_correction(particle, K, log2_points=10, replicates=4, seed=3)
    second = radiation_correction(particle, K, log2_points=10, replicates=4, seed=3)
    assert np.array_equal(first.tensor, second.tensor)


@pytest.mark.filterwarnings("ignore::errors.AccuracyWarning")
def test_radiation_correction_when_offset_should_not_change_result():
    particle = ParticleSpec((240e-9, 160e-9, 120e-9), 2.1, 1e-17)
    centred = radiation_correction(particle, K, log2_points=10, replicates=4)
    shifted = radiation_correction(particle, K, log2_points=10, replicates=4, offset=(1e-6, -2e-6, 0.5e-6))
    assert np.allclose(centred.tensor, shifted.tensor, rtol=1e-9)


def test_radiation_correction_when_particle_is_large_should_warn():
    with pytest.warns(AccuracyWarning):
        radiation_correction(sphere(200e-9), K)


def test_radiation_correction_when_method_unknown_should_raise():
    with pytest.raises(ScenarioError):
        radiation_correction(sphere(), K, method="monte-carlo")


def test_susceptibility_tensors_when_sphere_should_add_correction():
    tensors = susceptibility_tensors(sphere(50e-9), K)
    assert np.allclose(tensors.chi_tilde, tensors.chi + tensors.delta_chi)
    assert tensors.error_estimate == 0.0


def test_particle_spec_when_sphere_with_density_should_compute_mass():
    particle = ParticleSpec.sphere(100e-9, 2.1, density=2000.0)
    assert particle.mass == pytest.approx(2000.0 * 4 / 3 * np.pi * 1e-21)
    assert particle.is_sphere and particle.radius == pytest.approx(100e-9)


@pytest.mark.parametrize("kwargs", [
    {"diameters": (1e-7, 1e-7), "permittivity": 2.1, "mass": 1e-18},
    {"diameters": (1e-7, 1e-7, 1e-7), "permittivity": 0.9, "mass": 1e-18},
    {"diameters": (1e-7, 1e-7, 1e-7), "permittivity": 2.1, "mass": 0.0},
])
def test_particle_spec_when_invalid_should_raise(kwargs):
    with pytest.raises(ScenarioError):
        ParticleSpec(**kwargs)
