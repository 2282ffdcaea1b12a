import numpy as np
import pytest
from scipy import constants

from errors import ScenarioError
from physics.particle_optics import sphere_radiation_correction, sphere_susceptibility
from physics.tweezer_array import (CODATA, PhysicalConstants, TweezerSpec, amplitude_for_trap_frequency,
                                   amplitude_from_power, laser_field, local_wavenumber, power_from_amplitude,
                                   trap_frequency, tweezer_envelope)
from tests.conftest import WAIST, WAVELENGTH, sphere, tweezer


def test_tweezer_spec_when_created_should_derive_rayleigh_range_and_pad_focus():
    spec = tweezer(1e-6, 2e-6)
    assert spec.focus == (1e-6, 2e-6, 0.0)
    assert spec.rayleigh_range == pytest.approx(np.pi * WAIST**2 / WAVELENGTH, rel=1e-14)


def test_tweezer_spec_when_focus_out_of_plane_should_raise():
    with pytest.raises(ScenarioError):
        TweezerSpec((0.0, 0.0, 1e-6), WAIST, WAVELENGTH, 1e7)


@pytest.mark.parametrize("field,kwargs", [
    ("waist", {"waist": 0.0}),
    ("wavelength", {"wavelength": -1.0}),
    ("amplitude", {"amplitude": -1.0}),
])
def test_tweezer_spec_when_invalid_value_should_name_field(field, kwargs):
    base = dict(focus=(0.0, 0.0), waist=WAIST, wavelength=WAVELENGTH, amplitude=1e7)
    base.update(kwargs)
    with pytest.raises(ScenarioError) as info:
        TweezerSpec(**base)
    assert info.value.field == field


def test_field_vector_when_phase_and_angle_given_should_follow_convention():
    spec = tweezer(amplitude=2.0, phase=np.pi / 4, polarization=0.0)
    assert np.allclose(spec.field_vector, 2.0 * np.exp(1j * np.pi / 4) * np.array([1.0, 0.0, 0.0]))


def test_tweezer_envelope_when_at_focus_should_be_one():
    assert tweezer_envelope(np.zeros(3), tweezer()) == 1.0


def test_tweezer_envelope_when_on_axis_should_carry_gouy_factor():
    spec = tweezer()
    z = spec.rayleigh_range
    assert tweezer_envelope([0.0, 0.0, z], spec) == pytest.approx(1 / (1 + 1j))


def test_laser_field_when_at_single_focus_should_equal_focus_amplitude():
    spec = tweezer(3e-6, -1e-6, amplitude=1.5e7, phase=0.3)
    assert np.allclose(laser_field(spec.focus, [spec]), spec.field_vector)


def test_laser_field_when_foci_far_apart_should_be_dominated_by_local_tweezer():
    near, far = tweezer(0.0, 0.0), tweezer(20e-6, 0.0, phase=1.0)
    total = laser_field(near.focus, [near, far])
    assert np.allclose(total, near.field_vector, rtol=1e-12)


def test_laser_field_when_no_tweezers_should_raise():
    with pytest.raises(ScenarioError):
        laser_field(np.zeros(3), [])


def test_local_wavenumber_when_rayleigh_range_given_should_subtract_gouy_term():
    assert local_wavenumber(10.0, 0.5) == pytest.approx(8.0)
    with pytest.raises(ScenarioError):
        local_wavenumber(10.0, 0.0)


def test_amplitude_from_power_when_inverted_should_return_power():
    amplitude = amplitude_from_power(0.1, WAIST)
    assert power_from_amplitude(amplitude, WAIST) == pytest.approx(0.1, rel=1e-14)
    assert amplitude**2 == pytest.approx(4 * 0.1 / (np.pi * constants.epsilon_0 * constants.c * WAIST**2))


def test_trap_frequency_when_amplitude_chosen_for_target_should_reproduce_target():
    particle, spec = sphere(), tweezer()
    chi = sphere_susceptibility(particle.permittivity)
    chi_tilde = chi + sphere_radiation_correction(chi, particle.radius, spec.wavenumber)
    amplitude = amplitude_for_trap_frequency(particle, spec, chi_tilde, 2 * np.pi * 150e3)
    omega = trap_frequency(particle, spec.with_changes(amplitude=amplitude), chi_tilde)
    assert omega == pytest.approx(2 * np.pi * 150e3, rel=1e-12)


def test_trap_frequency_when_amplitude_doubles_should_double():
    particle, spec = sphere(), tweezer()
    low = trap_frequency(particle, spec, 0.8)
    high = trap_frequency(particle, spec.with_changes(amplitude=2 * spec.amplitude), 0.8)
    assert high == pytest.approx(2 * low, rel=1e-14)


def test_trap_frequency_when_susceptibility_not_positive_should_raise():
    with pytest.raises(ScenarioError):
        trap_frequency(sphere(), tweezer(), 0.0)


def test_physical_constants_when_overridden_should_keep_other_values():
    consts = PhysicalConstants.with_overrides({"hbar": 1.0})
    assert consts.hbar == 1.0 and consts.c == CODATA.c


def test_physical_constants_when_unknown_key_should_raise():
    with pytest.raises(ScenarioError):
        PhysicalConstants.with_overrides({"h": 6.6e-34})
