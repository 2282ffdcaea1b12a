import numpy as np
import pytest

from config import RICHARDSON_RTOL
from errors import NumericalError, ScenarioError
from physics.binding_model import coupling_matrix, unidirectional_pair_config
from physics.classical_oracle import (ForceField, axial_force_gradient, classical_binding_force,
                                      conservative_potential, coupling_from_force_gradient)
from tests.conftest import pair_scenario, random_scenario

_STENCIL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))


def _numerical_gradient(potential, positions, h):
    grad = np.zeros_like(positions)
    for j in range(positions.shape[0]):
        for axis in range(3):
            total = 0.0
            for offset, weight in _STENCIL:
                shifted = positions.copy()
                shifted[j, axis] += offset * h
                total += weight * potential(shifted)
            grad[j, axis] = total / (12.0 * h)
    return grad


# ── Coupling oracle ─────────────────────────────────────────────────────────

def test_coupling_from_force_gradient_when_random_far_field_scenarios_should_match_closed_form(rng):
    for _ in range(20):
        scenario = random_scenario(rng, int(rng.integers(2, 4)))
        expected = coupling_matrix(scenario)
        estimate = coupling_from_force_gradient(scenario)
        assert np.max(np.abs(estimate - expected)) <= 1e-6 * np.max(np.abs(expected))


def test_coupling_from_force_gradient_when_pair_is_unidirectional_should_vanish_backwards():
    pair = unidirectional_pair_config(pair_scenario(10e-6))
    estimate = coupling_from_force_gradient(pair)
    assert estimate[0, 1] == pytest.approx(coupling_matrix(pair)[0, 1], rel=1e-6)
    assert abs(estimate[1, 0]) <= 1e-6 * abs(estimate[0, 1])


def test_coupling_from_force_gradient_when_single_particle_should_be_zero(single):
    assert np.array_equal(coupling_from_force_gradient(single), np.zeros((1, 1)))


def test_axial_force_gradient_when_converged_should_report_error_below_tolerance():
    estimate = axial_force_gradient(pair_scenario(7.3e-6))
    assert estimate.error_estimate <= RICHARDSON_RTOL
    assert estimate.halvings >= 1
    assert np.all(np.diag(estimate.C) == 0)


@pytest.mark.parametrize("kwargs", [{"green": "retarded"}, {"field": "plane"}])
def test_axial_force_gradient_when_model_unknown_should_raise(kwargs):
    with pytest.raises(ScenarioError):
        axial_force_gradient(pair_scenario(8e-6), **kwargs)


# ── Forces ──────────────────────────────────────────────────────────────────

def test_classical_binding_force_when_particles_overlap_should_raise():
    scenario = pair_scenario(8e-6)
    positions = np.array([[0.0, 0.0, 0.0], [150e-9, 0.0, 0.0]])
    with pytest.raises(ScenarioError) as info:
        classical_binding_force(positions, scenario)
    assert info.value.gate == "overlap"


def test_classical_binding_force_when_positions_have_wrong_shape_should_raise():
    with pytest.raises(ScenarioError):
        classical_binding_force(np.zeros((3, 3)), pair_scenario(8e-6))


def test_force_field_when_values_not_finite_should_raise():
    with pytest.raises(NumericalError):
        ForceField(np.zeros((1, 3)), np.array([[np.nan, 0.0, 0.0]]))


def test_classical_binding_force_when_identical_pair_at_foci_should_be_equal_and_opposite():
    scenario = pair_scenario(8e-6)
    field = classical_binding_force(scenario.positions, scenario, include_trap=False)
    assert abs(field.forces[0, 0]) > 0
    assert field.forces[0, 0] == pytest.approx(-field.forces[1, 0], rel=1e-8)


@pytest.mark.parametrize("green", ["full", "split"])
def test_classical_binding_force_when_conservative_should_be_minus_potential_gradient(green):
    scenario = pair_scenario(8e-6, phase2=0.4, pol2=1.2)
    positions = scenario.positions + np.array([[0.1e-6, 0.05e-6, 0.2e-6], [-0.08e-6, 0.02e-6, -0.1e-6]])
    field = classical_binding_force(positions, scenario, green=green, conservative_only=True, include_trap=False)
    gradient = _numerical_gradient(lambda p: conservative_potential(p, scenario, green=green),
                                   positions, 1e-3 / scenario.wavenumber)
    assert np.allclose(field.forces, -gradient, rtol=0, atol=1e-6 * np.max(np.abs(field.forces)))
