from pathlib import Path

import numpy as np
import pytest

from errors import InstabilityError, NumericalError, ScenarioError
from physics.binding_model import binding_matrices
from physics.linear_dynamics import (MARGINAL, STABLE, UNSTABLE, LinearModel, build_linear_model,
                                     default_time_step, ensemble_covariance, lyapunov_residual, mechanical_energy,
                                     phonon_occupations, relative_covariance_error, simulate_trajectories,
                                     stability_scan, stability_spectrum, steady_state_covariance)
from tools.scenario_loader import parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _oscillator(omega=1.0, gamma=0.0, mass=1.0, noise=None, hbar=1.0):
    return LinearModel.from_stiffness([[mass * omega**2]], [mass], gamma,
                                      None if noise is None else [[noise]], hbar=hbar)


def _three_particles(gamma_fraction=0.1):
    scenario = parse_scenario(SCENARIOS / "three_particles.json")
    omega = binding_matrices(scenario).omega.max()
    scenario = scenario.with_changes(gas_damping=gamma_fraction * omega)
    return scenario, build_linear_model(scenario, binding_matrices(scenario))


# ── Model assembly ──────────────────────────────────────────────────────────

def test_build_linear_model_when_single_particle_should_have_canonical_blocks(single):
    matrices = binding_matrices(single)
    model = build_linear_model(single, matrices)
    m = single.masses[0]
    assert model.A[0, 1] == pytest.approx(1 / m)
    assert model.A[1, 0] == pytest.approx(-m * matrices.omega[0] ** 2)
    assert model.A[1, 1] == -single.gas_damping
    assert model.A[0, 0] == 0 and np.all(model.noise[0, :] == 0)
    assert model.noise[1, 1] == pytest.approx(2 * matrices.D[0, 0].real)
    assert model.offsets[0] > 0 and model.offsets[1] == 0


def test_build_linear_model_when_thermal_noise_should_add_gas_term(single):
    warm = single.with_changes(gas_temperature=300.0)
    matrices = binding_matrices(warm)
    cold = build_linear_model(warm, matrices, thermal=False)
    hot = build_linear_model(warm, matrices, thermal=True)
    extra = 2 * warm.masses[0] * warm.gas_damping * warm.constants.k_B * 300.0
    assert hot.noise[1, 1] - cold.noise[1, 1] == pytest.approx(extra, rel=1e-12)


def test_build_linear_model_when_thermal_without_temperature_should_raise(single):
    with pytest.raises(ScenarioError):
        build_linear_model(single, binding_matrices(single), thermal=True)


def test_build_linear_model_when_matrices_from_other_scenario_should_raise(single):
    other = binding_matrices(parse_scenario(SCENARIOS / "three_particles.json"))
    with pytest.raises(ScenarioError):
        build_linear_model(single, other)


def test_from_stiffness_when_shape_mismatch_should_raise():
    with pytest.raises(ScenarioError):
        LinearModel.from_stiffness(np.eye(2), [1.0], 0.1)


# ── Stability ───────────────────────────────────────────────────────────────

def test_stability_spectrum_when_undamped_oscillator_should_be_marginal_at_plus_minus_i_omega():
    report = stability_spectrum(_oscillator(omega=3.0))
    assert report.classification == MARGINAL
    assert np.allclose(np.sort(report.eigenvalues.imag), [-3.0, 3.0])


def test_stability_spectrum_when_damped_oscillator_should_match_closed_form():
    omega, gamma = 5.0, 0.4
    report = stability_spectrum(_oscillator(omega=omega, gamma=gamma))
    expected = -gamma / 2 + 1j * np.sqrt(omega**2 - gamma**2 / 4)
    assert report.is_stable
    assert np.any(np.isclose(report.eigenvalues, expected, rtol=1e-12))


def test_stability_spectrum_when_symmetric_coupling_should_shift_by_half_damping():
    stiffness = np.array([[4.0, -0.5, -0.2], [-0.5, 5.0, -0.3], [-0.2, -0.3, 6.0]])
    free = stability_spectrum(LinearModel.from_stiffness(stiffness, [1.0, 1.0, 1.0], 0.0))
    damped = stability_spectrum(LinearModel.from_stiffness(stiffness, [1.0, 1.0, 1.0], 0.2))
    assert free.classification == MARGINAL
    assert np.allclose(free.eigenvalues.real, 0.0, atol=1e-12)
    assert np.allclose(damped.eigenvalues.real, -0.1, atol=1e-12)


def test_stability_spectrum_when_strong_nonreciprocal_coupling_should_be_unstable():
    stiffness = np.array([[1.0, -0.9], [0.9, 1.0]])
    report = stability_spectrum(LinearModel.from_stiffness(stiffness, [1.0, 1.0], 0.1))
    assert report.classification == UNSTABLE
    assert report.worst_eigenvalue.real == pytest.approx(report.max_real)


def test_stability_scan_when_antisymmetric_coupling_grows_should_find_threshold():
    stiffness = np.array([[1.0, -0.5], [0.5, 1.0]])
    model = LinearModel.from_stiffness(stiffness, [1.0, 1.0], 0.1)
    scan = stability_scan(model, np.linspace(0.0, 2.0, 41))
    assert scan.max_real[0] == pytest.approx(-0.05)
    # antisymmetric stiffness ±0.5f gives growth 0.25f − γ/2, zero at f = 0.2
    assert 0.2 <= scan.first_unstable <= 0.25


def test_stability_scan_when_coupling_is_triangular_should_never_destabilize():
    stiffness = np.array([[1.0, -0.8], [0.0, 1.0]])
    scan = stability_scan(LinearModel.from_stiffness(stiffness, [1.0, 1.0], 0.1), [0.0, 1.0, 10.0, 100.0])
    assert scan.first_unstable is None


# ── Steady state ────────────────────────────────────────────────────────────

def test_steady_state_covariance_when_single_particle_recoil_should_match_analytic():
    omega, gamma, mass, diffusion = 100.0, 0.5, 2.0, 3.0
    model = _oscillator(omega=omega, gamma=gamma, mass=mass, noise=2 * diffusion)
    sigma = steady_state_covariance(model)
    assert sigma[1, 1] == pytest.approx(diffusion / gamma, rel=1e-10)
    assert sigma[0, 0] == pytest.approx(diffusion / (gamma * mass**2 * omega**2), rel=1e-10)
    assert sigma[0, 1] == pytest.approx(0.0, abs=1e-10 * sigma[1, 1] / (mass * omega))
    assert lyapunov_residual(model, sigma) <= 1e-10


def test_steady_state_covariance_when_no_noise_should_vanish():
    assert np.all(steady_state_covariance(_oscillator(gamma=0.1)) == 0)


def test_steady_state_covariance_when_unstable_should_report_eigenvalue():
    model = LinearModel.from_stiffness(np.array([[1.0, -0.9], [0.9, 1.0]]), [1.0, 1.0], 0.1)
    with pytest.raises(InstabilityError) as info:
        steady_state_covariance(model)
    assert info.value.eigenvalue.real > 0


def test_steady_state_covariance_when_physical_scenario_should_solve_lyapunov():
    _, model = _three_particles()
    sigma = steady_state_covariance(model)
    assert np.allclose(sigma, sigma.T)
    assert np.linalg.eigvalsh(sigma / np.outer(*(2 * [model.zero_point_scales()]))).min() > 0
    assert lyapunov_residual(model, sigma) <= 1e-10


def test_phonon_occupations_when_single_particle_should_equal_heating_over_damping():
    omega, gamma, mass, diffusion, hbar = 100.0, 0.5, 2.0, 3.0, 1e-3
    model = _oscillator(omega=omega, gamma=gamma, mass=mass, noise=2 * diffusion, hbar=hbar)
    occupation = phonon_occupations(model, steady_state_covariance(model))[0]
    heating = diffusion / (mass * hbar * omega)
    assert occupation == pytest.approx(heating / gamma, rel=1e-10)


# ── Trajectories ────────────────────────────────────────────────────────────

def test_simulate_trajectories_when_same_seed_should_repeat_exactly():
    _, model = _three_particles()
    first = simulate_trajectories(model, steps=300, M=4, seed=11)
    second = simulate_trajectories(model, steps=300, M=4, seed=11)
    third = simulate_trajectories(model, steps=300, M=4, seed=12)
    assert np.array_equal(first.states, second.states)
    assert not np.array_equal(first.states, third.states)


def test_simulate_trajectories_when_threaded_should_match_serial_result():
    model = _oscillator(omega=1.0, gamma=0.1, noise=1.0)
    serial = simulate_trajectories(model, steps=50, M=600, seed=3)
    threaded = simulate_trajectories(model, steps=50, M=600, seed=3, workers=3)
    assert np.array_equal(serial.states, threaded.states)


def test_simulate_trajectories_when_explicit_and_noiseless_should_grow_energy_geometrically():
    omega = 2.0
    model = _oscillator(omega=omega)
    dt = default_time_step(model)
    ensemble = simulate_trajectories(model, dt=dt, steps=500, M=1, scheme="explicit", record_every=1,
                                     initial=[1.0, 0.0])
    energy = mechanical_energy(model, ensemble.states[0])
    expected = energy[0] * (1 + omega**2 * dt**2) ** np.arange(energy.size)
    assert np.allclose(energy, expected, rtol=1e-10)


def test_simulate_trajectories_when_semi_implicit_and_noiseless_should_bound_energy_error():
    omega = 2.0
    model = _oscillator(omega=omega)
    dt = default_time_step(model)
    ensemble = simulate_trajectories(model, dt=dt, steps=5000, M=1, scheme="semi_implicit", record_every=1,
                                     initial=[1.0, 0.0])
    energy = mechanical_energy(model, ensemble.states[0])
    assert np.max(np.abs(energy / energy[0] - 1)) <= omega * dt


def test_simulate_trajectories_when_scheme_not_given_should_run_explicit_euler_maruyama():
    model = _oscillator(omega=1.0, gamma=0.1, noise=1.0)
    default = simulate_trajectories(model, steps=200, M=3, seed=5)
    explicit = simulate_trajectories(model, steps=200, M=3, seed=5, scheme="explicit")
    semi = simulate_trajectories(model, steps=200, M=3, seed=5, scheme="semi_implicit")
    assert default.scheme == "explicit"
    assert np.array_equal(default.states, explicit.states)
    assert not np.array_equal(default.states, semi.states)


@pytest.mark.parametrize("kwargs", [{"scheme": "leapfrog", "steps": 10}, {}, {"steps": 0}, {"steps": 10, "M": 0}])
def test_simulate_trajectories_when_arguments_invalid_should_raise(kwargs):
    with pytest.raises(ScenarioError):
        simulate_trajectories(_oscillator(omega=1.0, gamma=0.1, noise=1.0), **kwargs)


def test_simulate_trajectories_when_step_too_large_should_raise():
    model = _oscillator(omega=1.0)
    with pytest.raises(ScenarioError):
        simulate_trajectories(model, dt=0.06 * 2 * np.pi, steps=10)


def test_simulate_trajectories_when_noise_not_psd_should_raise():
    model = LinearModel.from_stiffness(np.eye(2), [1.0, 1.0], 0.1, momentum_noise=[[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NumericalError):
        simulate_trajectories(model, steps=10, M=2)


def test_simulate_trajectories_when_t_end_given_should_derive_steps():
    model = _oscillator(omega=1.0, gamma=0.1, noise=1.0)
    ensemble = simulate_trajectories(model, dt=0.1, t_end=5.0, M=2, record_every=10)
    assert ensemble.steps == 50
    assert ensemble.times[-1] == pytest.approx(5.0)
    assert ensemble.states.shape == (2, 6, 2)


def test_simulate_trajectories_when_offsets_present_should_start_at_equilibrium(single):
    model = build_linear_model(single, binding_matrices(single))
    ensemble = simulate_trajectories(model, steps=10, M=2)
    assert np.allclose(ensemble.states[:, 0, :], model.offsets)


def test_ensemble_covariance_when_stationary_should_match_lyapunov_solution():
    scenario, model = _three_particles(gamma_fraction=0.1)
    gamma = scenario.gas_damping
    M = 2000
    t_end = 20 / gamma
    ensemble = simulate_trajectories(model, dt=0.01 * 2 * np.pi / model.omegas.max(), t_end=t_end, M=M,
                                     seed=7, scheme="semi_implicit")
    estimate = ensemble_covariance(ensemble, (t_end / 2, t_end))
    reference = steady_state_covariance(model)
    assert relative_covariance_error(estimate, reference) <= 5 / np.sqrt(M)


def test_ensemble_covariance_when_window_empty_should_raise():
    ensemble = simulate_trajectories(_oscillator(omega=1.0, gamma=0.1, noise=1.0), steps=10, M=1)
    with pytest.raises(ScenarioError):
        ensemble_covariance(ensemble, (100.0, 200.0))


def test_classification_constants_when_compared_should_be_distinct():
    assert len({STABLE, MARGINAL, UNSTABLE}) == 3
