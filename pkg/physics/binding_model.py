"""
physics/binding_model.py — Linearized optical binding between trapped spheres

Builds the matrices of the linear model for N spheres held at the foci of
N tweezers, keeping only the far-field (1/d) part of the dipole interaction:

    C   real coupling matrix, zero diagonal            (N/m)
    D   complex Hermitian momentum-diffusion matrix    (kg² m² / s³)
    K   spring renormalization, row sums of C          (N/m)
    F   static axial forces, positive along +z         (N)
    ω   trap frequencies including the radiation correction δχ

Focus fields enter as complex amplitudes E_j = |E_j| e^{iφ_j} ê_j.
Distinct particles contribute χ_j χ_j′ where a single sphere species would give χ².
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from config import (ANGULAR_RTOL, IDENTITY_RTOL, MIN_SPACING_KD, MIN_SPACING_WAISTS)
from errors import AccuracyWarning, GateOverrideWarning, NumericalError, ScenarioError
from physics.particle_optics import ParticleSpec, sphere_radiation_correction, sphere_susceptibility
from physics.tweezer_array import (CODATA, PhysicalConstants, TweezerSpec, local_wavenumber,
                                   trap_frequency)
from tools.sphere_quadrature import get_quadrature

UNIDIRECTIONAL_PHASE = np.pi / 4


@dataclass(frozen=True)
class ChainLayout:
    """Shorthand for an equidistant chain along x: d_next = (2πn + π/4)/k, φ_j = (j−1)π/4."""
    N: int
    n: int
    omega0_over_gamma: float | None = None
    g_over_gamma: float | None = None

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ScenarioError(f"chain needs N >= 1, got {self.N}", field="chain.N")
        if self.n < 0:
            raise ScenarioError(f"chain order n must be >= 0, got {self.n}", field="chain.n")

    def spacing(self, k_l: float) -> float:
        return (2.0 * np.pi * self.n + UNIDIRECTIONAL_PHASE) / k_l


@dataclass(frozen=True)
class ArrayScenario:
    particles: tuple[ParticleSpec, ...]
    tweezers: tuple[TweezerSpec, ...]
    gas_damping: float = 0.0
    gas_temperature: float | None = None
    thermal_noise: bool = False
    constants: PhysicalConstants = CODATA
    chain: ChainLayout | None = None
    force: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "tweezers", tuple(self.tweezers))
        if not self.particles:
            raise ScenarioError("scenario needs at least one particle", field="particles")
        if len(self.particles) != len(self.tweezers):
            raise ScenarioError(
                f"{len(self.particles)} particles but {len(self.tweezers)} tweezers", field="tweezers")
        if self.gas_damping < 0:
            raise ScenarioError("gas damping must be non-negative", field="gas.gamma")
        if self.thermal_noise and not self.gas_temperature:
            raise ScenarioError("thermal noise needs a gas temperature", field="gas.temperature")
        for j, particle in enumerate(self.particles):
            if not particle.is_sphere:
                raise ScenarioError("the array model requires spherical particles",
                                    field=f"particles.{j}.diameters")
        ref = self.tweezers[0]
        for j, spec in enumerate(self.tweezers[1:], start=1):
            if spec.wavelength != ref.wavelength or spec.waist != ref.waist:
                raise ScenarioError("all tweezers must share wavelength and waist",
                                    field=f"tweezers.{j}")
        self._check_spacing()

    def _check_spacing(self) -> None:
        dist = self.distances
        w, k_l = self.tweezers[0].waist, self.wavenumber
        for j in range(self.N):
            for jp in range(j + 1, self.N):
                d = dist[j, jp]
                if d == 0.0:
                    raise ScenarioError(f"tweezers {j} and {jp} share a focus", field=f"tweezers.{jp}.focus",
                                        gate="coincident")
                failures = []
                if d <= MIN_SPACING_WAISTS * w:
                    failures.append(("spacing_waist", f"d = {d / w:.3g} w <= {MIN_SPACING_WAISTS:g} w"))
                if k_l * d <= MIN_SPACING_KD:
                    failures.append(("spacing_kd", f"k d = {k_l * d:.4g} <= {MIN_SPACING_KD:.4g}"))
                for gate, message in failures:
                    text = f"tweezers {j},{jp}: {message}"
                    if not self.force:
                        raise ScenarioError(text + " (use --force to override)",
                                            field=f"tweezers.{jp}.focus", gate=gate)
                    warnings.warn(text, GateOverrideWarning, stacklevel=3)

    # ── Derived quantities ──────────────────────────────────────────────────

    @property
    def N(self) -> int:
        return len(self.particles)

    @property
    def wavenumber(self) -> float:
        return self.tweezers[0].wavenumber

    @property
    def rayleigh_range(self) -> float:
        return self.tweezers[0].rayleigh_range

    @property
    def local_wavenumber(self) -> float:
        return local_wavenumber(self.wavenumber, self.rayleigh_range)

    @property
    def positions(self) -> np.ndarray:
        return np.array([spec.focus for spec in self.tweezers])

    @property
    def distances(self) -> np.ndarray:
        pos = self.positions
        return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)

    @property
    def field_vectors(self) -> np.ndarray:
        return np.array([spec.field_vector for spec in self.tweezers])

    @property
    def volumes(self) -> np.ndarray:
        return np.array([p.volume for p in self.particles])

    @property
    def masses(self) -> np.ndarray:
        return np.array([p.mass for p in self.particles])

    @property
    def susceptibilities(self) -> np.ndarray:
        return np.array([sphere_susceptibility(p.permittivity) for p in self.particles])

    def with_changes(self, **changes) -> "ArrayScenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class BindingMatrices:
    C: np.ndarray
    D: np.ndarray
    K: np.ndarray
    F: np.ndarray
    omega: np.ndarray

    @property
    def N(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class IdentityReport:
    max_deviation: float
    tolerance: float
    scale: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


@dataclass(frozen=True)
class AngularDiffusionResult:
    D: np.ndarray
    error_estimate: float
    converged: bool = field(default=True)


# ─── Pair geometry ────────────────────────────────────────────────────────────

def _pair_terms(scenario: ArrayScenario) -> tuple[np.ndarray, np.ndarray]:
    """Distances d_jj′ (diagonal 1) and P_jj′ = E_j*·(1 − n⊗n)E_j′ (diagonal 0)."""
    pos = scenario.positions
    sep = pos[:, None, :] - pos[None, :, :]
    dist = np.linalg.norm(sep, axis=-1)
    np.fill_diagonal(dist, 1.0)
    if np.any(dist == 0.0):
        raise ScenarioError("coincident foci", gate="coincident")
    n = sep / dist[..., None]
    e = scenario.field_vectors
    e_conj = e.conj()
    along_left = np.einsum("ja,jka->jk", e_conj, n)
    along_right = np.einsum("jka,ka->jk", n, e)
    proj = e_conj @ e.T - along_left * along_right
    np.fill_diagonal(proj, 0.0)
    return dist, proj


def _pair_prefactor(scenario: ArrayScenario, dist: np.ndarray) -> np.ndarray:
    """ε₀ χ_jχ_j′ V_jV_j′ k² (k − 1/z_R)² / (8π d_jj′)."""
    chi_v = scenario.susceptibilities * scenario.volumes
    k_l, q = scenario.wavenumber, scenario.local_wavenumber
    return scenario.constants.epsilon_0 * np.outer(chi_v, chi_v) * k_l**2 * q**2 / (8.0 * np.pi * dist)


# ─── Matrices ─────────────────────────────────────────────────────────────────

def coupling_matrix(scenario: ArrayScenario) -> np.ndarray:
    dist, proj = _pair_terms(scenario)
    coupling = _pair_prefactor(scenario, dist) * np.real(np.exp(1j * scenario.wavenumber * dist) * proj)
    np.fill_diagonal(coupling, 0.0)
    return coupling


def recoil_diffusion(scenario: ArrayScenario) -> np.ndarray:
    """Diagonal recoil-heating part ħε₀χ²V²k³|E|²[5(k − 1/z_R)² + 2k²]/120π."""
    k_l, q = scenario.wavenumber, scenario.local_wavenumber
    chi_v = scenario.susceptibilities * scenario.volumes
    intensity = np.array([spec.amplitude**2 for spec in scenario.tweezers])
    consts = scenario.constants
    return consts.hbar * consts.epsilon_0 * chi_v**2 * k_l**3 * intensity * (5 * q**2 + 2 * k_l**2) / (120 * np.pi)


def diffusion_matrix(scenario: ArrayScenario) -> np.ndarray:
    dist, proj = _pair_terms(scenario)
    # off-diagonal: (ħ/2)·prefactor·sin(kd)·E_j′*·(1 − n⊗n)E_j
    diffusion = 0.5 * scenario.constants.hbar * _pair_prefactor(scenario, dist) \
        * np.sin(scenario.wavenumber * dist) * proj.T
    diffusion = diffusion.astype(complex)
    np.fill_diagonal(diffusion, recoil_diffusion(scenario))
    return diffusion


def structural_identity_check(C: np.ndarray, D: np.ndarray, hbar: float = CODATA.hbar,
                              tolerance: float = IDENTITY_RTOL) -> IdentityReport:
    """max |C_jj′ − C_j′j − (4/ħ) Im D_jj′| relative to max |C|."""
    residual = C - C.T - 4.0 / hbar * np.imag(D)
    scale = float(np.max(np.abs(C))) if C.size else 0.0
    if scale == 0.0:
        scale = max(float(np.max(np.abs(4.0 / hbar * np.imag(D)))) if D.size else 0.0, np.finfo(float).tiny)
    return IdentityReport(float(np.max(np.abs(residual))) / scale if residual.size else 0.0, tolerance, scale)


def static_forces(scenario: ArrayScenario) -> np.ndarray:
    """
    Axial radiation-pressure and binding forces at the foci (positive along +z):
    F_j = ε₀V_jk²(k − 1/z_R)/8π · [⅔ χ_j² V_j k |E_j|² + Σ χ_jχ_j′ V_j′/d · Im(e^{ikd} P_jj′)].
    """
    k_l, q = scenario.wavenumber, scenario.local_wavenumber
    chi, vol = scenario.susceptibilities, scenario.volumes
    intensity = np.array([spec.amplitude**2 for spec in scenario.tweezers])
    self_term = 2.0 / 3.0 * chi**2 * vol * k_l * intensity
    if scenario.N > 1:
        dist, proj = _pair_terms(scenario)
        pair = np.outer(chi, chi * vol) / dist * np.imag(np.exp(1j * k_l * dist) * proj)
        np.fill_diagonal(pair, 0.0)
        self_term = self_term + pair.sum(axis=1)
    return scenario.constants.epsilon_0 * vol * k_l**2 * q / (8.0 * np.pi) * self_term


def spring_renormalization(C: np.ndarray) -> np.ndarray:
    """K_j = Σ_{j′≠j} C_jj′."""
    C = np.asarray(C, dtype=float)
    return C.sum(axis=1) - np.diag(C)


def trap_frequencies(scenario: ArrayScenario) -> np.ndarray:
    k_l = scenario.wavenumber
    omegas = []
    for particle, spec in zip(scenario.particles, scenario.tweezers):
        chi = sphere_susceptibility(particle.permittivity)
        chi_tilde = chi + sphere_radiation_correction(chi, particle.radius, k_l)
        omegas.append(trap_frequency(particle, spec, chi_tilde, scenario.constants))
    return np.array(omegas)


def binding_matrices(scenario: ArrayScenario) -> BindingMatrices:
    C = coupling_matrix(scenario)
    return BindingMatrices(C=C, D=diffusion_matrix(scenario), K=spring_renormalization(C),
                           F=static_forces(scenario), omega=trap_frequencies(scenario))


def stiffness_matrix(scenario: ArrayScenario, matrices: BindingMatrices) -> np.ndarray:
    """Kmat with diagonal m_jω_j² + K_j and off-diagonal −C_jj′."""
    return np.diag(scenario.masses * matrices.omega**2 + matrices.K) - matrices.C


def equilibrium_displacements(scenario: ArrayScenario, matrices: BindingMatrices) -> np.ndarray:
    """Static axial offsets z̄ solving Kmat z̄ = F."""
    return np.linalg.solve(stiffness_matrix(scenario, matrices), matrices.F)


def recoil_heating_rates(scenario: ArrayScenario, matrices: BindingMatrices) -> np.ndarray:
    """Phonons per second Γ_j = D_jj / (m_j ħ ω_j)."""
    return np.real(np.diag(matrices.D)) / (scenario.masses * scenario.constants.hbar * matrices.omega)


# ─── Angular-integral oracle for D ────────────────────────────────────────────

def _angular_integral(quad, phase_vec: np.ndarray, k_l: float, q: float,
                      e_left: np.ndarray, e_right: np.ndarray) -> complex:
    """∫ dΩ e^{−ik n·R} (q − k n_z)² [E_left*·(1 − n⊗n)E_right]."""
    dirs, weights = quad.nodes()
    projected = np.vdot(e_left, e_right) - (dirs @ e_left.conj()) * (dirs @ e_right)
    recoil = (q - k_l * dirs[:, 2]) ** 2
    phase = np.exp(-1j * k_l * (dirs @ phase_vec))
    return complex(np.sum(weights * phase * recoil * projected))


def _leading_order(d: float, unit: np.ndarray, k_l: float, q: float, e_j: np.ndarray,
                   e_jp: np.ndarray, n_polar_extra: int) -> tuple[complex, float]:
    # R·I(R) sampled at R ≡ d mod 2π/k, extrapolated to 1/R → 0
    targets = [max(k_l * d, 200.0) * 2**i for i in range(4)]
    kr = np.array([k_l * d + 2 * np.pi * math.ceil(max(0.0, t - k_l * d) / (2 * np.pi)) for t in targets])
    samples = []
    for value in kr:
        quad = get_quadrature("gauss_product", n_polar=int(1.5 * value) + n_polar_extra, n_azimuth=16, axis=unit)
        samples.append(value / k_l * _angular_integral(quad, unit * value / k_l, k_l, q, e_jp, e_j))
    samples = np.array(samples)
    x = kr[0] / kr
    weights_all = np.linalg.solve(np.vander(x, 4, increasing=True).T, np.eye(4)[0])
    weights_tail = np.linalg.solve(np.vander(x[1:], 3, increasing=True).T, np.eye(3)[0])
    lead = complex(weights_all @ samples)
    alt = complex(weights_tail @ samples[1:])
    return lead, abs(lead - alt)


def diffusion_from_angular_integral(scenario: ArrayScenario, *, quadrature: str = "lebedev",
                                    tolerance: float = ANGULAR_RTOL) -> AngularDiffusionResult:
    """
    Rebuild D by integrating the z_j z_j′ coefficient of the scattering
    Lindblad operators over all directions and both polarizations:

        D_jj′ = ħ ε₀ k³ V_jV_j′ χ_jχ_j′ / 64π² · ∫ dΩ e^{−ik n·(d_j − d_j′)} (q − k n_z)² E_j′*·(1 − n⊗n)E_j

    Diagonal entries use `quadrature` ("lebedev" or "gauss_product"). Off-diagonal
    entries keep the leading 1/d order by extrapolating R·I(R) over distances
    shifted by whole wavelengths along the pair axis.
    """
    k_l, q = scenario.wavenumber, scenario.local_wavenumber
    consts = scenario.constants
    chi_v = scenario.susceptibilities * scenario.volumes
    fields = scenario.field_vectors
    pos = scenario.positions
    n_part = scenario.N
    result = np.zeros((n_part, n_part), dtype=complex)
    errors = np.zeros((n_part, n_part))

    fine = get_quadrature(quadrature) if quadrature == "lebedev" else get_quadrature(quadrature, n_polar=24, n_azimuth=24)
    coarse = get_quadrature("gauss_product", n_polar=8, n_azimuth=12)
    origin = np.zeros(3)
    for j in range(n_part):
        pref = consts.hbar * consts.epsilon_0 * k_l**3 * chi_v[j] ** 2 / (64 * np.pi**2)
        value = _angular_integral(fine, origin, k_l, q, fields[j], fields[j])
        check = _angular_integral(coarse, origin, k_l, q, fields[j], fields[j])
        result[j, j] = pref * value
        errors[j, j] = abs(pref * (value - check))

    for j in range(n_part):
        for jp in range(n_part):
            if j == jp:
                continue
            sep = pos[j] - pos[jp]
            d = float(np.linalg.norm(sep))
            pref = consts.hbar * consts.epsilon_0 * k_l**3 * chi_v[j] * chi_v[jp] / (64 * np.pi**2)
            lead, err = _leading_order(d, sep / d, k_l, q, fields[j], fields[jp], 64)
            result[j, jp] = pref * lead / d
            errors[j, jp] = pref * err / d

    scale = float(np.max(np.abs(result))) or 1.0
    estimate = float(np.max(errors)) / scale
    converged = estimate <= tolerance
    if not converged:
        warnings.warn(f"angular-integral error estimate {estimate:.2e} exceeds {tolerance:.0e}",
                      AccuracyWarning, stacklevel=2)
    return AngularDiffusionResult(result, estimate, converged)


# ─── Scenario constructors ────────────────────────────────────────────────────

def _admissible_order(k_l: float, waist: float) -> int:
    n = 0
    while True:
        d = (2 * np.pi * n + UNIDIRECTIONAL_PHASE) / k_l
        if d > MIN_SPACING_WAISTS * waist and k_l * d > MIN_SPACING_KD:
            return n
        n += 1


def unidirectional_pair_config(base: ArrayScenario, theta1: float = 0.0, theta2: float = 0.0,
                               n: int | None = None) -> ArrayScenario:
    """
    Two spheres on the x axis with k d = π/4 + 2πn and φ₁ − φ₂ = π/4, so that
    particle 2 exerts force on particle 1 (C₁₂ > 0) but not the reverse (C₂₁ = 0).
    Θ_j is the angle between polarization j and the normal of the pair axis.
    """
    particles = list(base.particles[:2]) if base.N >= 2 else [base.particles[0]] * 2
    templates = list(base.tweezers[:2]) if base.N >= 2 else [base.tweezers[0]] * 2
    k_l, waist = base.wavenumber, base.tweezers[0].waist
    minimal = _admissible_order(k_l, waist)
    if n is None:
        n = minimal
    elif n < minimal and not base.force:
        raise ScenarioError(f"order n = {n} violates the far-field gates; minimal admissible n is {minimal}",
                            field="n", gate="spacing", minimal_n=minimal)
    d = (2 * np.pi * n + UNIDIRECTIONAL_PHASE) / k_l
    tweezers = (
        templates[0].with_changes(focus=(0.0, 0.0), phase=UNIDIRECTIONAL_PHASE,
                                  polarization_angle=np.pi / 2 - theta1),
        templates[1].with_changes(focus=(d, 0.0), phase=0.0, polarization_angle=np.pi / 2 - theta2),
    )
    return base.with_changes(particles=tuple(particles), tweezers=tweezers, chain=None)


@dataclass(frozen=True)
class UnidirectionalNoise:
    """Pair diffusion D = local + cascaded, valid when one of C₁₂, C₂₁ vanishes."""
    local: np.ndarray       # real symmetric, correlated noise of the uncoupled pair
    cascaded: np.ndarray    # (ħ/4)[[|c|, ic], [−ic, |c|]], rank one
    coupling: float         # c = C₁₂ − C₂₁

    @property
    def total(self) -> np.ndarray:
        return self.local + self.cascaded


def unidirectional_noise_split(C: np.ndarray, D: np.ndarray, hbar: float = CODATA.hbar,
                               tolerance: float = IDENTITY_RTOL) -> UnidirectionalNoise:
    """
    Separates the pair diffusion matrix into the noise of two uncoupled
    particles, D_jj − ħ|c|/4 on the diagonal and Re D₁₂ between them, and
    the cascaded part that goes with one-way transport. The cascaded part
    takes the whole of Im D₁₂ = ħc/4, so the local part is real.
    """
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=complex)
    if C.shape != (2, 2) or D.shape != (2, 2):
        raise ScenarioError(f"noise split needs a pair, got C {C.shape} and D {D.shape}", field="C")
    forward, backward = abs(C[0, 1]), abs(C[1, 0])
    if max(forward, backward) == 0.0 or min(forward, backward) > tolerance * max(forward, backward):
        raise ScenarioError(f"coupling is not unidirectional: C₁₂ = {C[0, 1]:.4e}, C₂₁ = {C[1, 0]:.4e}",
                            field="C", gate="unidirectional")
    c = float(C[0, 1] - C[1, 0])
    quarter = hbar * c / 4.0
    cascaded = np.array([[abs(quarter), 1j * quarter], [-1j * quarter, abs(quarter)]])
    local = D - cascaded
    residual = float(np.max(np.abs(local.imag))) / abs(quarter)
    if residual > tolerance:
        raise NumericalError(f"Im D misses ħ(C − Cᵀ)/4 by {residual:.2e} relative", error_estimate=residual)
    local = local.real
    return UnidirectionalNoise(0.5 * (local + local.T), cascaded, c)


def chain_scenario(particles: Sequence[ParticleSpec], template: TweezerSpec, layout: ChainLayout,
                   **scenario_kwargs) -> ArrayScenario:
    """Equidistant chain on the x axis, focus j at (j−1)·d_next with phase (j−1)·π/4."""
    if len(particles) == 1:
        particles = list(particles) * layout.N
    if len(particles) != layout.N:
        raise ScenarioError(f"chain of {layout.N} needs 1 or {layout.N} particles, got {len(particles)}",
                            field="particles")
    spacing = layout.spacing(template.wavenumber)
    tweezers = tuple(
        template.with_changes(focus=(j * spacing, 0.0), phase=j * UNIDIRECTIONAL_PHASE)
        for j in range(layout.N)
    )
    return ArrayScenario(tuple(particles), tweezers, chain=layout, **scenario_kwargs)
