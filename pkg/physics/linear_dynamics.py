"""
physics/linear_dynamics.py — Linear stochastic model of the axial motion

State vector x = (z₁ … z_N, p₁ … p_N) measured from the static equilibrium.

    ẋ = A x + noise,     ⟨noise noiseᵀ⟩ = Nmat δ(t − t′)

A carries ż = p/m and ṗ = −Kmat z − γ_g p; the momentum block of Nmat is
2·Re D, plus 2mγ_g k_B T when gas thermal noise is enabled. Numerical work
(eigenvalues, Lyapunov solve) is done in zero-point units z/z_zpf, p/p_zpf so
that the matrices are O(ω).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from config import (DEFAULT_SEED, DT_FRACTION, DT_MAX_FRACTION, MAX_RECORDED_SNAPSHOTS, PSD_TOLERANCE,
                    SIM_CHUNK)
from errors import InstabilityError, NumericalError, ScenarioError
from physics.binding_model import ArrayScenario, BindingMatrices, stiffness_matrix
from physics.tweezer_array import CODATA

STABLE, MARGINAL, UNSTABLE = "stable", "marginal", "unstable"
MEMBER_BLOCK = 256


@dataclass(frozen=True)
class LinearModel:
    A: np.ndarray
    noise: np.ndarray
    offsets: np.ndarray
    masses: np.ndarray
    omegas: np.ndarray
    gamma: float
    hbar: float = CODATA.hbar

    @property
    def N(self) -> int:
        return self.masses.size

    @property
    def stiffness(self) -> np.ndarray:
        return -self.A[self.N:, :self.N]

    @classmethod
    def from_stiffness(cls, stiffness: np.ndarray, masses, gamma: float,
                       momentum_noise: np.ndarray | None = None, forces=None,
                       hbar: float = CODATA.hbar) -> "LinearModel":
        """Assemble A and Nmat from a stiffness matrix Kmat (diagonal mω² + K, off-diagonal −C)."""
        stiffness = np.asarray(stiffness, dtype=float)
        masses = np.asarray(masses, dtype=float)
        n = masses.size
        if stiffness.shape != (n, n):
            raise ScenarioError(f"stiffness matrix {stiffness.shape} does not match {n} masses")
        drift = np.zeros((2 * n, 2 * n))
        drift[:n, n:] = np.diag(1.0 / masses)
        drift[n:, :n] = -stiffness
        drift[n:, n:] = -gamma * np.eye(n)
        noise = np.zeros((2 * n, 2 * n))
        if momentum_noise is not None:
            momentum_noise = np.asarray(momentum_noise, dtype=float)
            noise[n:, n:] = 0.5 * (momentum_noise + momentum_noise.T)
        offsets = np.zeros(2 * n)
        if forces is not None:
            offsets[:n] = np.linalg.solve(stiffness, np.asarray(forces, dtype=float))
        omegas = np.sqrt(np.clip(np.diag(stiffness) / masses, 0.0, None))
        return cls(drift, noise, offsets, masses, omegas, float(gamma), hbar)

    def zero_point_scales(self) -> np.ndarray:
        """(z_zpf …, p_zpf …) with ω from the stiffness diagonal (1 where ω = 0)."""
        omega = np.where(self.omegas > 0, self.omegas, 1.0)
        z_zpf = np.sqrt(self.hbar / (2.0 * self.masses * omega))
        p_zpf = np.sqrt(self.hbar * self.masses * omega / 2.0)
        return np.concatenate((z_zpf, p_zpf))

    def scaled(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Drift and noise in zero-point units, plus the scale vector."""
        scales = self.zero_point_scales()
        drift = self.A * scales[None, :] / scales[:, None]
        noise = self.noise / np.outer(scales, scales)
        return drift, noise, scales


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    max_real: float
    tolerance: float
    classification: str

    @property
    def is_stable(self) -> bool:
        return self.classification == STABLE

    @property
    def worst_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[np.argmax(self.eigenvalues.real)])


@dataclass(frozen=True)
class TrajectoryEnsemble:
    times: np.ndarray          # recorded times, shape (S_rec,)
    states: np.ndarray         # absolute states, shape (M, S_rec, 2N)
    dt: float
    steps: int
    seed: int
    scheme: str

    @property
    def M(self) -> int:
        return self.states.shape[0]

    def mean_path(self) -> np.ndarray:
        return self.states.mean(axis=0)

    def variance_path(self) -> np.ndarray:
        return self.states.var(axis=0)


@dataclass(frozen=True)
class ScanReport:
    factors: np.ndarray
    max_real: np.ndarray

    @property
    def first_unstable(self) -> float | None:
        hits = np.nonzero(self.max_real > 0)[0]
        return float(self.factors[hits[0]]) if hits.size else None


# ─── Model assembly ───────────────────────────────────────────────────────────

def build_linear_model(scenario: ArrayScenario, matrices: BindingMatrices,
                       thermal: bool | None = None) -> LinearModel:
    if matrices.N != scenario.N:
        raise ScenarioError(f"matrices are {matrices.N}×{matrices.N} but the scenario has {scenario.N} particles")
    momentum_noise = 2.0 * np.real(matrices.D)
    thermal = scenario.thermal_noise if thermal is None else thermal
    if thermal:
        if not scenario.gas_temperature:
            raise ScenarioError("thermal gas noise needs a temperature", field="gas.temperature")
        momentum_noise = momentum_noise + np.diag(
            2.0 * scenario.masses * scenario.gas_damping * scenario.constants.k_B * scenario.gas_temperature)
    model = LinearModel.from_stiffness(stiffness_matrix(scenario, matrices), scenario.masses,
                                       scenario.gas_damping, momentum_noise, matrices.F,
                                       scenario.constants.hbar)
    return model


def stability_spectrum(model: LinearModel) -> StabilityReport:
    drift, _, _ = model.scaled()
    eig = linalg.eigvals(drift)
    # eigenvalues are similarity-invariant; report them in 1/s
    max_real = float(np.max(eig.real))
    tol = 1e-12 * float(np.linalg.norm(drift, 2))
    if abs(max_real) <= tol:
        label = MARGINAL
    elif max_real < 0:
        label = STABLE
    else:
        label = UNSTABLE
    return StabilityReport(eig, max_real, tol, label)


def stability_scan(model: LinearModel, factors: Sequence[float]) -> ScanReport:
    """Scale the inter-particle part of the stiffness by each factor and track max Re λ."""
    base = model.stiffness
    diagonal = np.diag(model.masses * model.omegas**2)
    coupling_part = base - diagonal
    max_real = []
    for factor in factors:
        scaled = LinearModel.from_stiffness(diagonal + factor * coupling_part, model.masses, model.gamma,
                                            hbar=model.hbar)
        max_real.append(stability_spectrum(scaled).max_real)
    return ScanReport(np.asarray(factors, dtype=float), np.asarray(max_real))


def steady_state_covariance(model: LinearModel) -> np.ndarray:
    """Σ solving A Σ + Σ Aᵀ + Nmat = 0 (Bartels–Stewart)."""
    report = stability_spectrum(model)
    if not report.is_stable:
        raise InstabilityError(f"drift matrix is {report.classification}; no stationary state",
                               eigenvalue=report.worst_eigenvalue)
    drift, noise, scales = model.scaled()
    sigma = linalg.solve_continuous_lyapunov(drift, -noise)
    sigma = 0.5 * (sigma + sigma.T)
    return sigma * np.outer(scales, scales)


def lyapunov_residual(model: LinearModel, sigma: np.ndarray) -> float:
    drift, noise, scales = model.scaled()
    sig = sigma / np.outer(scales, scales)
    norm = np.linalg.norm(noise)
    residual = np.linalg.norm(drift @ sig + sig @ drift.T + noise)
    return float(residual / norm) if norm > 0 else float(residual)


def phonon_occupations(model: LinearModel, sigma: np.ndarray) -> np.ndarray:
    """Mean phonon number per particle from the energy stored in its (z, p) block."""
    n = model.N
    energy = np.diag(sigma)[n:] / (2.0 * model.masses) + 0.5 * model.masses * model.omegas**2 * np.diag(sigma)[:n]
    return energy / (model.hbar * model.omegas)


# ─── Trajectories ─────────────────────────────────────────────────────────────

def default_time_step(model: LinearModel) -> float:
    return DT_FRACTION * 2.0 * np.pi / float(np.max(model.omegas))


def _momentum_noise_factor(model: LinearModel) -> np.ndarray:
    n = model.N
    block = model.noise[n:, n:]
    eigval, eigvec = np.linalg.eigh(block)
    floor = -PSD_TOLERANCE * max(float(np.trace(block)), 0.0)
    if eigval.min(initial=0.0) < floor:
        raise NumericalError(f"noise matrix is not positive semidefinite (eigenvalue {eigval.min():.3e})")
    return eigvec * np.sqrt(np.clip(eigval, 0.0, None))


def _integrate_block(model: LinearModel, members: range, dt: float, steps: int, seed: int,
                     record_every: int, scheme: str, noise_factor: np.ndarray,
                     initial: np.ndarray) -> np.ndarray:
    n = model.N
    a_zz, a_zp = model.A[:n, :n], model.A[:n, n:]
    a_pz, a_pp = model.A[n:, :n], model.A[n:, n:]
    gens = [np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, m]))) for m in members]
    z = np.array(initial[:, :n], dtype=float)
    p = np.array(initial[:, n:], dtype=float)
    n_rec = steps // record_every + 1
    out = np.empty((len(members), n_rec, 2 * n))
    out[:, 0, :n], out[:, 0, n:] = z, p
    sqrt_dt = np.sqrt(dt)
    step = 0
    while step < steps:
        chunk = min(SIM_CHUNK, steps - step)
        draws = np.stack([g.standard_normal((chunk, n)) for g in gens]) @ noise_factor.T * sqrt_dt
        for s in range(chunk):
            kick = draws[:, s, :]
            if scheme == "semi_implicit":
                p = p + (z @ a_pz.T + p @ a_pp.T) * dt + kick
                z = z + (z @ a_zz.T + p @ a_zp.T) * dt
            else:
                z, p = (z + (z @ a_zz.T + p @ a_zp.T) * dt,
                        p + (z @ a_pz.T + p @ a_pp.T) * dt + kick)
            step += 1
            if step % record_every == 0:
                out[:, step // record_every, :n], out[:, step // record_every, n:] = z, p
    return out


def simulate_trajectories(model: LinearModel, dt: float | None = None, steps: int | None = None,
                          M: int = 100, seed: int = DEFAULT_SEED, *, t_end: float | None = None,
                          record_every: int | None = None, scheme: str = "explicit",
                          workers: int = 1, initial=None) -> TrajectoryEnsemble:
    """
    Euler–Maruyama ensemble of M members with Gaussian momentum kicks of
    covariance Nmat·dt. The default "explicit" scheme advances z and p from the
    old state; "semi_implicit" updates p first and uses the new p for z, which
    keeps the energy error bounded over long undamped runs.

    Member m draws from its own Philox stream seeded by (seed, m), so results
    do not depend on `workers`. `initial` is a deviation from equilibrium,
    shape (2N,) or (M, 2N); the default starts every member at equilibrium.
    """
    if scheme not in ("semi_implicit", "explicit"):
        raise ScenarioError(f"unknown scheme '{scheme}'", field="scheme")
    dt = default_time_step(model) if dt is None else float(dt)
    limit = DT_MAX_FRACTION * 2.0 * np.pi / float(np.max(model.omegas))
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ScenarioError(f"time step {dt:.3e} s outside (0, {limit:.3e}] s", field="dt")
    if steps is None:
        if t_end is None:
            raise ScenarioError("give steps or t_end", field="steps")
        steps = int(np.ceil(t_end / dt))
    if steps < 1 or M < 1:
        raise ScenarioError(f"steps ({steps}) and ensemble size ({M}) must be positive", field="steps")
    record_every = record_every or max(1, steps // MAX_RECORDED_SNAPSHOTS)
    noise_factor = _momentum_noise_factor(model)
    start = np.zeros((M, 2 * model.N)) if initial is None else np.broadcast_to(
        np.asarray(initial, dtype=float), (M, 2 * model.N))

    blocks = [range(lo, min(lo + MEMBER_BLOCK, M)) for lo in range(0, M, MEMBER_BLOCK)]

    def run(block: range) -> np.ndarray:
        return _integrate_block(model, block, dt, steps, seed, record_every, scheme, noise_factor,
                                start[block.start:block.stop])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(block) for block in blocks]
    states = np.concatenate(parts, axis=0) + model.offsets
    times = np.arange(states.shape[1]) * record_every * dt
    return TrajectoryEnsemble(times, states, dt, steps, seed, scheme)


def ensemble_covariance(ensemble: TrajectoryEnsemble, window: tuple[float, float]) -> np.ndarray:
    """Second moments about the mean, pooled over members and recorded times in [t0, t1]."""
    t0, t1 = window
    mask = (ensemble.times >= t0) & (ensemble.times <= t1)
    samples = ensemble.states[:, mask, :].reshape(-1, ensemble.states.shape[2])
    if samples.shape[0] < 2:
        raise ScenarioError(f"[{t0:.3e}, {t1:.3e}] s holds fewer than two samples", field="window")
    centred = samples - samples.mean(axis=0)
    cov = centred.T @ centred / (samples.shape[0] - 1)
    return 0.5 * (cov + cov.T)


def relative_covariance_error(estimate: np.ndarray, reference: np.ndarray) -> float:
    """Frobenius error after normalising each coordinate by its reference standard deviation."""
    std = np.sqrt(np.clip(np.diag(reference), 0.0, None))
    std = np.where(std > 0, std, 1.0)
    norm = np.outer(std, std)
    return float(np.linalg.norm((estimate - reference) / norm) / np.linalg.norm(reference / norm))


def mechanical_energy(model: LinearModel, states: np.ndarray) -> np.ndarray:
    """p²/2m + ½ zᵀ Kmat_sym z for states (…, 2N) measured from equilibrium."""
    n = model.N
    dev = states - model.offsets
    z, p = dev[..., :n], dev[..., n:]
    k_sym = 0.5 * (model.stiffness + model.stiffness.T)
    return np.sum(p**2 / (2.0 * model.masses), axis=-1) + 0.5 * np.einsum("...i,ij,...j->...", z, k_sym, z)
