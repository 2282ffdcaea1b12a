"""
physics/response_analysis.py — Frequency response of coupled tweezer chains

The mechanical susceptibility is normalized so that a lone particle has
χ₁₁[ω₀] = 1:

    χ[ω] = { (i/ω₀γ_g) [ (ω² − iγ_gω) 𝟙 − S ] }⁻¹,    S = diag(Ω_j²) − C/m

For the equidistant chain Ω_j = ω₀ and
C_jj′ = (2mω₀g/|j−j′|) cos[k d_next |j−j′| − φ_next (j−j′)].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from config import GRID_HALF_WIDTH, GRID_POINTS, SPECTRUM_BLOCK
from errors import InstabilityError, NumericalError, ScenarioError, StabilityWarning
from physics.binding_model import (UNIDIRECTIONAL_PHASE, ArrayScenario, BindingMatrices, binding_matrices)
from physics.linear_dynamics import LinearModel, stability_spectrum
from physics.tweezer_array import CODATA


@dataclass(frozen=True)
class ChainSpec:
    """
    Equidistant chain in scaled form. `recoil_ratio` is D_jj/(ħmω₀g); the
    default follows from k d_next for an ideal focus (k − 1/z_R → k).
    """
    N: int
    omega0: float
    gamma: float
    g: float
    n: int = 1
    phi_next: float = UNIDIRECTIONAL_PHASE
    recoil_ratio: float | None = None
    mass: float = 1.0

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ScenarioError(f"chain needs N >= 1, got {self.N}", field="N")
        if not (self.omega0 > 0 and self.gamma > 0 and self.g >= 0):
            raise ScenarioError("chain needs ω₀ > 0, γ_g > 0 and g >= 0", field="chain")
        if self.recoil_ratio is None:
            object.__setattr__(self, "recoil_ratio", 14.0 / 15.0 * self.kd_next)

    @property
    def kd_next(self) -> float:
        return 2.0 * np.pi * self.n + UNIDIRECTIONAL_PHASE

    @classmethod
    def scaled(cls, N: int, omega0_over_gamma: float = 20.0, g_over_gamma: float = 1.0,
               gamma: float = 1.0, **kwargs) -> "ChainSpec":
        return cls(N, omega0_over_gamma * gamma, gamma, g_over_gamma * gamma, **kwargs)

    def with_N(self, N: int) -> "ChainSpec":
        return replace(self, N=N)


@dataclass(frozen=True)
class ResponseModel:
    stiffness: np.ndarray      # S per unit mass, 1/s²
    omega0: float
    gamma: float
    noise: np.ndarray          # 2·Re D per unit mass², 1/s³·m²
    masses: np.ndarray

    @property
    def N(self) -> int:
        return self.stiffness.shape[0]


@dataclass(frozen=True)
class SpectrumResult:
    omega: np.ndarray
    chi: np.ndarray            # shape (G, N, N)
    omega0: float
    gamma: float

    @property
    def forward(self) -> np.ndarray:
        return np.abs(self.chi[:, -1, 0]) ** 2

    @property
    def backward(self) -> np.ndarray:
        return np.abs(self.chi[:, 0, -1]) ** 2

    @property
    def single(self) -> np.ndarray:
        return single_particle_response(self.omega, self.omega0, self.gamma)


@dataclass(frozen=True)
class PeakGain:
    omega: float
    value: float


@dataclass(frozen=True)
class SNRReport:
    N_values: tuple[int, ...]
    signal_power: np.ndarray
    noise_power: np.ndarray
    stable: tuple[bool, ...]
    degenerate: bool = False
    reference: float = 1.0

    @property
    def ratio(self) -> np.ndarray:
        """Signal over noise power; inf where the noise vanishes, NaN for skipped chains."""
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = self.signal_power / self.noise_power
        return np.where(self.noise_power == 0, np.inf, ratio)

    @property
    def normalized(self) -> np.ndarray:
        """Ratio relative to a single particle with the same parameters."""
        return self.ratio / self.reference


@dataclass(frozen=True)
class BulkDispersionSums:
    kappa: float
    natural: np.ndarray        # Σ_{j≤J} 2gω₀ t_j in the natural order
    absolute: np.ndarray       # Σ_{j≤J} 2gω₀ (1/j + 1/2j)
    reordered: np.ndarray      # two terms with Re t ≥ 0, then one with Re t < 0
    natural_converges: bool

    def at(self, J: int, which: str = "natural") -> complex:
        return getattr(self, which)[J - 1]


# ─── Model construction ───────────────────────────────────────────────────────

def chain_coupling_matrix(chain: ChainSpec) -> np.ndarray:
    idx = np.arange(chain.N)
    delta = idx[:, None] - idx[None, :]
    dist = np.abs(delta).astype(float)
    np.fill_diagonal(dist, 1.0)
    coupling = 2.0 * chain.mass * chain.omega0 * chain.g / dist * np.cos(chain.kd_next * dist - chain.phi_next * delta)
    np.fill_diagonal(coupling, 0.0)
    return coupling


def chain_diffusion_matrix(chain: ChainSpec, hbar: float = CODATA.hbar) -> np.ndarray:
    """D_jj′ = ħmω₀g sin(k d_next|j−j′|) e^{iφ_next(j−j′)}/|j−j′|, diagonal ħmω₀g·recoil_ratio."""
    idx = np.arange(chain.N)
    delta = idx[:, None] - idx[None, :]
    dist = np.abs(delta).astype(float)
    np.fill_diagonal(dist, 1.0)
    scale = hbar * chain.mass * chain.omega0 * chain.g
    diffusion = scale * np.sin(chain.kd_next * dist) * np.exp(1j * chain.phi_next * delta) / dist
    np.fill_diagonal(diffusion, scale * chain.recoil_ratio)
    return diffusion


def chain_from_scenario(scenario: ArrayScenario, matrices: BindingMatrices | None = None) -> ChainSpec:
    """
    Scaled chain parameters of a physical chain scenario. ω₀ is the RMS of the
    renormalized frequencies sqrt(ω_j² + K_j/m), g the nearest-neighbour
    coupling amplitude divided by 2mω₀.
    """
    layout = scenario.chain
    if layout is None:
        raise ScenarioError("scenario was not built from a chain layout", field="chain")
    if not scenario.gas_damping > 0:
        raise ScenarioError("chain response needs gas damping", field="gas.gamma")
    matrices = matrices or binding_matrices(scenario)
    mass = float(scenario.masses[0])
    omega0 = float(np.sqrt(np.mean(matrices.omega**2 + matrices.K / mass)))
    k_l, q = scenario.wavenumber, scenario.local_wavenumber
    chi_v = float(scenario.susceptibilities[0] * scenario.volumes[0])
    d_next = layout.spacing(k_l)
    amplitude = scenario.tweezers[0].amplitude
    nearest = scenario.constants.epsilon_0 * chi_v**2 * k_l**2 * q**2 * amplitude**2 / (8.0 * np.pi * d_next)
    g = nearest / (2.0 * mass * omega0)
    recoil = float(np.real(matrices.D[0, 0])) / (scenario.constants.hbar * mass * omega0 * g)
    return ChainSpec(scenario.N, omega0, scenario.gas_damping, g, n=layout.n, recoil_ratio=recoil, mass=mass)


def response_model(source: ChainSpec | ArrayScenario, matrices: BindingMatrices | None = None,
                   hbar: float = CODATA.hbar) -> ResponseModel:
    if isinstance(source, ChainSpec):
        masses = np.full(source.N, source.mass)
        coupling = chain_coupling_matrix(source)
        stiffness = source.omega0**2 * np.eye(source.N) - coupling / source.mass
        noise = 2.0 * np.real(chain_diffusion_matrix(source, hbar)) / source.mass**2
        return ResponseModel(stiffness, source.omega0, source.gamma, noise, masses)
    if not source.gas_damping > 0:
        raise ScenarioError("frequency response needs gas damping", field="gas.gamma")
    matrices = matrices or binding_matrices(source)
    masses = source.masses
    omega_sq = matrices.omega**2 + matrices.K / masses
    stiffness = np.diag(omega_sq) - matrices.C / masses[:, None]
    noise = 2.0 * np.real(matrices.D) / np.outer(masses, masses)
    return ResponseModel(stiffness, float(np.sqrt(np.mean(omega_sq))), source.gas_damping, noise, masses)


def _as_model(source, matrices=None) -> ResponseModel:
    return source if isinstance(source, ResponseModel) else response_model(source, matrices)


# ─── Susceptibility ───────────────────────────────────────────────────────────

def single_particle_response(omega, omega0: float, gamma: float) -> np.ndarray:
    """|χ_single[ω]|² = ω₀²γ²/((ω² − ω₀²)² + γ²ω²)."""
    omega = np.asarray(omega, dtype=float)
    return omega0**2 * gamma**2 / ((omega**2 - omega0**2) ** 2 + gamma**2 * omega**2)


def _inverse_block(model: ResponseModel, omega: np.ndarray) -> np.ndarray:
    eye = np.eye(model.N)
    scale = 1j / (model.omega0 * model.gamma)
    system = scale * ((omega**2 - 1j * model.gamma * omega)[:, None, None] * eye - model.stiffness)
    try:
        chi = np.linalg.inv(system)
    except np.linalg.LinAlgError:
        chi = None
    residual = np.inf if chi is None else float(np.max(np.abs(system @ chi - eye)))
    if residual > 1e-8:
        cond = float(np.max(np.linalg.cond(system)))
        raise NumericalError(f"susceptibility matrix is singular on the grid (residual {residual:.2e})",
                             condition_number=cond)
    return chi


def susceptibility_matrix(source, omega: float, matrices: BindingMatrices | None = None) -> np.ndarray:
    model = _as_model(source, matrices)
    return _inverse_block(model, np.array([float(omega)]))[0]


def default_grid(model_or_chain, points: int = GRID_POINTS) -> np.ndarray:
    """Grid over ω₀ ± 10γ_g·max(1, N g/γ_g); the lower edge is clipped at zero."""
    if isinstance(model_or_chain, ChainSpec):
        omega0, gamma = model_or_chain.omega0, model_or_chain.gamma
        spread = model_or_chain.N * model_or_chain.g / gamma
    else:
        model = _as_model(model_or_chain)
        omega0, gamma = model.omega0, model.gamma
        off = model.stiffness - np.diag(np.diag(model.stiffness))
        spread = float(np.max(np.abs(off).sum(axis=1))) / (2.0 * omega0 * gamma) if model.N > 1 else 0.0
    half = GRID_HALF_WIDTH * gamma * max(1.0, spread)
    return np.linspace(max(omega0 - half, 0.0), omega0 + half, points)


def amplification_sweep(source, omega_grid=None, matrices: BindingMatrices | None = None) -> SpectrumResult:
    model = _as_model(source, matrices)
    grid = default_grid(source if isinstance(source, ChainSpec) else model) if omega_grid is None \
        else np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ScenarioError("frequency grid must be strictly increasing with at least two points")
    chi = np.empty((grid.size, model.N, model.N), dtype=complex)
    for lo in range(0, grid.size, SPECTRUM_BLOCK):
        chi[lo:lo + SPECTRUM_BLOCK] = _inverse_block(model, grid[lo:lo + SPECTRUM_BLOCK])
    return SpectrumResult(grid, chi, model.omega0, model.gamma)


def peak_gain(spectrum: SpectrumResult, direction: str = "forward", source=None,
              candidates: int = 3) -> PeakGain:
    """
    Largest |χ_N1|² ("forward") or |χ_1N|² ("backward") on the grid. When the
    model is given, the best `candidates` local maxima are refined with a
    bounded scalar search between their grid neighbours.
    """
    if direction not in ("forward", "backward"):
        raise ScenarioError(f"direction must be 'forward' or 'backward', got '{direction}'")
    curve = spectrum.forward if direction == "forward" else spectrum.backward
    best = int(np.argmax(curve))
    peak = PeakGain(float(spectrum.omega[best]), float(curve[best]))
    if source is None:
        return peak
    model = _as_model(source)
    row, col = (-1, 0) if direction == "forward" else (0, -1)

    def negative_gain(w: float) -> float:
        return -abs(_inverse_block(model, np.array([w]))[0][row, col]) ** 2

    interior = np.nonzero((curve[1:-1] >= curve[:-2]) & (curve[1:-1] >= curve[2:]))[0] + 1
    for i in interior[np.argsort(curve[interior])[::-1][:candidates]]:
        res = optimize.minimize_scalar(negative_gain, bounds=(spectrum.omega[i - 1], spectrum.omega[i + 1]),
                                       method="bounded", options={"xatol": 1e-10 * spectrum.omega0})
        if -res.fun > peak.value:
            peak = PeakGain(float(res.x), float(-res.fun))
    return peak


# ─── Signal-to-recoil-noise ──────────────────────────────────────────────────

def _band_powers(model: ResponseModel, grid: np.ndarray, signal: float) -> tuple[float, float]:
    spectrum = amplification_sweep(model, grid)
    last_row = spectrum.chi[:, -1, :]
    signal_density = np.abs(last_row[:, 0]) ** 2 * signal**2
    noise_density = np.real(np.einsum("gj,jk,gk->g", last_row, model.noise, last_row.conj()))
    return (float(integrate.trapezoid(signal_density, grid)), float(integrate.trapezoid(noise_density, grid)))


def snr_analysis(chain: ChainSpec, signal: float = 1.0, N_values: Sequence[int] = (1, 5, 10, 20),
                 omega_grid=None, *, require_stable: bool = True, hbar: float = CODATA.hbar) -> SNRReport:
    """
    Signal power at the last particle for a white force of amplitude `signal`
    per unit mass on particle 1, against the recoil noise Σ χ_Nj 2Re D_jj′ χ*_Nj′
    reaching the same particle, both integrated over one common band. The
    ratio is normalized to the single-particle chain.

    An unstable chain has no steady-state response and raises InstabilityError.
    With require_stable=False it is skipped instead: a StabilityWarning is
    emitted and its powers are NaN.
    """
    N_values = tuple(int(n) for n in N_values)
    grid = default_grid(chain.with_N(max(N_values))) if omega_grid is None else np.asarray(omega_grid, float)
    signals, noises, stable = [], [], []
    for n_part in N_values:
        sub = chain.with_N(n_part)
        model = response_model(sub, hbar=hbar)
        report = stability_spectrum(LinearModel.from_stiffness(model.stiffness * sub.mass, model.masses,
                                                               sub.gamma, hbar=hbar))
        stable.append(report.is_stable)
        if not report.is_stable:
            if require_stable:
                raise InstabilityError(f"chain of {n_part} is {report.classification}",
                                       eigenvalue=report.worst_eigenvalue)
            warnings.warn(f"chain of {n_part} is {report.classification}; SNR not evaluated",
                          StabilityWarning, stacklevel=2)
            signals.append(np.nan)
            noises.append(np.nan)
            continue
        s, nz = _band_powers(model, grid, signal)
        signals.append(s)
        noises.append(nz)
    noises = np.asarray(noises)
    degenerate = bool(np.any(noises <= 0))
    single = response_model(chain.with_N(1), hbar=hbar)
    ref_signal, ref_noise = _band_powers(single, grid, signal)
    reference = ref_signal / ref_noise if ref_noise > 0 else np.inf
    return SNRReport(N_values, np.asarray(signals), noises, tuple(stable), degenerate, reference)


# ─── Bulk dispersion ──────────────────────────────────────────────────────────

def bulk_dispersion_partial_sums(kappa: float, omega0: float, g: float, J_max: int) -> BulkDispersionSums:
    """
    Partial sums of the infinite-chain dispersion correction
    2gω₀ Σ_{j≥1} [e^{−iκj}/j + (−1)^j e^{2iκj}/2j], with ω_κ² = ω₀² − (that sum).
    """
    if J_max < 1:
        raise ScenarioError(f"J_max must be at least 1, got {J_max}")
    j = np.arange(1, J_max + 1, dtype=float)
    scale = 2.0 * g * omega0
    terms = scale * (np.exp(-1j * kappa * j) / j + (-1.0) ** j * np.exp(2j * kappa * j) / (2.0 * j))
    natural = np.cumsum(terms)
    absolute = np.cumsum(scale * 1.5 / j)

    positive = np.nonzero(terms.real >= 0)[0]
    negative = np.nonzero(terms.real < 0)[0]
    order = []
    ip = ineg = 0
    while len(order) < J_max and (ip < positive.size or ineg < negative.size):
        for _ in range(2):
            if ip < positive.size:
                order.append(positive[ip])
                ip += 1
        if ineg < negative.size:
            order.append(negative[ineg])
            ineg += 1
    reordered = np.cumsum(terms[np.asarray(order[:J_max], dtype=int)])

    # either component degenerates to a harmonic series
    first = np.isclose(np.cos(kappa), 1.0, rtol=0.0, atol=1e-15)
    second = np.isclose(np.cos(2.0 * kappa + np.pi), 1.0, rtol=0.0, atol=1e-15)
    return BulkDispersionSums(float(kappa), natural, absolute, reordered, not (first or second))
