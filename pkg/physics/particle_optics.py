"""
physics/particle_optics.py — Single-particle optical response

Depolarization tensors of homogeneous ellipsoids, the static susceptibility
tensor, the point-dipole polarizability and the radiation correction δχ.
Particle geometry is given by the full diameters ℓ₁, ℓ₂, ℓ₃ along the
principal axes; the volume is V = (π/6) ℓ₁ℓ₂ℓ₃.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.constants import epsilon_0
from scipy.stats import qmc

from config import DEPOL_ATOL, LARGE_PARTICLE_KL, QMC_LOG2_POINTS, QMC_REPLICATES, RADIATION_RTOL
from errors import AccuracyWarning, ScenarioError


@dataclass(frozen=True)
class ParticleSpec:
    """A homogeneous dielectric ellipsoid; diameters in metres, mass in kg."""
    diameters: tuple[float, float, float]
    permittivity: float
    mass: float

    def __post_init__(self) -> None:
        if len(self.diameters) != 3 or min(self.diameters) <= 0:
            raise ScenarioError(f"diameters must be three positive lengths, got {self.diameters}",
                                field="diameters")
        if not self.permittivity > 1:
            raise ScenarioError(f"relative permittivity must exceed 1, got {self.permittivity}",
                                field="permittivity")
        if not self.mass > 0:
            raise ScenarioError(f"mass must be positive, got {self.mass}", field="mass")
        object.__setattr__(self, "diameters", tuple(float(x) for x in self.diameters))

    @classmethod
    def sphere(cls, radius: float, permittivity: float, *, density: float | None = None,
               mass: float | None = None) -> "ParticleSpec":
        if (density is None) == (mass is None):
            raise ScenarioError("give exactly one of density or mass", field="density")
        if mass is None:
            mass = density * 4.0 / 3.0 * np.pi * radius**3
        return cls((2 * radius,) * 3, permittivity, mass)

    @property
    def volume(self) -> float:
        l1, l2, l3 = self.diameters
        return np.pi / 6.0 * l1 * l2 * l3

    @property
    def is_sphere(self) -> bool:
        return self.diameters[0] == self.diameters[1] == self.diameters[2]

    @property
    def radius(self) -> float:
        """Radius of a sphere; for ellipsoids the radius of the equal-volume sphere."""
        return float(np.cbrt(self.volume * 3.0 / (4.0 * np.pi)))


@dataclass(frozen=True)
class SusceptibilityTensors:
    chi: np.ndarray
    delta_chi: np.ndarray
    error_estimate: float = 0.0

    @property
    def chi_tilde(self) -> np.ndarray:
        return self.chi + self.delta_chi


@dataclass(frozen=True)
class RadiationCorrection:
    """δχ together with the sample-split error estimate (relative, Frobenius)."""
    tensor: np.ndarray
    relative_error: float
    points: int = 0
    method: str = "closed_form"
    converged: bool = field(default=True)


# ─── Depolarization ───────────────────────────────────────────────────────────

def _depolarization_eigenvalue(l1: float, l2: float, l3: float) -> float:
    # N₁ = (ℓ₁ℓ₂ℓ₃/2) ∫₀^∞ ds / sqrt((s+ℓ₁²)³(s+ℓ₂²)(s+ℓ₃²)),  s = ℓ₁² tan²θ
    a1, a2, a3 = l1 * l1, l2 * l2, l3 * l3

    def integrand(theta: float) -> float:
        t = np.tan(theta)
        s = a1 * t * t
        ds = 2.0 * a1 * t / np.cos(theta) ** 2
        return ds / np.sqrt((s + a1) ** 3 * (s + a2) * (s + a3))

    value, _ = integrate.quad(integrand, 0.0, np.pi / 2, epsabs=DEPOL_ATOL, epsrel=1e-13, limit=400)
    return 0.5 * l1 * l2 * l3 * value


def depolarization_tensor(diameters) -> np.ndarray:
    """Diagonal depolarization tensor in the principal frame; trace 1, eigenvalues in (0, 1)."""
    axes = np.asarray(diameters, dtype=float)
    if axes.shape != (3,) or np.any(axes <= 0):
        raise ScenarioError(f"diameters must be three positive lengths, got {diameters}",
                            field="diameters")
    if axes[0] == axes[1] == axes[2]:
        return np.eye(3) / 3.0
    axes = axes / axes.max()
    eig = [_depolarization_eigenvalue(axes[i], axes[(i + 1) % 3], axes[(i + 2) % 3]) for i in range(3)]
    return np.diag(eig)


def susceptibility(permittivity: float, depolarization: np.ndarray) -> np.ndarray:
    """χ_i = (ε − 1)/(1 + N_i(ε − 1)) for every principal axis i."""
    n_eig = np.diag(np.asarray(depolarization, dtype=float))
    eps_m1 = permittivity - 1.0
    return np.diag(eps_m1 / (1.0 + n_eig * eps_m1))


def sphere_susceptibility(permittivity: float) -> float:
    return 3.0 * (permittivity - 1.0) / (permittivity + 2.0)


def particle_susceptibility(particle: ParticleSpec) -> np.ndarray:
    if particle.is_sphere:
        return sphere_susceptibility(particle.permittivity) * np.eye(3)
    return susceptibility(particle.permittivity, depolarization_tensor(particle.diameters))


def polarizability(particle: ParticleSpec, chi) -> np.ndarray:
    """α = ε₀ V χ in C·m²/V; a scalar χ is promoted to χ·1."""
    chi = np.asarray(chi, dtype=float)
    if chi.ndim == 0:
        chi = chi * np.eye(3)
    return epsilon_0 * particle.volume * chi


# ─── Radiation correction ─────────────────────────────────────────────────────

def sphere_radiation_correction(chi: float, radius: float, k_l: float) -> float:
    """Closed form of δχ for a sphere: (4/15) χ² k² R²."""
    return 4.0 / 15.0 * chi**2 * k_l**2 * radius**2


def _ball_points(u: np.ndarray) -> np.ndarray:
    # map three unit-cube coordinates uniformly into the unit ball
    radius = np.cbrt(u[:, 0])
    cos_t = 1.0 - 2.0 * u[:, 1]
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    phi = 2.0 * np.pi * u[:, 2]
    return radius[:, None] * np.column_stack((sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t))


def _pair_kernel_mean(semi_axes: np.ndarray, offset: np.ndarray, sample: np.ndarray) -> np.ndarray:
    r1 = _ball_points(sample[:, :3]) * semi_axes + offset
    r2 = _ball_points(sample[:, 3:]) * semi_axes + offset
    u = r1 - r2
    dist = np.linalg.norm(u, axis=1)
    keep = dist > 0
    u, dist = u[keep], dist[keep]
    # (|u|² 1 + u⊗u)/|u|³ averaged over the sample
    outer = np.einsum("si,sj->ij", u / dist[:, None] ** 1.5, u / dist[:, None] ** 1.5)
    return (np.eye(3) * np.sum(1.0 / dist) + outer) / sample.shape[0]


def radiation_correction(
    particle: ParticleSpec,
    k_l: float,
    *,
    method: str = "auto",
    seed: int = 0,
    log2_points: int = QMC_LOG2_POINTS,
    replicates: int = QMC_REPLICATES,
    offset=(0.0, 0.0, 0.0),
) -> RadiationCorrection:
    """
    δχ = (k²/8πV) χ [∫∫ (|u|²1 + u⊗u)/|u|³ d³r d³r′] χ with u = r − r′.

    Spheres use the closed form unless method="qmc". Otherwise the six-dimensional
    integral is estimated by `replicates` independently scrambled Sobol sets of
    2**log2_points pairs; the spread of the replicate means is the error estimate.
    """
    if k_l * max(particle.diameters) > LARGE_PARTICLE_KL:
        warnings.warn(
            f"k·max(diameter) = {k_l * max(particle.diameters):.3g} exceeds {LARGE_PARTICLE_KL}; "
            "the point-dipole radiation correction is inaccurate",
            AccuracyWarning, stacklevel=2,
        )
    chi = particle_susceptibility(particle)
    if method == "auto":
        method = "closed_form" if particle.is_sphere else "qmc"
    if method == "closed_form":
        if not particle.is_sphere:
            raise ScenarioError("closed-form radiation correction applies to spheres only")
        value = sphere_radiation_correction(chi[0, 0], particle.diameters[0] / 2, k_l)
        return RadiationCorrection(value * np.eye(3), 0.0)
    if method != "qmc":
        raise ScenarioError(f"unknown radiation-correction method '{method}'")

    semi_axes = np.asarray(particle.diameters) / 2.0
    offset = np.asarray(offset, dtype=float)
    means = []
    for replicate in range(replicates):
        sobol = qmc.Sobol(d=6, scramble=True, seed=np.random.default_rng([seed, replicate]))
        means.append(_pair_kernel_mean(semi_axes, offset, sobol.random_base2(m=log2_points)))
    means = np.array(means)
    kernel = means.mean(axis=0)
    spread = means.std(axis=0, ddof=1) / np.sqrt(replicates)
    # ∫∫ = V² · mean; prefactor k²/(8πV) leaves k² V/(8π)
    integral = particle.volume * k_l**2 / (8.0 * np.pi) * kernel
    tensor = chi @ integral @ chi
    tensor = 0.5 * (tensor + tensor.T)
    rel_err = float(np.linalg.norm(spread) / np.linalg.norm(kernel))
    converged = rel_err <= RADIATION_RTOL
    if not converged:
        warnings.warn(
            f"radiation correction error estimate {rel_err:.2e} exceeds {RADIATION_RTOL:.0e}",
            AccuracyWarning, stacklevel=2,
        )
    return RadiationCorrection(tensor, rel_err, replicates * 2**log2_points, "qmc", converged)


def susceptibility_tensors(particle: ParticleSpec, k_l: float, **kwargs) -> SusceptibilityTensors:
    correction = radiation_correction(particle, k_l, **kwargs)
    return SusceptibilityTensors(particle_susceptibility(particle), correction.tensor,
                                 correction.relative_error)
