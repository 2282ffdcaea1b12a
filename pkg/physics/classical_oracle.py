"""
physics/classical_oracle.py — Classical dipole forces as an independent check of the linear model

Forces on N point dipoles α_j = ε₀V_jχ_j in the tweezer field E_L, without
multiple scattering:

    F_j = ∇_j (α_j/4)|E_L(r_j)|² + Σ_{j′≠j} (α_jα_j′/2ε₀) ∇_j Re[E_L*(r_j)·𝖦(r_j − r_j′)E_L(r_j′)]

where ∇_j acts on r_j only. Gradients are 4th-order central differences.
Two field models are available: "gaussian" sums every tweezer's focused
beam, "local" gives particle i only its own tweezer as a plane wave
E_i e^{i(k − 1/z_R)z} with the transverse Gaussian envelope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from config import FD_STEP_KR, FORCE_STEP_KR, RICHARDSON_MAX_HALVINGS, RICHARDSON_RTOL
from errors import ConvergenceError, NumericalError, ScenarioError
from physics.binding_model import ArrayScenario
from physics.em_kernels import far_field_green, green_full, green_static, green_transverse
from physics.tweezer_array import laser_field

_STENCIL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))   # / 12h
_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class ForceField:
    positions: np.ndarray      # (N, 3) m
    forces: np.ndarray         # (N, 3) N

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.forces)):
            raise NumericalError("force evaluation produced non-finite values")


@dataclass(frozen=True)
class CouplingEstimate:
    C: np.ndarray              # off-diagonal ∂F_j^z/∂z_j′, zero diagonal
    K: np.ndarray              # −∂F_j^z/∂z_j of the binding term
    error_estimate: float
    halvings: int


# ─── Building blocks ──────────────────────────────────────────────────────────

def _derivative(func: Callable[[np.ndarray], float], x: np.ndarray, direction: np.ndarray, h: float) -> float:
    total = sum(weight * func(x + offset * h * direction) for offset, weight in _STENCIL)
    # actual step after rounding x ± h
    h_eff = float(np.linalg.norm((x + h * direction) - (x - h * direction))) / 2.0
    return total / (12.0 * h_eff)


def _gradient(func: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    return np.array([_derivative(func, x, axis, h) for axis in np.eye(3)])


def _check_positions(positions, scenario: ArrayScenario) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    if pos.shape != (scenario.N, 3):
        raise ScenarioError(f"expected positions of shape ({scenario.N}, 3), got {pos.shape}", field="positions")
    radii = np.array([p.radius for p in scenario.particles])
    for j in range(scenario.N):
        for jp in range(j + 1, scenario.N):
            if np.linalg.norm(pos[j] - pos[jp]) <= radii[j] + radii[jp]:
                raise ScenarioError(f"particles {j} and {jp} overlap", field="positions", gate="overlap")
    return pos


def _field_model(scenario: ArrayScenario, mode: str) -> Callable[[int, np.ndarray], np.ndarray]:
    """Returns field(i, r): the laser field seen by particle i at r."""
    if mode == "gaussian":
        return lambda i, r: laser_field(r, scenario.tweezers)
    if mode != "local":
        raise ScenarioError(f"unknown field model '{mode}'; choose gaussian or local")
    q = scenario.local_wavenumber

    def local(i: int, r: np.ndarray) -> np.ndarray:
        spec = scenario.tweezers[i]
        rel = r - np.asarray(spec.focus)
        envelope = np.exp(-(rel[0] ** 2 + rel[1] ** 2) / spec.waist**2)
        return spec.field_vector * np.exp(1j * q * r[2]) * envelope

    return local


def _kernel(name: str, k_l: float) -> Callable[[np.ndarray], np.ndarray]:
    if name == "full":
        return lambda r: green_full(r, k_l)
    if name == "far_field":
        return lambda r: far_field_green(r, k_l)
    if name == "split":
        # Lamb-shift part plus electrostatic part; G₀ is real
        return lambda r: green_transverse(r, k_l) + green_static(r)
    raise ScenarioError(f"unknown Green tensor '{name}'; choose full, far_field or split")


def _polarizabilities(scenario: ArrayScenario) -> np.ndarray:
    return scenario.constants.epsilon_0 * scenario.volumes * scenario.susceptibilities


# ─── Forces and potential ─────────────────────────────────────────────────────

def classical_binding_force(positions, scenario: ArrayScenario, *, green: str = "full",
                            field: str = "gaussian", conservative_only: bool = False,
                            include_trap: bool = True, step: float | None = None) -> ForceField:
    """
    Gradient plus optical-binding force on every particle. With
    `conservative_only` the binding term uses Re 𝖦, which makes it the
    negative gradient of `conservative_potential`.
    """
    pos = _check_positions(positions, scenario)
    h = FORCE_STEP_KR / scenario.wavenumber if step is None else float(step)
    eps0 = scenario.constants.epsilon_0
    alpha = _polarizabilities(scenario)
    field_at = _field_model(scenario, field)
    kernel = _kernel(green, scenario.wavenumber)
    transform = np.real if conservative_only else (lambda g: g)

    forces = np.zeros_like(pos)
    for j in range(scenario.N):
        sources = [(jp, field_at(jp, pos[jp])) for jp in range(scenario.N) if jp != j]

        def binding(r: np.ndarray) -> float:
            here = field_at(j, r).conj()
            return sum(alpha[jp] * float(np.real(here @ transform(kernel(r - pos[jp])) @ e_src))
                       for jp, e_src in sources)

        if sources:
            forces[j] += alpha[j] / (2.0 * eps0) * _gradient(binding, pos[j], h)
        if include_trap:
            forces[j] += alpha[j] / 4.0 * _gradient(
                lambda r: float(np.sum(np.abs(field_at(j, r)) ** 2)), pos[j], h)
    return ForceField(pos, forces)


def conservative_potential(positions, scenario: ArrayScenario, *, green: str = "full",
                           field: str = "gaussian") -> float:
    """V_opt = −(ε₀/4) Σ_{j≠j′} V_jV_j′χ_jχ_j′ E_L*(r_j′)·Re𝖦(r_j − r_j′)·E_L(r_j), in joules."""
    pos = _check_positions(positions, scenario)
    field_at = _field_model(scenario, field)
    kernel = _kernel(green, scenario.wavenumber)
    chi_v = scenario.volumes * scenario.susceptibilities
    fields = [field_at(j, pos[j]) for j in range(scenario.N)]
    total = 0.0
    for j in range(scenario.N):
        for jp in range(scenario.N):
            if j != jp:
                value = fields[jp].conj() @ np.real(kernel(pos[j] - pos[jp])) @ fields[j]
                total += chi_v[j] * chi_v[jp] * float(np.real(value))
    return -scenario.constants.epsilon_0 / 4.0 * total


# ─── Coupling oracle ──────────────────────────────────────────────────────────

def _axial_binding_forces(scenario: ArrayScenario, z: np.ndarray, *, green: str, field: str,
                          freeze_green: bool, inner_step: float) -> np.ndarray:
    """F_j·e_z of the binding term with particle j displaced by z_j from its focus."""
    foci = scenario.positions
    pos = foci + z[:, None] * _Z
    alpha = _polarizabilities(scenario)
    eps0 = scenario.constants.epsilon_0
    field_at = _field_model(scenario, field)
    kernel = _kernel(green, scenario.wavenumber)
    out = np.zeros(scenario.N)
    for j in range(scenario.N):
        terms = []
        for jp in range(scenario.N):
            if jp == j:
                continue
            e_src = field_at(jp, pos[jp])
            frozen = kernel(foci[j] - foci[jp]) if freeze_green else None
            terms.append((jp, e_src, frozen))

        def binding(r: np.ndarray) -> float:
            here = field_at(j, r).conj()
            return sum(alpha[jp] * float(np.real(here @ (g if g is not None else kernel(r - pos[jp])) @ e_src))
                       for jp, e_src, g in terms)

        out[j] = alpha[j] / (2.0 * eps0) * _derivative(binding, pos[j], _Z, inner_step)
    return out


def axial_force_gradient(scenario: ArrayScenario, *, green: str = "far_field", field: str = "local",
                         freeze_green: bool = True, rtol: float = RICHARDSON_RTOL,
                         max_halvings: int = RICHARDSON_MAX_HALVINGS,
                         initial_step_kr: float = 0.1) -> CouplingEstimate:
    """
    ∂(F_j·e_z)/∂z_j′ at the foci by central differences in z_j′, Richardson
    extrapolated over halving steps until two successive estimates of the whole
    matrix agree to `rtol` relative to its largest entry.

    With `freeze_green` the Green tensor stays at its focus-to-focus value, so
    only the field phases move; this isolates the leading 1/d order.
    """
    k_l = scenario.wavenumber
    n_part = scenario.N
    inner = FD_STEP_KR / k_l
    options = dict(green=green, field=field, freeze_green=freeze_green, inner_step=inner)

    def central(h: float) -> np.ndarray:
        columns = []
        for jp in range(n_part):
            dz = np.zeros(n_part)
            dz[jp] = h
            plus = _axial_binding_forces(scenario, dz, **options)
            minus = _axial_binding_forces(scenario, -dz, **options)
            columns.append((plus - minus) / (2.0 * h))
        return np.column_stack(columns)

    h = initial_step_kr / k_l
    table = [[central(h)]]
    previous = table[0][0]
    change = np.inf
    for level in range(1, max_halvings + 1):
        h /= 2.0
        row = [central(h)]
        for m in range(1, level + 1):
            row.append(row[m - 1] + (row[m - 1] - table[level - 1][m - 1]) / (4.0**m - 1.0))
        table.append(row)
        current = row[-1]
        scale = float(np.max(np.abs(current))) or 1.0
        change = float(np.max(np.abs(current - previous))) / scale
        previous = current
        if change <= rtol:
            off = current.copy()
            np.fill_diagonal(off, 0.0)
            return CouplingEstimate(off, -np.diag(current).copy(), change, level)
    raise ConvergenceError(f"Richardson extrapolation stalled at relative change {change:.2e}",
                           error_estimate=change)


def coupling_from_force_gradient(scenario: ArrayScenario, **kwargs) -> np.ndarray:
    """Ĉ_jj′ from the classical force, comparable entrywise with coupling_matrix."""
    if scenario.N < 2:
        return np.zeros((scenario.N, scenario.N))
    return axial_force_gradient(scenario, **kwargs).C
