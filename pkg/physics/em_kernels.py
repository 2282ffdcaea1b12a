"""
physics/em_kernels.py — Dipole Green tensors of the vector Helmholtz equation

All kernels are evaluated in scaled coordinates x = k·r, where
G(r) = k³ g(k r). The static kernel has no wavenumber and is evaluated in SI.

    green_full        full tensor, r ≠ 0
    green_static      electrostatic part G₀, r ≠ 0
    green_transverse  G − G₀, regular everywhere (series below the crossover radius)
    far_field_green   1/r radiation term only
    helmholtz_residual  finite-difference check of ∇×∇×G − k²G = 0 away from the origin
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from config import FD_STEP_KR, GREEN_CROSSOVER
from errors import ScenarioError

_EYE = np.eye(3)
FOUR_PI = 4.0 * np.pi


def _as_vec3(r) -> np.ndarray:
    vec = np.asarray(r, dtype=float).reshape(3)
    if not np.all(np.isfinite(vec)):
        raise ScenarioError(f"position must have finite components, got {vec}")
    return vec


def _check_wavenumber(k_l: float) -> float:
    if not k_l > 0:
        raise ScenarioError(f"wavenumber must be positive, got {k_l}")
    return float(k_l)


def _direction(x: np.ndarray) -> tuple[float, np.ndarray]:
    s = float(np.linalg.norm(x))
    if s == 0.0:
        raise ScenarioError("Green tensor is singular at r = 0; use green_transverse for the on-site value")
    n = x / s
    return s, np.outer(n, n)


# ─── Scaled kernels (k = 1) ───────────────────────────────────────────────────

def _full_scaled(x: np.ndarray) -> np.ndarray:
    s, nn = _direction(x)
    near = (3.0 * nn - _EYE) * (1.0 - 1j * s)
    far = s * s * (_EYE - nn)
    return np.exp(1j * s) * (near + far) / (FOUR_PI * s**3)


def _static_scaled(x: np.ndarray) -> np.ndarray:
    s, nn = _direction(x)
    return (3.0 * nn - _EYE) / (FOUR_PI * s**3)


def _transverse_series(x: np.ndarray) -> np.ndarray:
    # series of G − G₀ through fifth order in k·r
    s = float(np.linalg.norm(x))
    if s == 0.0:
        return 1j * _EYE / (6.0 * np.pi)
    _, nn = _direction(x)
    terms = (
        (_EYE + nn) / (2.0 * s)
        + 1j * (2.0 / 3.0) * _EYE
        + s * (nn - 3.0 * _EYE) / 8.0
        + 1j * s * s * (nn - 2.0 * _EYE) / 15.0
    )
    return terms / FOUR_PI


def _transverse_direct(x: np.ndarray) -> np.ndarray:
    return _full_scaled(x) - _static_scaled(x)


# ─── Public kernels ───────────────────────────────────────────────────────────

def green_full(r, k_l: float) -> np.ndarray:
    """Full dipole Green tensor G(r) in 1/m³ for r ≠ 0."""
    k_l = _check_wavenumber(k_l)
    return k_l**3 * _full_scaled(k_l * _as_vec3(r))


def green_static(r) -> np.ndarray:
    """Electrostatic dipole kernel (3 r⊗r − r² 1)/4πr⁵, real, symmetric and traceless."""
    r = _as_vec3(r)
    s, nn = _direction(r)
    return (3.0 * nn - _EYE) / (FOUR_PI * s**3)


def green_transverse(r, k_l: float, crossover: float = GREEN_CROSSOVER) -> np.ndarray:
    """
    G − G₀, defined for every r including the origin.

    Below k·|r| = crossover the difference is taken from its small-distance
    series, whose value at r = 0 is i k³/6π · 1. Above it the two closed forms
    are subtracted directly.
    """
    k_l = _check_wavenumber(k_l)
    x = k_l * _as_vec3(r)
    if np.linalg.norm(x) < crossover:
        return k_l**3 * _transverse_series(x)
    return k_l**3 * _transverse_direct(x)


def far_field_green(r, k_l: float) -> np.ndarray:
    """Radiation part of the Green tensor, e^{ikr} k² (1 − n⊗n)/4πr."""
    k_l = _check_wavenumber(k_l)
    r = _as_vec3(r)
    dist, nn = _direction(r)
    return np.exp(1j * k_l * dist) * k_l**2 * (_EYE - nn) / (FOUR_PI * dist)


# ─── Helmholtz residual ───────────────────────────────────────────────────────

_D1 = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}             # 4th-order first derivative, / 12h
_D2 = {-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}  # 4th-order second derivative, / 12h²


def _second_partials(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """H[a, b] = ∂_a ∂_b func at x by 4th-order central stencils."""
    f0 = func(x)
    hess = np.zeros((3, 3) + f0.shape, dtype=f0.dtype)
    basis = np.eye(3)
    for a in range(3):
        hess[a, a] = sum(c * func(x + p * h * basis[a]) for p, c in _D2.items()) / (12.0 * h * h)
        for b in range(a + 1, 3):
            acc = sum(
                ca * cb * func(x + (p * basis[a] + q * basis[b]) * h)
                for p, ca in _D1.items()
                for q, cb in _D1.items()
            )
            hess[a, b] = hess[b, a] = acc / (144.0 * h * h)
    return hess


def helmholtz_residual(r, k_l: float, step: float | None = None) -> float:
    """
    Relative Frobenius norm of ∇×∇×G − k²G at r ≠ 0.

    `step` is the stencil step in metres; the default is FD_STEP_KR / k.
    """
    k_l = _check_wavenumber(k_l)
    x = k_l * _as_vec3(r)
    h = FD_STEP_KR if step is None else step * k_l
    hess = _second_partials(_full_scaled, x, h)
    # (∇×∇×F)_c = ∂_c(∇·F) − ∇²F_c, applied to every column of G
    curl_curl = np.einsum("caam->cm", hess) - np.einsum("aacm->cm", hess)
    g = _full_scaled(x)
    return float(np.linalg.norm(curl_curl - g) / np.linalg.norm(g))
