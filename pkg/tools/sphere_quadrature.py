"""
tools/sphere_quadrature.py — Pluggable quadrature rules on the unit sphere

Select a rule by name:
    gauss_product → Gauss–Legendre in cos θ × uniform φ about any polar axis
    lebedev       → Lebedev–Laikov rule (scipy.integrate.lebedev_rule, SciPy ≥ 1.15)

All rules expose a single interface:
    rule.nodes() -> (directions (M, 3), weights (M,))   with Σ weights = 4π
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np


# ─── Abstract Interface ───────────────────────────────────────────────────────

class SphereQuadrature(ABC):
    """Common interface every rule must implement."""

    name: str = "abstract"

    @abstractmethod
    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Return unit directions and weights for ∫ f(n) dΩ."""
        ...

    def integrate(self, func) -> complex:
        dirs, weights = self.nodes()
        return np.sum(weights * func(dirs))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} points={self.nodes()[1].size}>"


# ─── Gauss product rule ───────────────────────────────────────────────────────

def _frame(axis) -> np.ndarray:
    """Rows e1, e2, axis: a right-handed orthonormal frame around `axis`."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    helper = np.array([0.0, 0.0, 1.0]) if abs(a[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return np.vstack((e1, e2, a))


class GaussProductQuadrature(SphereQuadrature):
    """
    Exact for integrands that are polynomials of degree < 2·n_polar in cos θ
    times trigonometric polynomials of degree < n_azimuth in φ.
    """

    name = "gauss_product"

    def __init__(self, n_polar: int = 32, n_azimuth: int = 32, axis=(0.0, 0.0, 1.0)) -> None:
        if n_polar < 1 or n_azimuth < 1:
            raise ValueError(f"need positive node counts, got {n_polar} × {n_azimuth}")
        mu, w_mu = np.polynomial.legendre.leggauss(int(n_polar))
        phi = 2.0 * np.pi * np.arange(int(n_azimuth)) / n_azimuth
        sin_t = np.sqrt(np.clip(1.0 - mu * mu, 0.0, None))
        local = np.stack((
            (sin_t[:, None] * np.cos(phi)[None, :]).ravel(),
            (sin_t[:, None] * np.sin(phi)[None, :]).ravel(),
            np.repeat(mu, phi.size),
        ), axis=1)
        self._dirs = local @ _frame(axis)
        self._weights = np.repeat(w_mu, phi.size) * (2.0 * np.pi / n_azimuth)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return self._dirs, self._weights


# ─── Lebedev rule ─────────────────────────────────────────────────────────────

class LebedevQuadrature(SphereQuadrature):
    """Lebedev–Laikov rule of the given algebraic order."""

    name = "lebedev"

    def __init__(self, order: int = 17) -> None:
        try:
            from scipy.integrate import lebedev_rule
        except ImportError:
            raise ImportError("Lebedev rules need SciPy >= 1.15: pip install -U scipy")
        x, w = lebedev_rule(order)
        self._dirs = np.ascontiguousarray(x.T)
        self._weights = np.asarray(w) * (4.0 * np.pi / np.sum(w))
        self.order = order

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return self._dirs, self._weights


# ─── Factory ──────────────────────────────────────────────────────────────────

def get_quadrature(name: str, **kwargs) -> SphereQuadrature:
    """
    Factory — returns a SphereQuadrature for the given rule name.

    Args:
        name:   "gauss_product" | "lebedev"
        kwargs: forwarded to the rule (n_polar, n_azimuth, axis | order)
    """
    key = name.lower().strip()
    if key == "gauss_product":
        return GaussProductQuadrature(**kwargs)
    elif key == "lebedev":
        return LebedevQuadrature(**kwargs)
    raise ValueError(f"Unknown sphere quadrature '{name}'. Choose from: gauss_product, lebedev")
