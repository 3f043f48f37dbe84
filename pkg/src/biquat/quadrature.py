"""Quadrature rules on the sphere, the ball and intervals.

All node tables are immutable and cached, so concurrent solves share them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SPHERE_SCHEMES = ("gauss-product", "lebedev-14")
RADIAL_SCHEMES = ("gauss-legendre",)


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for ball quadrature: ``n_r`` radial nodes and a sphere rule.

    With ``sphere="gauss-product"`` the sphere carries ``n_s`` polar
    Gauss-Legendre nodes times ``2 n_s`` azimuthal nodes, exact for spherical
    polynomials of degree ``2 n_s - 1``.
    """

    n_r: int = 32
    n_s: int = 12
    radial: str = "gauss-legendre"
    sphere: str = "gauss-product"

    def __post_init__(self):
        if self.n_r < 1 or self.n_s < 1:
            raise ValueError("node counts must be positive")
        if self.radial not in RADIAL_SCHEMES:
            raise ValueError(f"unknown radial scheme {self.radial!r}")
        if self.sphere not in SPHERE_SCHEMES:
            raise ValueError(f"unknown sphere scheme {self.sphere!r}")

    def refined(self, factor: int = 2) -> QuadratureSpec:
        return QuadratureSpec(self.n_r * factor, self.n_s * factor, self.radial, self.sphere)

    def coarsened(self) -> QuadratureSpec:
        return QuadratureSpec(max(1, self.n_r // 2), max(1, self.n_s // 2), self.radial, self.sphere)


def _frozen(*arrays):
    for a in arrays:
        a.flags.writeable = False
    return arrays


@lru_cache(maxsize=None)
def gauss_interval(n: int, a: float = 0.0, b: float = 1.0):
    """Gauss-Legendre nodes and weights on [a, b]."""
    t, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (b - a) * t + 0.5 * (b + a)
    return _frozen(x, 0.5 * (b - a) * w)


@lru_cache(maxsize=None)
def sphere_rule(n_s: int, scheme: str = "gauss-product"):
    """Unit directions (N, 3) and weights (N,) summing to 4 pi."""
    if scheme == "lebedev-14":
        axes = np.vstack([np.eye(3), -np.eye(3)])
        corners = np.array([[a, b, c] for a in (1, -1) for b in (1, -1) for c in (1, -1)]) / np.sqrt(3)
        dirs = np.vstack([axes, corners])
        w = 4 * np.pi * np.concatenate([np.full(6, 1 / 15), np.full(8, 3 / 40)])
        return _frozen(dirs, w)
    if scheme != "gauss-product":
        raise ValueError(f"unknown sphere scheme {scheme!r}")
    ct, wt = np.polynomial.legendre.leggauss(n_s)
    n_phi = 2 * n_s
    phi = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    st = np.sqrt(1.0 - ct ** 2)
    dirs = np.stack([
        np.outer(st, np.cos(phi)),
        np.outer(st, np.sin(phi)),
        np.outer(ct, np.ones(n_phi)),
    ], axis=-1).reshape(-1, 3)
    w = np.outer(wt, np.full(n_phi, 2 * np.pi / n_phi)).reshape(-1)
    return _frozen(dirs, w)


@lru_cache(maxsize=None)
def ball_rule(R: float, spec: QuadratureSpec):
    """Nodes y (N, 3), radii r (N,) and weights for ∫_{|y|<=R} g(y) dV(y).

    Weights include the r² Jacobian; a kernel 1/r is handled by multiplying
    the integrand, which stays bounded.
    """
    r, wr = gauss_interval(spec.n_r, 0.0, float(R))
    dirs, ws = sphere_rule(spec.n_s, spec.sphere)
    y = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    rr = np.repeat(r, len(ws))
    w = (wr[:, None] * r[:, None] ** 2 * ws[None, :]).reshape(-1)
    return _frozen(y, rr, w)


def sphere_integrate(f, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """∫_{S²} f(e) dS(e) for a vectorized f taking (N, 3) directions."""
    dirs, w = sphere_rule(spec.n_s, spec.sphere)
    return np.tensordot(w, np.asarray(f(dirs)), axes=(0, 0))
