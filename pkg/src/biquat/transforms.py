"""Orthogonal, Lorentz and Poincaré transformations of Minkowski space.

Points ``(tau, x)`` are quaternized as the selfconjugated biquaternion
``Z = tau + i x``; every transformation acts by a two-sided product
("sandwich") with unit biquaternions.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .algebra import Biquaternion, mutual
from .errors import DegenerateAxis, InvalidVelocity

UNIT_TOL = 1e-12


def _unit_axis(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.shape != (3,) or not np.all(np.isfinite(e)):
        raise ValueError("axis must be a finite real 3-vector")
    n = float(np.linalg.norm(e))
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"axis must be a unit vector, |e| = {n!r}")
    e = e / n
    e.flags.writeable = False
    return e


@dataclass(frozen=True)
class SpacetimePoint:
    tau: float
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(3)
        if not (math.isfinite(self.tau) and np.all(np.isfinite(x))):
            raise ValueError("spacetime point must be finite")
        x.flags.writeable = False
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "x", x)

    @classmethod
    def from_bq(cls, Z: Biquaternion, atol: float = 1e-9) -> SpacetimePoint:
        """Inverse of :meth:`as_bq`; Z must be selfconjugated (real tau, imaginary vector)."""
        c = Z.components
        scale = max(1.0, float(np.max(np.abs(c))))
        if abs(c[0].imag) > atol * scale or np.max(np.abs(c[1:].real)) > atol * scale:
            raise ValueError(f"{Z!r} is not the quaternization of a spacetime point")
        return cls(c[0].real, c[1:].imag)

    def as_bq(self) -> Biquaternion:
        return Biquaternion(self.tau, 1j * self.x)

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.tau], self.x])

    def pseudonorm2(self) -> float:
        return self.tau ** 2 - float(self.x @ self.x)


def as_point(p) -> SpacetimePoint:
    if isinstance(p, SpacetimePoint):
        return p
    p = np.asarray(p, dtype=float).reshape(4)
    return SpacetimePoint(p[0], p[1:])


# --------------------------------------------------------------------------
# group elements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Rotor:
    """U(phi, e) = cos(phi) + e sin(phi); acts as a rotation by 2*phi about e."""

    phi: float
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "e", _unit_axis(self.e))

    @property
    def bq(self) -> Biquaternion:
        return Biquaternion(math.cos(self.phi), self.e * math.sin(self.phi))


@dataclass(frozen=True)
class Boost:
    """L(theta, e) = ch(theta) + i e sh(theta)."""

    theta: float
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "e", _unit_axis(self.e))

    @classmethod
    def from_velocity(cls, v: float, e) -> Boost:
        """ch(2 theta) = (1 - v^2)^(-1/2), i.e. theta = artanh(v) / 2."""
        _check_velocity(v)
        return cls(0.5 * math.atanh(v), e)

    @property
    def velocity(self) -> float:
        return math.tanh(2.0 * self.theta)

    @property
    def bq(self) -> Biquaternion:
        return Biquaternion(math.cosh(self.theta), 1j * self.e * math.sinh(self.theta))


@dataclass(frozen=True)
class PoincareOp:
    """P = U(phi, e)∘L(theta, e) = cos(phi + i theta) + e sin(phi + i theta)."""

    phi: float
    theta: float
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "e", _unit_axis(self.e))

    @property
    def angle(self) -> complex:
        return complex(self.phi, self.theta)

    @property
    def bq(self) -> Biquaternion:
        w = self.angle
        return Biquaternion(cmath.cos(w), self.e * cmath.sin(w))

    @property
    def rotor(self) -> Rotor:
        return Rotor(self.phi, self.e)

    @property
    def boost(self) -> Boost:
        return Boost(self.theta, self.e)


def _check_velocity(v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and abs(v) < 1.0):
        raise InvalidVelocity(f"|v| must be < 1, got {v!r}")


# --------------------------------------------------------------------------
# actions
# --------------------------------------------------------------------------

def sandwich(A: Biquaternion, Z: Biquaternion, B: Biquaternion) -> Biquaternion:
    return A * Z * B


def apply_rotation(U: Rotor, Z) -> SpacetimePoint:
    """Z' = U∘Z∘U*."""
    Zb = as_point(Z).as_bq()
    u = U.bq
    return SpacetimePoint.from_bq(u * Zb * u.conj())


def rotation_closed_form(U: Rotor, Z) -> SpacetimePoint:
    """tau' = tau, x' = e(e,x) + (x - e(e,x)) cos 2phi + [e,x] sin 2phi."""
    Z = as_point(Z)
    e, x = U.e, Z.x
    ex = e * float(e @ x)
    xp = ex + (x - ex) * math.cos(2 * U.phi) + np.cross(e, x) * math.sin(2 * U.phi)
    return SpacetimePoint(Z.tau, xp)


def apply_boost(L: Boost, Z) -> SpacetimePoint:
    """Z' = L∘Z∘L."""
    Zb = as_point(Z).as_bq()
    lb = L.bq
    return SpacetimePoint.from_bq(lb * Zb * lb)


def relativistic_map(v: float, e, Z, inverse: bool = False) -> SpacetimePoint:
    """Closed-form boost with velocity v along unit e (or its inverse)."""
    _check_velocity(v)
    e = _unit_axis(e)
    Z = as_point(Z)
    g = 1.0 / math.sqrt(1.0 - v * v)
    if inverse:
        v = -v
    ex = float(e @ Z.x)
    tau = g * (Z.tau + v * ex)
    x = (Z.x - e * ex) + e * (g * (ex + v * Z.tau))
    return SpacetimePoint(tau, x)


def apply_poincare(P: PoincareOp | Biquaternion, Z, inverse: bool = False) -> SpacetimePoint:
    """Z' = P∘Z∘P*, or the inverse map Z = P⁻∘Z'∘(P*)⁻."""
    p = P.bq if isinstance(P, PoincareOp) else P
    Zb = as_point(Z).as_bq()
    if inverse:
        return SpacetimePoint.from_bq(mutual(p) * Zb * mutual(p.conj()))
    return SpacetimePoint.from_bq(p * Zb * p.conj())


def poincare_matrix(P: PoincareOp | Biquaternion) -> np.ndarray:
    """Real 4x4 matrix of Z -> P∘Z∘P* acting on (tau, x1, x2, x3)."""
    cols = [apply_poincare(P, np.eye(4)[k]).as_array() for k in range(4)]
    return np.column_stack(cols)


# --------------------------------------------------------------------------
# composition
# --------------------------------------------------------------------------

def rotor_from_bq(U3: Biquaternion) -> Rotor:
    """Recover (phi, e) from a real unit quaternion; phi in [0, pi]."""
    u = U3.scalar.real
    V = U3.vector.real
    nv = float(np.linalg.norm(V))
    if nv < 1e-12:
        phi = 0.0 if u > 0 else math.pi
        warnings.warn(
            f"composed rotor is {'+' if u > 0 else '-'}identity; axis set to e1",
            DegenerateAxis, stacklevel=3,
        )
        return Rotor(phi, (1.0, 0.0, 0.0))
    # atan2 equals arccos(u) for a unit quaternion but keeps precision near 0 and pi
    return Rotor(math.atan2(nv, u), V / nv)


def compose_rotors(U1: Rotor, U2: Rotor) -> Rotor:
    """Rotor of U1∘U2 (U2 acts first)."""
    return rotor_from_bq(U1.bq * U2.bq)


@dataclass(frozen=True)
class PoincareComposition:
    """Result of composing two Poincaré operators.

    ``op`` is set only when the axes are parallel and the product stays in
    the single-axis family; ``product`` is always the raw biquaternion.
    """

    product: Biquaternion
    op: PoincareOp | None
    closed: bool
    real_vector_norm: float = field(default=0.0)


def compose_poincare(P1: PoincareOp, P2: PoincareOp, tol: float = 1e-12) -> PoincareComposition:
    product = P1.bq * P2.bq
    cross = float(np.linalg.norm(np.cross(P1.e, P2.e)))
    if cross <= tol:
        s = 1.0 if float(P1.e @ P2.e) > 0 else -1.0
        op = PoincareOp(P1.phi + s * P2.phi, P1.theta + s * P2.theta, P1.e)
        return PoincareComposition(product, op, True)
    # boosts along non-parallel axes leave the single-axis family: their
    # product acquires a real vector component -[e1, e2] sh(theta1) sh(theta2)
    boosts = P1.boost.bq * P2.boost.bq
    rv = float(np.linalg.norm(boosts.vector.real))
    return PoincareComposition(product, None, False, rv)


def covariance_factors(P: PoincareOp | Biquaternion, sign: int = 1):
    """Left/right factors ``((Kl, Kr), (Gl, Gr))`` of the biwave covariance law.

    Under Z' = P∘Z∘P* the potential transforms as K' = Kl∘K∘Kr and the
    right-hand side as G' = Gl∘G∘Gr:

    * sign +1:  K' = P∘K∘P⁻,       G' = conj(P)∘G∘P⁻
    * sign -1:  K' = (P*)⁻∘K∘P*,   G' = P∘G∘P*

    ∇⁻ transforms like Z and ∇⁺ like conj(Z), which fixes the left factors;
    the right factors are chosen so that scalar parts are preserved.  For a
    pure rotation both laws reduce to the rotation sandwich U∘(.)∘U*.
    """
    p = P.bq if isinstance(P, PoincareOp) else P
    if sign == 1:
        right = mutual(p)
        return (p, right), (p.cconj(), right)
    if sign == -1:
        ps = p.conj()
        return (mutual(ps), ps), (p, ps)
    raise ValueError("sign must be +1 or -1")


def transform_biwave_data(P: PoincareOp | Biquaternion, K: Biquaternion, G: Biquaternion,
                          sign: int = 1) -> tuple[Biquaternion, Biquaternion]:
    """Values (K', G') for which ∇'±K' = G' holds in the coordinates Z' = P∘Z∘P*.

    See :func:`covariance_factors` for the transformation law.
    """
    (kl, kr), (gl, gr) = covariance_factors(P, sign)
    return kl * K * kr, gl * G * gr
