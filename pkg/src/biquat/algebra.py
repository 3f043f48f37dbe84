"""Biquaternion arithmetic.

A biquaternion ``F = f + F`` has a complex scalar part ``f`` and a complex
3-vector part ``F``.  Values are stored as length-4 complex arrays in the
order ``(f, F1, F2, F3)``.  The ``bq_*`` functions work on arrays of shape
``(..., 4)`` and broadcast, which is what the field and quadrature code uses;
:class:`Biquaternion` wraps a single immutable value for the pointwise API.
"""
from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

from .errors import NonInvertible

ATOL = 1e-12
RTOL = 1e-12


# --------------------------------------------------------------------------
# array kernels, shape (..., 4)
# --------------------------------------------------------------------------

def bq_mul(a, b):
    """Quaternionic product of biquaternion arrays.

    scalar = fg - (F, G),  vector = fG + gF + [F, G]
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    f, F = a[..., 0], a[..., 1:]
    g, G = b[..., 0], b[..., 1:]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    out[..., 0] = f * g - np.sum(F * G, axis=-1)
    out[..., 1:] = f[..., None] * G + g[..., None] * F + np.cross(F, G)
    return out


def bq_mutual(a):
    a = np.array(a, dtype=complex)
    a[..., 1:] *= -1
    return a


def bq_conj(a):
    """Conjugate F* = conj(f) - conj(F)."""
    return bq_mutual(np.conj(a))


def bq_scalar_product(a, b):
    """Bilinear (non-conjugated) product f1 f2 + (F1, F2)."""
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def bq_norm(a):
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=-1))


def bq_pseudonorm2(a):
    """|f|^2 - ||F||^2, always real."""
    a = np.asarray(a)
    return np.abs(a[..., 0]) ** 2 - np.sum(np.abs(a[..., 1:]) ** 2, axis=-1)


PSEUDONORM_SNAP = 8 * np.finfo(float).eps


def bq_pseudonorm(a):
    """Pseudonorm with the branch Re >= 0 (pure imaginary for negative radicand).

    A radicand within a few ulps of ``norm^2`` is rounding noise of the
    difference |f|^2 - ||F||^2 and is taken as exactly zero, so isotropic
    values do not pick up a spurious square root of the noise.
    """
    a = np.asarray(a)
    r = bq_pseudonorm2(a)
    r = np.where(np.abs(r) <= PSEUDONORM_SNAP * np.sum(np.abs(a) ** 2, axis=-1), 0.0, r)
    return np.where(r >= 0, np.sqrt(np.abs(r)) + 0j, 1j * np.sqrt(np.abs(r)))


# --------------------------------------------------------------------------
# value type
# --------------------------------------------------------------------------

class Biquaternion:
    """Immutable biquaternion ``f + F``.

    ``*`` is the quaternionic product when both operands are biquaternions
    and complex scaling otherwise.
    """

    __slots__ = ("_c",)

    def __init__(self, scalar=0.0, vector=(0.0, 0.0, 0.0)):
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (3,):
            raise ValueError(f"vector part must have 3 components, got shape {vector.shape}")
        c = np.empty(4, dtype=complex)
        c[0] = complex(scalar)
        c[1:] = vector
        self._set(c)

    def _set(self, c):
        if not np.all(np.isfinite(c)):
            raise ValueError("biquaternion components must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("Biquaternion is immutable")

    @classmethod
    def from_components(cls, c) -> Biquaternion:
        c = np.array(c, dtype=complex).reshape(-1)
        if c.shape != (4,):
            raise ValueError(f"expected 4 components, got {c.shape[0]}")
        obj = cls.__new__(cls)
        obj._set(c)
        return obj

    @property
    def components(self) -> np.ndarray:
        return self._c

    @property
    def scalar(self) -> complex:
        return complex(self._c[0])

    @property
    def vector(self) -> np.ndarray:
        return self._c[1:]

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_components(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_components(self._c - other._c)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_components(other._c - self._c)

    def __neg__(self):
        return Biquaternion.from_components(-self._c)

    def __mul__(self, other):
        if isinstance(other, Biquaternion):
            return Biquaternion.from_components(bq_mul(self._c, other._c))
        if isinstance(other, (int, float, complex, np.number)):
            return Biquaternion.from_components(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Biquaternion.from_components(other * self._c)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Biquaternion):
            return self * other.inverse()
        if isinstance(other, (int, float, complex, np.number)):
            return Biquaternion.from_components(self._c / other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Biquaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        s = self.scalar
        v = ", ".join(f"{z:.6g}" for z in self.vector)
        return f"Biquaternion({s:.6g}, [{v}])"

    def isclose(self, other, atol=ATOL, rtol=RTOL) -> bool:
        other = _coerce(other)
        return bool(np.allclose(self._c, other._c, atol=atol, rtol=rtol))

    # named operations -----------------------------------------------------

    def mutual(self) -> Biquaternion:
        return mutual(self)

    def cconj(self) -> Biquaternion:
        return Biquaternion.from_components(np.conj(self._c))

    def conj(self) -> Biquaternion:
        return Biquaternion.from_components(bq_conj(self._c))

    def norm(self) -> float:
        return norm(self)

    def pseudonorm(self) -> complex:
        return pseudonorm(self)

    def inverse(self) -> Biquaternion:
        return inverse(self)

    # text form ------------------------------------------------------------

    def to_json_obj(self) -> dict:
        c = self._c
        return {
            "s": [float(c[0].real), float(c[0].imag)],
            "v": [[float(z.real), float(z.imag)] for z in c[1:]],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> Biquaternion:
        """Strict parse of ``{"s":[re,im],"v":[[re,im],[re,im],[re,im]]}``."""
        if not isinstance(obj, dict) or set(obj) != {"s", "v"}:
            raise ValueError('biquaternion object must have exactly the keys "s" and "v"')
        s, v = obj["s"], obj["v"]
        if not isinstance(v, list) or len(v) != 3:
            raise ValueError('"v" must be a list of 3 [re, im] pairs')
        pairs = [s, *v]
        for p in pairs:
            if (not isinstance(p, list) or len(p) != 2
                    or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in p)):
                raise ValueError("each component must be a [re, im] pair of numbers")
        return cls.from_components([complex(p[0], p[1]) for p in pairs])

    @classmethod
    def from_json(cls, text: str) -> Biquaternion:
        return cls.from_json_obj(json.loads(text))


def _coerce(x):
    if isinstance(x, Biquaternion):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return Biquaternion(x)
    return None


ZERO = Biquaternion()
ONE = Biquaternion(1.0)
E1 = Biquaternion(0.0, (1, 0, 0))
E2 = Biquaternion(0.0, (0, 1, 0))
E3 = Biquaternion(0.0, (0, 0, 1))
BASIS = (ONE, E1, E2, E3)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def mul(F: Biquaternion, G: Biquaternion) -> Biquaternion:
    return F * G


def linear_combine(a, F: Biquaternion, b, G: Biquaternion) -> Biquaternion:
    return Biquaternion.from_components(complex(a) * F.components + complex(b) * G.components)


def commutator(F: Biquaternion, G: Biquaternion) -> Biquaternion:
    """F∘G - G∘F; equals the purely vectorial 2[F, G]."""
    return F * G - G * F


def mutual(F: Biquaternion) -> Biquaternion:
    return Biquaternion.from_components(bq_mutual(F.components))


class Conjugations(NamedTuple):
    mutual: Biquaternion
    complex_conj: Biquaternion
    conj: Biquaternion


def conjugations(F: Biquaternion) -> Conjugations:
    return Conjugations(mutual(F), F.cconj(), F.conj())


def is_selfconjugated(F: Biquaternion, atol=ATOL) -> bool:
    return F.conj().isclose(F, atol=atol, rtol=0.0)


def is_unitary(F: Biquaternion, atol=ATOL) -> bool:
    """F∘conj(F) = conj(F)∘F = 1 (complex-conjugate sense)."""
    Fb = F.cconj()
    return (F * Fb).isclose(ONE, atol=atol, rtol=0.0) and (Fb * F).isclose(ONE, atol=atol, rtol=0.0)


def is_lorentz_unitary(F: Biquaternion, atol=ATOL) -> bool:
    """F∘F⁻ = 1, the unit condition used for Lorentz and Poincaré elements."""
    return (F * mutual(F)).isclose(ONE, atol=atol, rtol=0.0)


def scalar_product(F1: Biquaternion, F2: Biquaternion) -> complex:
    return complex(bq_scalar_product(F1.components, F2.components))


def norm(F: Biquaternion) -> float:
    return float(bq_norm(F.components))


def pseudonorm(F: Biquaternion) -> complex:
    return complex(bq_pseudonorm(F.components))


def pseudonorm2(F: Biquaternion) -> float:
    return float(bq_pseudonorm2(F.components))


def invertibility_threshold(F: Biquaternion) -> float:
    return 1e-12 * max(1.0, norm(F) ** 2)


def inverse(F: Biquaternion) -> Biquaternion:
    """Two-sided inverse F⁻/(F, F).

    Raises NonInvertible when |(F, F)| is below ``1e-12 * max(1, ||F||^2)``.
    """
    ff = scalar_product(F, F)
    if abs(ff) <= invertibility_threshold(F):
        raise NonInvertible(f"(F, F) = {ff:.3g}; {F!r} has no inverse")
    return mutual(F) / ff


def solve_linear(F: Biquaternion, B: Biquaternion, side: str = "left") -> Biquaternion:
    """Solve F∘G = B (``side="left"``) or G∘F = B (``side="right"``) for G."""
    Finv = inverse(F)
    if side == "left":
        return Finv * B
    if side == "right":
        return B * Finv
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


class EnergyImpulse(NamedTuple):
    xi: Biquaternion
    W: float
    P: np.ndarray
    pseudonorm2: float


def energy_impulse(F: Biquaternion) -> EnergyImpulse:
    """Energy-impulse biquaternion ½ F∘F* = W + iP with real W and P."""
    xi = 0.5 * (F * F.conj())
    f, V = F.scalar, F.vector
    W = 0.5 * (abs(f) ** 2 + float(np.sum(np.abs(V) ** 2)))
    P = np.imag(np.conj(f) * V) + np.cross(V.real, V.imag)
    return EnergyImpulse(xi, W, P, W * W - float(P @ P))


def random_biquaternion(rng: np.random.Generator, scale: float = 1.0) -> Biquaternion:
    """Components with real and imaginary parts uniform in [-scale, scale]."""
    c = rng.uniform(-scale, scale, 4) + 1j * rng.uniform(-scale, scale, 4)
    return Biquaternion.from_components(c)
