"""Bigradient operators on biquaternion fields.

The bigradients are ``∇± = ∂τ ± i∇`` acting by quaternionic product::

    ∇±F = (∂τ f ∓ i div F) + ∂τ F ± i grad f ± i rot F

Fields are vectorized: an evaluator takes ``tau`` of shape ``S`` and ``x`` of
shape ``S + (3,)`` and returns complex values of shape ``S + (4,)``.  Partial
derivatives are arrays of shape ``S + (4, 4)`` indexed ``[..., mu, c]`` with
``mu`` running over (tau, x1, x2, x3) and ``c`` over the components.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .algebra import Biquaternion, bq_mul
from .errors import OutOfDomain
from .transforms import PoincareOp, as_point, covariance_factors, poincare_matrix

DEFAULT_FD_STEP = 1e-3

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# analytic fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BqField:
    """Biquaternion-valued function of spacetime.

    ``partials`` is optional; when given it must return exact first
    derivatives and is used in place of finite differences.
    """

    evaluator: Evaluator
    partials: Optional[Evaluator] = None
    note: str = ""

    def __call__(self, tau, x) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        x = np.asarray(x, dtype=float)
        return np.asarray(self.evaluator(tau, x), dtype=complex)

    def at(self, p) -> Biquaternion:
        p = as_point(p)
        return Biquaternion.from_components(self(p.tau, p.x))

    @classmethod
    def constant(cls, value) -> BqField:
        if not isinstance(value, Biquaternion):
            value = (Biquaternion(value) if np.ndim(value) == 0
                     else Biquaternion.from_components(value))
        c = value.components

        def ev(tau, x):
            return np.broadcast_to(c, np.shape(tau) + (4,)).copy()

        def dv(tau, x):
            return np.zeros(np.shape(tau) + (4, 4), dtype=complex)

        return cls(ev, dv, "constant")

    @classmethod
    def from_scalar(cls, u: Callable, du: Optional[Callable] = None, note: str = "") -> BqField:
        """Scalar field u(tau, x) as the biquaternion u + 0.

        ``du`` (optional) returns the four partials with shape ``S + (4,)``.
        """

        def ev(tau, x):
            out = np.zeros(np.shape(tau) + (4,), dtype=complex)
            out[..., 0] = u(tau, x)
            return out

        dv = None
        if du is not None:
            def dv(tau, x):
                out = np.zeros(np.shape(tau) + (4, 4), dtype=complex)
                out[..., :, 0] = du(tau, x)
                return out

        return cls(ev, dv, note)


def _fd_partials(evaluate: Evaluator, tau, x, h: float) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    x = np.asarray(x, dtype=float)
    steps = h * np.eye(4)
    tp = tau[..., None] + steps[:, 0]
    xp = x[..., None, :] + steps[:, 1:]
    tm = tau[..., None] - steps[:, 0]
    xm = x[..., None, :] - steps[:, 1:]
    return (evaluate(tp, xp) - evaluate(tm, xm)) / (2.0 * h)


def field_partials(field: BqField, tau, x, h: float | None = None) -> np.ndarray:
    """First partials ``[..., mu, c]``: exact when available, else central differences."""
    if field.partials is not None and h is None:
        return np.asarray(field.partials(np.asarray(tau, float), np.asarray(x, float)), dtype=complex)
    return _fd_partials(field, tau, x, DEFAULT_FD_STEP if h is None else h)


def partials_convergence(field: BqField, p, steps=(1e-2, 5e-3, 2.5e-3)) -> list[float]:
    """Max difference between exact and central-difference partials per step."""
    if field.partials is None:
        raise ValueError("field has no exact partials")
    p = as_point(p)
    exact = field.partials(np.asarray(p.tau), p.x)
    return [float(np.max(np.abs(_fd_partials(field, p.tau, p.x, h) - exact))) for h in steps]


# --------------------------------------------------------------------------
# bigradient from partial derivatives
# --------------------------------------------------------------------------

def bigradient_from_partials(sign: int, D: np.ndarray) -> np.ndarray:
    """∇±F from partials ``D[..., mu, c]`` via the componentwise formula."""
    _check_sign(sign)
    s = 1j * sign
    out = np.empty(D.shape[:-2] + (4,), dtype=complex)
    div = D[..., 1, 1] + D[..., 2, 2] + D[..., 3, 3]
    grad = D[..., 1:, 0]
    rot = np.stack([
        D[..., 2, 3] - D[..., 3, 2],
        D[..., 3, 1] - D[..., 1, 3],
        D[..., 1, 2] - D[..., 2, 1],
    ], axis=-1)
    out[..., 0] = D[..., 0, 0] - s * div
    out[..., 1:] = D[..., 0, 1:] + s * grad + s * rot
    return out


def _check_sign(sign):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


def _as_grid_index(field, p):
    return field.index_of(p)


def bigradient(sign: int, field, p, h: float | None = None) -> Biquaternion:
    """∇±F at p; grid fields must be evaluated at interior nodes."""
    p = as_point(p)
    if isinstance(field, GridBqField):
        D = field.partials_at(field.index_of(p))
    else:
        D = field_partials(field, p.tau, p.x, h)
    return Biquaternion.from_components(bigradient_from_partials(sign, D))


def bigradient_field(sign: int, field: BqField, h: float | None = None) -> BqField:
    """∇±F as a new (vectorized) field."""
    _check_sign(sign)

    def ev(tau, x):
        return bigradient_from_partials(sign, field_partials(field, tau, x, h))

    return BqField(ev, note=f"bigradient({sign:+d})")


# --------------------------------------------------------------------------
# matrix (Dirac) form
# --------------------------------------------------------------------------

_I = 1j
_DIRAC = (
    np.eye(4, dtype=complex),
    np.array([[0, -_I, 0, 0], [_I, 0, 0, 0], [0, 0, 0, -_I], [0, 0, _I, 0]]),
    np.array([[0, 0, -_I, 0], [0, 0, 0, _I], [_I, 0, 0, 0], [0, -_I, 0, 0]]),
    np.array([[0, 0, 0, -_I], [0, 0, -_I, 0], [0, _I, 0, 0], [_I, 0, 0, 0]]),
)
for _m in _DIRAC:
    _m.flags.writeable = False


def dirac_matrices() -> tuple[np.ndarray, ...]:
    """Constant matrices (D0, D1, D2, D3) with D+ = sum_mu D^mu ∂_mu.

    D0 is the identity; D1..D3 are Hermitian, square to the identity and
    anticommute pairwise.
    """
    return tuple(m.copy() for m in _DIRAC)


def operator_matrices(sign: int) -> tuple[np.ndarray, ...]:
    """Coefficients M_mu of ∇± = sum_mu M_mu ∂_mu in matrix form (D- = conj(D+))."""
    _check_sign(sign)
    return (_DIRAC[0].copy(),) + tuple(sign * m for m in _DIRAC[1:])


def matrix_apply_partials(sign: int, D: np.ndarray) -> np.ndarray:
    M = np.stack(operator_matrices(sign))            # (mu, m, j)
    return np.einsum("umj,...uj->...m", M, D)


def matrix_apply(sign: int, field, p, h: float | None = None) -> np.ndarray:
    """D± applied to the component vector (f, F1, F2, F3) at p."""
    p = as_point(p)
    if isinstance(field, GridBqField):
        D = field.partials_at(field.index_of(p))
    else:
        D = field_partials(field, p.tau, p.x, h)
    return matrix_apply_partials(sign, D)


def symbol_product(sign_left: int, sign_right: int) -> np.ndarray:
    """Coefficients C[mu, nu] (4x4 matrices) of D^{left} D^{right} = sum C[mu,nu] ∂mu ∂nu.

    Symmetrized over (mu, nu) since partial derivatives commute.
    """
    L = operator_matrices(sign_left)
    R = operator_matrices(sign_right)
    C = np.empty((4, 4, 4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            C[mu, nu] = 0.5 * (L[mu] @ R[nu] + L[nu] @ R[mu])
    return C


# --------------------------------------------------------------------------
# second-order checks
# --------------------------------------------------------------------------

_METRIC = np.array([1.0, -1.0, -1.0, -1.0])


class FactorizationCheck(NamedTuple):
    lhs: Biquaternion
    rhs: Biquaternion


def _second_differences(field: BqField, p, h: float) -> np.ndarray:
    """Diagonal second differences ``[mu, c]`` with the 3-point stencil."""
    p = as_point(p)
    steps = h * np.eye(4)
    tau = p.tau + np.concatenate([steps[:, 0], -steps[:, 0], [0.0]])
    x = p.x + np.concatenate([steps[:, 1:], -steps[:, 1:], np.zeros((1, 3))])
    F = field(tau, x)
    return (F[:4] - 2.0 * F[8] + F[4:8]) / (h * h)


def box(field, p, h: float = DEFAULT_FD_STEP) -> Biquaternion:
    """(∂τ² - Δ)F componentwise."""
    if isinstance(field, GridBqField):
        S = field.second_partials_at(field.index_of(p))
        return Biquaternion.from_components(np.einsum("u,uuc->c", _METRIC, S))
    d2 = _second_differences(field, p, h)
    return Biquaternion.from_components(_METRIC @ d2)


def dalembert_factorization_check(field, p, h: float = DEFAULT_FD_STEP) -> FactorizationCheck:
    """Return ∇⁻(∇⁺F) (nested) and □F (direct) at p for comparison.

    Analytic fields apply the two first-order operators in turn; grid fields
    use one combined second-order stencil for the operator product.
    """
    if isinstance(field, GridBqField):
        S = field.second_partials_at(field.index_of(p))
        C = symbol_product(-1, 1)
        lhs = np.einsum("uvmj,uvj->m", C, S)
        return FactorizationCheck(Biquaternion.from_components(lhs), box(field, p))
    inner = bigradient_field(1, field, None if field.partials is not None else h)
    lhs = bigradient(-1, inner, p, h)
    return FactorizationCheck(lhs, box(field, p, h))


def md_operator(m, sign: int, field, p, h: float | None = None) -> Biquaternion:
    """(∇± + m)∘F at p."""
    p = as_point(p)
    value = field.at(p) if isinstance(field, BqField) else field.value_at(field.index_of(p))
    return bigradient(sign, field, p, h) + complex(m) * value


def md_operator_field(m, sign: int, field: BqField, h: float | None = None) -> BqField:
    _check_sign(sign)
    m = complex(m)

    def ev(tau, x):
        D = field_partials(field, tau, x, h)
        return bigradient_from_partials(sign, D) + m * field(tau, x)

    return BqField(ev, note=f"md({m}, {sign:+d})")


def kgfsh_apply(m, u: Callable, p, h: float = DEFAULT_FD_STEP) -> complex:
    """□u + 2m ∂τu + m²u for a scalar field u(tau, x) by central differences."""
    p = as_point(p)
    m = complex(m)
    field = BqField.from_scalar(u)
    d2 = _second_differences(field, p, h)[:, 0]
    dtau = (u(np.asarray(p.tau + h), p.x) - u(np.asarray(p.tau - h), p.x)) / (2 * h)
    return complex(np.squeeze(_METRIC @ d2 + 2 * m * dtau + m * m * u(np.asarray(p.tau), p.x)))


def kgfsh_nested(m, u: Callable, p, h: float = DEFAULT_FD_STEP) -> Biquaternion:
    """D_m⁺∘(D_m⁻ u) applied as two biquaternion operators."""
    inner = md_operator_field(m, -1, BqField.from_scalar(u), h)
    return md_operator(m, 1, inner, p, h)


# --------------------------------------------------------------------------
# gradiental (time-harmonic) operator
# --------------------------------------------------------------------------

def gradiental_from_partials(k, sign: int, value: np.ndarray, D: np.ndarray) -> np.ndarray:
    """k B ± ∇∘B with ∇ = 0 + grad; ``D`` holds the spatial partials ``[..., j, c]``."""
    _check_sign(sign)
    nabla_b = np.empty(value.shape, dtype=complex)
    nabla_b[..., 0] = -(D[..., 0, 1] + D[..., 1, 2] + D[..., 2, 3])
    nabla_b[..., 1:] = D[..., :, 0] + np.stack([
        D[..., 1, 3] - D[..., 2, 2],
        D[..., 2, 1] - D[..., 0, 3],
        D[..., 0, 2] - D[..., 1, 1],
    ], axis=-1)
    return complex(k) * value + sign * nabla_b


def gradiental_field(k, sign: int, field: BqField, h: float | None = None) -> BqField:
    """(k ± ∇)∘B for a spatial field B (the time argument is ignored)."""

    def ev(tau, x):
        D = field_partials(field, tau, x, h)[..., 1:, :]
        return gradiental_from_partials(k, sign, field(tau, x), D)

    return BqField(ev, note=f"gradiental({k}, {sign:+d})")


def gradiental_apply(k, sign: int, field: BqField, x, h: float | None = None) -> Biquaternion:
    """(k ± ∇)∘B(x) for a spatial field; k plays the role of omega + rho."""
    x = np.asarray(x, dtype=float)
    return Biquaternion.from_components(gradiental_field(k, sign, field, h)(np.asarray(0.0), x))


# --------------------------------------------------------------------------
# Poincaré-transformed fields
# --------------------------------------------------------------------------

def transform_field(P: PoincareOp | Biquaternion, field: BqField, sign: int = 1,
                    role: str = "potential") -> BqField:
    """Field in the coordinates Z' = P∘Z∘P*, transformed as a potential or a source.

    ``role="potential"`` uses the K-law and ``role="source"`` the G-law of
    :func:`biquat.transforms.covariance_factors`.  Exact partials are carried
    over by the chain rule when the input has them.
    """
    K, G = covariance_factors(P, sign)
    left, right = {"potential": K, "source": G}[role]
    lc, rc = left.components, right.components
    Lam = poincare_matrix(P)
    Linv = np.linalg.inv(Lam)

    def pull_back(tau, x):
        z = np.concatenate([np.asarray(tau, float)[..., None], np.asarray(x, float)], axis=-1)
        z0 = z @ Linv.T
        return z0[..., 0], z0[..., 1:]

    def ev(tau, x):
        t0, x0 = pull_back(tau, x)
        return bq_mul(bq_mul(lc, field(t0, x0)), rc)

    dv = None
    if field.partials is not None:
        def dv(tau, x):
            t0, x0 = pull_back(tau, x)
            D = np.einsum("nu,...nc->...uc", Linv, field.partials(t0, x0))
            return bq_mul(bq_mul(lc, D), rc)

    return BqField(ev, dv, f"transformed {role}")


# --------------------------------------------------------------------------
# grid-sampled fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridBqField:
    """Uniform 4D grid of biquaternion samples.

    ``samples`` has shape ``(n_tau, n_1, n_2, n_3, 4)``; node ``(i, j, k, l)``
    sits at ``origin + spacing * (i, j, k, l)``.
    """

    origin: np.ndarray
    spacing: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        origin = np.array(self.origin, dtype=float).reshape(4)
        spacing = np.array(self.spacing, dtype=float).reshape(4)
        samples = np.array(self.samples, dtype=complex)
        if np.any(spacing <= 0):
            raise ValueError("grid spacing must be positive")
        if samples.ndim != 5 or samples.shape[-1] != 4:
            raise ValueError("samples must have shape (n0, n1, n2, n3, 4)")
        for a in (origin, spacing, samples):
            a.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def sample(cls, field: BqField, origin, spacing, extents) -> GridBqField:
        origin = np.asarray(origin, float)
        spacing = np.asarray(spacing, float)
        axes = [origin[k] + spacing[k] * np.arange(extents[k]) for k in range(4)]
        T, X1, X2, X3 = np.meshgrid(*axes, indexing="ij")
        return cls(origin, spacing, field(T, np.stack([X1, X2, X3], axis=-1)))

    @property
    def extents(self) -> tuple[int, ...]:
        return self.samples.shape[:4]

    def node(self, idx) -> np.ndarray:
        return self.origin + self.spacing * np.asarray(idx, dtype=float)

    def index_of(self, p, tol: float = 1e-9) -> tuple[int, ...]:
        z = as_point(p).as_array()
        u = (z - self.origin) / self.spacing
        idx = np.rint(u)
        if np.any(np.abs(u - idx) > tol):
            raise OutOfDomain(f"point {z} is not a grid node")
        return tuple(int(i) for i in idx)

    def value_at(self, idx) -> Biquaternion:
        return Biquaternion.from_components(self.samples[tuple(idx)])

    def _check_interior(self, idx):
        for k, (i, n) in enumerate(zip(idx, self.extents)):
            if not 1 <= i <= n - 2:
                raise OutOfDomain(f"node {tuple(idx)} lacks stencil support along axis {k}")

    def partials_at(self, idx) -> np.ndarray:
        self._check_interior(idx)
        D = np.empty((4, 4), dtype=complex)
        for mu in range(4):
            up = list(idx)
            dn = list(idx)
            up[mu] += 1
            dn[mu] -= 1
            D[mu] = (self.samples[tuple(up)] - self.samples[tuple(dn)]) / (2 * self.spacing[mu])
        return D

    def second_partials_at(self, idx) -> np.ndarray:
        """All second partials ``[mu, nu, c]`` with compact 3-point/4-point stencils."""
        self._check_interior(idx)
        S = np.empty((4, 4, 4), dtype=complex)
        f = self.samples
        c = f[tuple(idx)]
        for mu in range(4):
            for nu in range(mu, 4):
                if mu == nu:
                    up, dn = list(idx), list(idx)
                    up[mu] += 1
                    dn[mu] -= 1
                    S[mu, mu] = (f[tuple(up)] - 2 * c + f[tuple(dn)]) / self.spacing[mu] ** 2
                    continue
                acc = 0
                for a, b, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                    j = list(idx)
                    j[mu] += a
                    j[nu] += b
                    acc = acc + w * f[tuple(j)]
                S[mu, nu] = S[nu, mu] = acc / (4 * self.spacing[mu] * self.spacing[nu])
        return S

    def __call__(self, tau, x) -> np.ndarray:
        """Multilinear interpolation; zero outside the grid box."""
        tau = np.asarray(tau, dtype=float)
        x = np.asarray(x, dtype=float)
        z = np.concatenate([tau[..., None], x], axis=-1)
        u = (z - self.origin) / self.spacing
        n = np.array(self.extents)
        inside = np.all((u >= 0) & (u <= n - 1), axis=-1)
        i0 = np.clip(np.floor(u).astype(int), 0, np.maximum(n - 2, 0))
        t = np.clip(u - i0, 0.0, 1.0)
        out = np.zeros(tau.shape + (4,), dtype=complex)
        for corner in range(16):
            bits = [(corner >> k) & 1 for k in range(4)]
            w = np.ones(tau.shape)
            idx = []
            for k, b in enumerate(bits):
                if n[k] == 1:
                    idx.append(np.zeros_like(i0[..., k]))
                    if b:
                        w = w * 0.0
                    continue
                w = w * (t[..., k] if b else 1.0 - t[..., k])
                idx.append(i0[..., k] + b)
            out += w[..., None] * self.samples[tuple(idx)]
        out[~inside] = 0.0
        return out

    def as_field(self) -> BqField:
        return BqField(self, note="grid interpolant")

    # serialization --------------------------------------------------------

    def header(self) -> dict:
        return {
            "schema": "1",
            "origin": [float(v) for v in self.origin],
            "spacing": [float(v) for v in self.spacing],
            "extents": [int(v) for v in self.extents],
        }

    def dumps(self) -> str:
        """Header line then one biquaternion record per node in row-major order."""
        lines = [json.dumps(self.header(), separators=(",", ":"))]
        for c in self.samples.reshape(-1, 4):
            lines.append(Biquaternion.from_components(c).to_json())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> GridBqField:
        from .errors import ParseError

        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty grid file", 1)
        try:
            head = json.loads(lines[0])
            extents = tuple(int(v) for v in head["extents"])
            origin, spacing = head["origin"], head["spacing"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad grid header: {exc}", 1) from None
        count = int(np.prod(extents))
        if len(lines) - 1 != count:
            raise ParseError(f"expected {count} records, found {len(lines) - 1}", len(lines))
        samples = np.empty((count, 4), dtype=complex)
        for k, ln in enumerate(lines[1:]):
            try:
                samples[k] = Biquaternion.from_json(ln).components
            except ValueError as exc:
                raise ParseError(str(exc), k + 2) from None
        return cls(origin, spacing, samples.reshape(extents + (4,)))
