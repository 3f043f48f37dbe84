"""Fundamental and generalized solutions of the biwave and KGFSh equations.

Singular kernels supported on the light cone are never evaluated pointwise;
they act through pairings with smooth test functions and through retarded
convolutions computed by ball quadrature.  Derivatives of potentials are
taken by central differences of the quadrature result, whose error is a
smooth function of the evaluation point.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.linalg import null_space

from .algebra import Biquaternion, ZERO, bq_mul
from .diffops import (
    DEFAULT_FD_STEP,
    BqField,
    bigradient_from_partials,
    gradiental_from_partials,
    operator_matrices,
)
from .errors import (
    NegativeTime,
    QuadratureBudgetExceeded,
    UnsupportedMass,
    ZeroWaveNumber,
)
from .quadrature import QuadratureSpec, ball_rule, gauss_interval, sphere_rule
from .transforms import as_point

_METRIC = np.array([1.0, -1.0, -1.0, -1.0])
FOUR_PI = 4.0 * np.pi


# --------------------------------------------------------------------------
# kernels and test functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeLayerKernel:
    """Simple layer on the light cone with mass parameter m.

    Density ``a e^{-m r} / (4 pi r)`` on ``tau = r`` (retarded) plus
    ``(1 - a) e^{m r} / (4 pi r)`` on ``tau = -r`` (advanced).  With m = 0
    and a = 1 this is the fundamental solution of the wave equation.
    """

    m: complex = 0.0
    a: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "m", complex(self.m))
        object.__setattr__(self, "a", complex(self.a))

    @classmethod
    def retarded(cls, m=0.0) -> ConeLayerKernel:
        return cls(m, 1.0)

    @classmethod
    def advanced(cls, m=0.0) -> ConeLayerKernel:
        return cls(m, 0.0)

    def retarded_density(self, r):
        return self.a * np.exp(-self.m * r) / (FOUR_PI * r)

    def advanced_density(self, r):
        return (1.0 - self.a) * np.exp(self.m * r) / (FOUR_PI * r)


@dataclass(frozen=True)
class TestFunction:
    """Ellipsoidal bump ``A exp(-1/(1-u))``, ``u = sum(((z - c)/s)^2)``, zero for u >= 1.

    ``z = (tau, x1, x2, x3)``.  Value, gradient and Hessian are analytic.
    """

    __test__ = False  # not a pytest class

    center: tuple = (0.0, 0.0, 0.0, 0.0)
    radii: tuple = (1.0, 1.0, 1.0, 1.0)
    amplitude: float = 1.0

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(4)
        s = np.array(self.radii, dtype=float).reshape(4)
        if np.any(s <= 0):
            raise ValueError("test function radii must be positive")
        object.__setattr__(self, "center", tuple(c))
        object.__setattr__(self, "radii", tuple(s))

    def _u(self, z):
        d = (np.asarray(z, float) - np.array(self.center)) / np.array(self.radii)
        return d, np.sum(d * d, axis=-1)

    def __call__(self, z) -> np.ndarray:
        _, u = self._u(z)
        inside = u < 1.0
        out = np.zeros(u.shape)
        out[inside] = self.amplitude * np.exp(-1.0 / (1.0 - u[inside]))
        return out

    def derivatives(self, z):
        """(value, gradient (...,4), Hessian (...,4,4))."""
        s = np.array(self.radii)
        d, u = self._u(z)
        inside = u < 1.0
        v = np.zeros(u.shape)
        g1 = np.zeros(u.shape)
        g2 = np.zeros(u.shape)
        w = 1.0 - u[inside]
        v[inside] = self.amplitude * np.exp(-1.0 / w)
        g1[inside] = -1.0 / w ** 2
        g2[inside] = -2.0 / w ** 3
        du = 2.0 * d / s
        grad = (v * g1)[..., None] * du
        hess = (v * (g1 * g1 + g2))[..., None, None] * du[..., :, None] * du[..., None, :]
        hess = hess + (v * g1)[..., None, None] * np.diag(2.0 / s ** 2)
        return v, grad, hess

    def at_origin(self) -> float:
        return float(self(np.zeros(4)))

    def cone_range(self, branch: int = 1) -> tuple[float, float]:
        """Radii r where the cone tau = branch*r can meet the support."""
        c0, s0 = self.center[0] * branch, self.radii[0]
        return max(0.0, c0 - s0), max(0.0, c0 + s0)


def _cone_integral(fun: Callable, r_lo: float, r_hi: float, q: QuadratureSpec,
                   branch: int = 1) -> np.ndarray:
    """∫ fun(branch*r, y) / (4 pi r) dV(y) over r_lo <= r = |y| <= r_hi.

    ``fun`` takes points of shape (N, 4) and returns (N, ...) values; the
    result keeps the trailing shape.
    """
    if r_hi <= r_lo:
        return np.asarray(0.0)
    r, wr = gauss_interval(q.n_r, float(r_lo), float(r_hi))
    dirs, ws = sphere_rule(q.n_s, q.sphere)
    y = (r[:, None, None] * dirs[None]).reshape(-1, 3)
    rr = np.repeat(r, len(ws))
    w = (wr[:, None] * r[:, None] * ws[None, :]).reshape(-1) / FOUR_PI
    z = np.concatenate([(branch * rr)[:, None], y], axis=1)
    vals = np.asarray(fun(z, rr))
    return np.tensordot(w, vals, axes=(0, 0))


def pair_kernel(kernel: ConeLayerKernel, fun: Callable, r_range, q: QuadratureSpec,
                r_range_adv=None) -> complex:
    """⟨kernel, fun⟩ with fun(z) scalar, supported where the ranges say."""
    total = 0.0
    if kernel.a != 0:
        total = total + kernel.a * _cone_integral(
            lambda z, r: np.exp(-kernel.m * r) * fun(z), *r_range, q, 1)
    if kernel.a != 1:
        lo, hi = r_range_adv if r_range_adv is not None else r_range
        total = total + (1 - kernel.a) * _cone_integral(
            lambda z, r: np.exp(kernel.m * r) * fun(z), lo, hi, q, -1)
    return complex(total)


def _with_budget(compute: Callable[[QuadratureSpec], complex], q: QuadratureSpec, tol):
    value = compute(q)
    if tol is not None:
        coarse = compute(q.coarsened())
        if abs(value - coarse) > tol:
            raise QuadratureBudgetExceeded(
                f"estimated error {abs(value - coarse):.3g} exceeds tol {tol:.3g} "
                f"at n_r={q.n_r}, n_s={q.n_s}")
    return value


def pair_wave_fundamental(phi: TestFunction, q: QuadratureSpec = QuadratureSpec(),
                          tol: float | None = None) -> complex:
    """⟨psi, phi⟩ = ∫ phi(|y|, y) / (4 pi |y|) dV(y)."""
    kern = ConeLayerKernel.retarded()
    return _with_budget(lambda qq: pair_kernel(kern, phi, phi.cone_range(), qq), q, tol)


def kgfsh_fundamental_pair(m, phi: TestFunction, q: QuadratureSpec = QuadratureSpec(),
                           a=1.0, tol: float | None = None) -> complex:
    """⟨psi_m, phi⟩ for the KGFSh kernel family with weight a."""
    kern = ConeLayerKernel(m, a)
    return _with_budget(
        lambda qq: pair_kernel(kern, phi, phi.cone_range(1), qq, phi.cone_range(-1)), q, tol)


def wave_distribution_check(phi: TestFunction, q: QuadratureSpec = QuadratureSpec()) -> complex:
    """⟨psi, □phi⟩, which must equal phi(0)."""
    def box_phi(z):
        _, _, H = phi.derivatives(z)
        return np.einsum("u,...uu->...", _METRIC, H)

    return pair_kernel(ConeLayerKernel.retarded(), box_phi, phi.cone_range(), q)


def kgfsh_distribution_check(m, phi: TestFunction, q: QuadratureSpec = QuadratureSpec(),
                             a=1.0) -> complex:
    """⟨psi_m, L^T phi⟩ with L^T = □ - 2m ∂tau + m², which must equal phi(0)."""
    m = complex(m)

    def adj(z):
        v, g, H = phi.derivatives(z)
        return np.einsum("u,...uu->...", _METRIC, H) - 2 * m * g[..., 0] + m * m * v

    return pair_kernel(ConeLayerKernel(m, a), adj, phi.cone_range(1), q, phi.cone_range(-1))


def fundamental_biwave(sign: int, phi: TestFunction, q: QuadratureSpec = QuadratureSpec(),
                       m=0.0) -> Biquaternion:
    """⟨Psi, phi⟩ for the fundamental solution Psi = (∇∓ + m) psi_m of (∇± + m)K = delta.

    Derivatives are moved onto phi: ⟨∂psi, phi⟩ = -⟨psi, ∂phi⟩.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = complex(m)
    kern = ConeLayerKernel.retarded(m)

    def integrand(z):
        v, g, _ = phi.derivatives(z)
        out = np.empty(v.shape + (4,), dtype=complex)
        out[..., 0] = -g[..., 0] + m * v
        out[..., 1:] = sign * 1j * g[..., 1:]
        return out

    return Biquaternion.from_components(
        kern.a * _cone_integral(lambda z, r: np.exp(-m * r)[:, None] * integrand(z),
                                *phi.cone_range(), q))


def biwave_fundamental_check(sign: int, phi: TestFunction,
                             q: QuadratureSpec = QuadratureSpec(), m=0.0) -> np.ndarray:
    """Matrix of ⟨(D^± + m)(D^∓ + m) psi_m, phi⟩ built from operator symbols.

    Must equal phi(0) times the 4x4 identity.
    """
    m = complex(m)
    L = operator_matrices(sign)
    R = operator_matrices(-sign)
    I = np.eye(4)

    def integrand(z):
        v, g, H = phi.derivatives(z)
        out = np.zeros(v.shape + (4, 4), dtype=complex)
        for mu in range(4):
            for nu in range(4):
                out += H[..., mu, nu, None, None] * (L[mu] @ R[nu])
            # adjoint first-order terms: ⟨∂psi, phi⟩ = -⟨psi, ∂phi⟩
            out -= m * g[..., mu, None, None] * (L[mu] + R[mu])
        out += (m * m) * v[..., None, None] * I
        return out

    return _cone_integral(lambda z, r: np.exp(-m * r)[:, None, None] * integrand(z),
                          *phi.cone_range(), q)


# --------------------------------------------------------------------------
# retarded convolutions and Kirchhoff-type solves
# --------------------------------------------------------------------------

def _retarded_many(m: complex, F: BqField, Z: np.ndarray, q: QuadratureSpec) -> np.ndarray:
    """∫_{r<=tau} e^{-m r} F(tau - r, x - y) / (4 pi r) dV(y) for points Z (P, 4)."""
    Z = np.atleast_2d(np.asarray(Z, float))
    out = np.zeros((len(Z), 4), dtype=complex)
    y1, r1, w1 = ball_rule(1.0, q)
    for k, (tau, *x) in enumerate(Z):
        if tau <= 0:
            continue
        r = tau * r1
        vals = F(tau - r, np.asarray(x) - tau * y1)
        w = (tau ** 3) * w1 * np.exp(-m * r) / (FOUR_PI * r)
        out[k] = w @ vals
    return out


def _spherical_mean_many(F: BqField, Z: np.ndarray, q: QuadratureSpec) -> np.ndarray:
    """(1 / 4 pi tau) ∫_{r=tau} F(0, y) dS(y) = (tau / 4 pi) ∫_{S²} F(0, x + tau e) dS(e)."""
    Z = np.atleast_2d(np.asarray(Z, float))
    dirs, ws = sphere_rule(q.n_s, q.sphere)
    out = np.zeros((len(Z), 4), dtype=complex)
    for k, (tau, *x) in enumerate(Z):
        if tau <= 0:
            continue
        vals = F(np.zeros(len(ws)), np.asarray(x) + tau * dirs)
        out[k] = tau * (ws @ vals) / FOUR_PI
    return out


def _stencil(p: np.ndarray, h: float) -> np.ndarray:
    """Center followed by +h and -h along each of the four axes."""
    steps = h * np.eye(4)
    return np.vstack([p[None], p + steps, p - steps])


def _apply_first_order(sign: int, m: complex, U: Callable, p, h: float) -> np.ndarray:
    """(∇^sign + m) U at p by central differences of the potential U."""
    p = as_point(p).as_array()
    vals = U(_stencil(p, h))
    D = (vals[1:5] - vals[5:9]) / (2 * h)
    return bigradient_from_partials(sign, D) + m * vals[0]


def _check_time(p):
    p = as_point(p)
    if p.tau <= 0:
        warnings.warn(f"tau = {p.tau} <= 0: retarded support is empty, result is 0",
                      NegativeTime, stacklevel=3)
        return False
    return True


def retarded_convolve(kernel: ConeLayerKernel, F: BqField, p,
                      q: QuadratureSpec = QuadratureSpec()) -> Biquaternion:
    """Retarded convolution of F with the cone-layer kernel at p.

    Only the causal part of the kernel is used, scaled by its weight ``a``.
    """
    if not _check_time(p):
        return ZERO
    val = _retarded_many(kernel.m, F, as_point(p).as_array()[None], q)[0]
    return Biquaternion.from_components(kernel.a * val)


def biwave_potential(G: Optional[BqField], K0: Optional[BqField], q: QuadratureSpec) -> Callable:
    """U = psi * (H G) + psi *_x (delta K0), vectorized over points (P, 4)."""
    def U(Z):
        out = np.zeros((len(Z), 4), dtype=complex)
        if G is not None:
            out += _retarded_many(0.0, G, Z, q)
        if K0 is not None:
            out += _spherical_mean_many(K0, Z, q)
        return out

    return U


def biwave_solve(sign: int, G: Optional[BqField], K0: Optional[BqField], p,
                 q: QuadratureSpec = QuadratureSpec(), h: float = DEFAULT_FD_STEP) -> Biquaternion:
    """Solution of ∇^sign K = G for tau > 0 with K(0, x) = K0(x).

    K = ∇^(-sign) { psi * (H G) + psi *_x (delta K0) }.  The second term is the
    spherical mean (1 / 4 pi tau) ∫_{r=tau} K0 dS.
    """
    if not _check_time(p):
        return ZERO
    if G is None and K0 is None:
        return ZERO
    return Biquaternion.from_components(
        _apply_first_order(-sign, 0.0, biwave_potential(G, K0, q), p, h))


def biwave_solution_field(sign: int, G, K0, q: QuadratureSpec = QuadratureSpec(),
                          h: float = DEFAULT_FD_STEP) -> BqField:
    """The Kirchhoff solution as a field, for residual checks."""
    U = biwave_potential(G, K0, q)

    def ev(tau, x):
        tau = np.asarray(tau, float)
        x = np.asarray(x, float)
        pts = np.concatenate([tau.reshape(-1, 1), x.reshape(-1, 3)], axis=1)
        out = np.array([_apply_first_order(-sign, 0.0, U, z, h) for z in pts])
        return out.reshape(tau.shape + (4,))

    return BqField(ev, note="kirchhoff solution")


def kirchhoff_maxwell(theta: Optional[BqField], A0: Optional[BqField], p,
                      q: QuadratureSpec = QuadratureSpec(), h: float = DEFAULT_FD_STEP) -> Biquaternion:
    """Intensity A solving ∇⁺A + Theta = 0 with A(0, x) = A0(x).

    A = -∇⁻{psi * (H Theta)} + ∇⁻{(1 / 4 pi tau) ∫_{r=tau} A0 dS}.
    """
    neg = None if theta is None else BqField(lambda t, x: -theta(t, x))
    return biwave_solve(1, neg, A0, p, q, h)


def md_potential(m: complex, F: BqField, q: QuadratureSpec) -> Callable:
    return lambda Z: _retarded_many(complex(m), F, Z, q)


def md_solve(m, sign: int, F: Optional[BqField], p, q: QuadratureSpec = QuadratureSpec(),
             h: float = DEFAULT_FD_STEP, homogeneous: Optional[BqField] = None) -> Biquaternion:
    """Solution of (∇^sign + m)∘B = F for tau > 0 (zero Cauchy data).

    B = (∇^(-sign) + m)(psi_m * H F) with the retarded KGFSh kernel
    e^{-m r} delta(tau - r) / (4 pi r).  A homogeneous part ``homogeneous``
    (a field annihilated by ∇^sign + m) may be added only when Re m = 0.
    """
    m = complex(m)
    if homogeneous is not None and not admits_homogeneous_solutions(m):
        raise UnsupportedMass(f"m = {m}: Re m != 0 admits only the trivial homogeneous solution")
    out = ZERO
    if F is not None and _check_time(p):
        out = Biquaternion.from_components(
            _apply_first_order(-sign, m, md_potential(m, F, q), p, h))
    if homogeneous is not None:
        out = out + homogeneous.at(p)
    return out


def md_solution_field(m, sign: int, F: BqField, q: QuadratureSpec = QuadratureSpec(),
                      h: float = DEFAULT_FD_STEP) -> BqField:
    m = complex(m)
    U = md_potential(m, F, q)

    def ev(tau, x):
        tau = np.asarray(tau, float)
        pts = np.concatenate([tau.reshape(-1, 1), np.asarray(x, float).reshape(-1, 3)], axis=1)
        out = np.array([_apply_first_order(-sign, m, U, z, h) for z in pts])
        return out.reshape(tau.shape + (4,))

    return BqField(ev, note="md solution")


def admits_homogeneous_solutions(m) -> bool:
    """Nontrivial homogeneous KGFSh solutions exist only for purely imaginary m."""
    return complex(m).real == 0.0


def homogeneous_solutions(kind: str, density: Callable, center, radius: float, sign: int, p,
                          q: QuadratureSpec = QuadratureSpec(), rho: float = 0.0) -> complex:
    """∫ phi(xi) exp(i((xi, x) ± |xi| tau)) dV(xi), times e^{-i rho tau} for kind "kgfsh".

    ``density`` maps (N, 3) wave vectors to values and vanishes outside the
    ball of the given center and radius.
    """
    if kind not in ("wave", "kgfsh"):
        raise ValueError(f"kind must be 'wave' or 'kgfsh', not {kind!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = as_point(p)
    y, _, w = ball_rule(float(radius), q)
    xi = np.asarray(center, float) + y
    phase = xi @ p.x + sign * np.linalg.norm(xi, axis=1) * p.tau
    val = complex(np.sum(w * density(xi) * np.exp(1j * phase)))
    if kind == "kgfsh":
        val *= np.exp(-1j * rho * p.tau)
    return val


def plane_wave_solution(sign: int, xi, D=None, branch: int = 1, m: complex = 0.0) -> BqField:
    """Plane wave C exp(i((xi, x) + w tau)) annihilated by ∇^sign + m.

    With ``w = branch*|xi| + i m`` the symbol of ∇^sign + m reduces to
    i(branch*|xi| ± i xi), so ``C = (branch*|xi| ∓ i xi)∘D`` projects the
    amplitude D onto its kernel.
    """
    xi = np.asarray(xi, float)
    m = complex(m)
    k = branch * float(np.linalg.norm(xi))
    w = k + 1j * m
    D = Biquaternion(1.0) if D is None else D
    C = (Biquaternion(k, -sign * 1j * xi) * D).components

    def ev(tau, x):
        ph = np.exp(1j * (np.asarray(x) @ xi + w * np.asarray(tau)))
        return ph[..., None] * C

    def dv(tau, x):
        ph = np.exp(1j * (np.asarray(x) @ xi + w * np.asarray(tau)))
        kv = 1j * np.concatenate([[w], xi])
        return ph[..., None, None] * kv[:, None] * C

    return BqField(ev, dv, "plane wave")


# --------------------------------------------------------------------------
# time-harmonic (gradiental) solves
# --------------------------------------------------------------------------

def helmholtz_kernel(k: float, a=1.0):
    """chi(r) = -a e^{-ikr}/(4 pi r) + (a - 1) e^{ikr}/(4 pi r); (Δ + k²)chi = delta."""
    a = complex(a)

    def chi(r):
        return (-a * np.exp(-1j * k * r) + (a - 1) * np.exp(1j * k * r)) / (FOUR_PI * r)

    return chi


def _harmonic_potential_many(k: float, a, F: BqField, X: np.ndarray, support,
                             q: QuadratureSpec) -> np.ndarray:
    """(chi * F)(x) for points X (P, 3); F vanishes outside the ball ``support``."""
    c, R = np.asarray(support[0], float), float(support[1])
    chi = helmholtz_kernel(k, a)
    out = np.zeros((len(X), 4), dtype=complex)
    y0, r0, w0 = ball_rule(R, q)
    for j, x in enumerate(X):
        d = float(np.linalg.norm(x - c))
        if d < R * 1.05:
            # centered at x: the 1/r singularity sits at the origin of the rule
            rr = d + R
            y1, r1, w1 = ball_rule(1.0, q)
            y, r, w = rr * y1, rr * r1, rr ** 3 * w1
            vals = F(np.zeros(len(w)), x - y)
            out[j] = (w * chi(r)) @ vals
        else:
            z = c + y0
            r = np.linalg.norm(x - z, axis=1)
            vals = F(np.zeros(len(w0)), z)
            out[j] = (w0 * chi(r)) @ vals
    return out


def harmonic_md_solve(omega: float, rho: float, sign: int, F: BqField, x, support,
                      a=1.0, q: QuadratureSpec = QuadratureSpec(),
                      h: float = DEFAULT_FD_STEP) -> Biquaternion:
    """Amplitude B solving (kappa ± ∇)∘B = F with kappa = omega + rho.

    B = (kappa ∓ ∇)(chi * F) with the Helmholtz kernel of wave number
    k = |kappa|; ``omega = 0`` gives the static equation.
    """
    kappa = float(omega) + float(rho)
    k = abs(kappa)
    if k == 0.0:
        raise ZeroWaveNumber("k = |omega + rho| must be nonzero")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(x, float)
    pts = np.vstack([x[None], x + h * np.eye(3), x - h * np.eye(3)])
    vals = _harmonic_potential_many(k, a, F, pts, support, q)
    D = (vals[1:4] - vals[4:7]) / (2 * h)
    return Biquaternion.from_components(gradiental_from_partials(kappa, -sign, vals[0], D))


def harmonic_solution_field(omega, rho, sign, F, support, a=1.0, q=QuadratureSpec(),
                            h=DEFAULT_FD_STEP) -> BqField:
    def ev(tau, x):
        x = np.asarray(x, float)
        flat = x.reshape(-1, 3)
        out = np.array([harmonic_md_solve(omega, rho, sign, F, xx, support, a, q, h).components
                        for xx in flat])
        return out.reshape(x.shape[:-1] + (4,))

    return BqField(ev, note="harmonic solution")


# --------------------------------------------------------------------------
# shock fronts
# --------------------------------------------------------------------------

def _unit(m) -> np.ndarray:
    m = np.asarray(m, float).reshape(3)
    n = float(np.linalg.norm(m))
    if abs(n - 1.0) > 1e-12:
        raise ValueError(f"front normal must be a unit vector, |m| = {n!r}")
    return m


@dataclass(frozen=True)
class ShockGap:
    """Gap [K] of a solution across a front moving along the unit vector m."""

    m: np.ndarray
    gap: Biquaternion

    def __post_init__(self):
        m = _unit(self.m)
        m.flags.writeable = False
        object.__setattr__(self, "m", m)


class ShockCheck(NamedTuple):
    residual: Biquaternion
    longitudinal: complex
    transversal: np.ndarray


def shock_gap_check(g: ShockGap, sign: int = 1) -> ShockCheck:
    """Front conditions for ∇^sign K = G: [K] = sign * i m∘[K].

    Also the split form: longitudinal ``[k] + i(m, [K])`` and transversal
    ``([K] - m(m, [K])) - i[m, [K]]`` (written for sign +1).
    """
    M = Biquaternion(0.0, g.m)
    K = g.gap
    res = K - (sign * 1j) * (M * K)
    kv = K.vector
    mk = complex(g.m @ kv)
    s = sign
    longitudinal = K.scalar + s * 1j * mk
    transversal = (kv - g.m * mk) - s * 1j * np.cross(g.m, kv)
    return ShockCheck(res, longitudinal, transversal)


def shock_constraint_matrix(m, sign: int = 1) -> np.ndarray:
    """Rows of the linear constraints on (k, K1, K2, K3).

    Scalar relation [k] = -i(m, [K]), vector relation
    [K] = i m [k] + i [m, [K]], and the tangential relation
    [K] - m(m, [K]) = i [m, [K]] (signs flip with ``sign``).
    """
    m = _unit(m)
    s = 1j * sign
    cross = np.array([[0, -m[2], m[1]], [m[2], 0, -m[0]], [-m[1], m[0], 0]])
    rows = np.zeros((7, 4), dtype=complex)
    rows[0, 0] = 1.0
    rows[0, 1:] = s * m
    rows[1:4, 0] = -s * m
    rows[1:4, 1:] = np.eye(3) - s * cross
    rows[4:7, 1:] = np.eye(3) - np.outer(m, m) - s * cross
    return rows


def shock_constraint_kernel(m, sign: int = 1) -> np.ndarray:
    """Orthonormal basis (4, d) of admissible gaps."""
    return null_space(shock_constraint_matrix(m, sign))


def random_admissible_gap(m, rng: np.random.Generator, sign: int = 1) -> ShockGap:
    basis = shock_constraint_kernel(m, sign)
    coef = rng.uniform(-1, 1, basis.shape[1]) + 1j * rng.uniform(-1, 1, basis.shape[1])
    return ShockGap(m, Biquaternion.from_components(basis @ coef))


def shock_wave_field(m, C: Biquaternion) -> BqField:
    """K = H(tau - (m, x)) C: a front moving along m at unit speed."""
    m = _unit(m)
    c = C.components

    def ev(tau, x):
        s = np.asarray(tau) - np.asarray(x) @ m
        return (s >= 0)[..., None] * c

    return BqField(ev, note="shock")


def measure_gap(field: BqField, p, m, delta: float = 1e-6) -> ShockGap:
    """[K] at a front point p: value behind the front minus value ahead."""
    p = as_point(p)
    m = _unit(m)
    behind = field(np.asarray(p.tau), p.x - delta * m)
    ahead = field(np.asarray(p.tau), p.x + delta * m)
    return ShockGap(m, Biquaternion.from_components(behind - ahead))
