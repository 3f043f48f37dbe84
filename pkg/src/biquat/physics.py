"""Maxwell equations, EM shock fronts and harmonic spinors in biquaternion form.

Time is ``tau = c t`` with ``c = 1 / sqrt(eps mu)``.  The intensity is
``A = sqrt(eps) E + i sqrt(mu) H`` and the charge-current
``Theta = i rho + J`` with ``rho = rho_E / sqrt(eps)``, ``J = sqrt(mu) j_E``;
Maxwell's equations read ∇⁺A + Theta = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .algebra import Biquaternion, bq_mul, energy_impulse
from .diffops import (
    DEFAULT_FD_STEP,
    BqField,
    bigradient,
    field_partials,
    gradiental_apply,
    md_operator,
)
from .errors import ZeroWaveNumber, ZeroWaveVector
from .quadrature import QuadratureSpec, ball_rule, gauss_interval, sphere_rule
from .transforms import as_point
from .waves import ShockGap, shock_gap_check, shock_constraint_kernel

VecField = Callable[[np.ndarray, np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# electromagnetic fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EMField:
    """Real field intensities E(tau, x), H(tau, x) in a medium (eps, mu)."""

    E: VecField
    H: VecField
    eps: float = 1.0
    mu: float = 1.0
    partials: Optional[Callable] = None  # (tau, x) -> (dE, dH), each (..., 4, 3)

    def __post_init__(self):
        if not (self.eps > 0 and self.mu > 0 and math.isfinite(self.eps * self.mu)):
            raise ValueError("eps and mu must be positive and finite")

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(self.eps * self.mu)


@dataclass(frozen=True)
class ChargeCurrent:
    """Charge density rho_E(tau, x) and current density j_E(tau, x)."""

    rho_E: Callable[[np.ndarray, np.ndarray], np.ndarray]
    j_E: VecField


def _real3(v):
    v = np.asarray(v)
    if np.iscomplexobj(v) and np.any(v.imag != 0):
        raise ValueError("E and H must be real")
    return v.real.astype(float)


def intensity_field(em: EMField) -> BqField:
    se, sm = math.sqrt(em.eps), math.sqrt(em.mu)

    def ev(tau, x):
        E = _real3(em.E(tau, x))
        H = _real3(em.H(tau, x))
        out = np.zeros(np.shape(tau) + (4,), dtype=complex)
        out[..., 1:] = se * E + 1j * sm * H
        return out

    dv = None
    if em.partials is not None:
        def dv(tau, x):
            dE, dH = em.partials(tau, x)
            out = np.zeros(np.shape(tau) + (4, 4), dtype=complex)
            out[..., 1:] = se * np.asarray(dE) + 1j * sm * np.asarray(dH)
            return out

    return BqField(ev, dv, "intensity")


def intensity_bq(em: EMField, p) -> Biquaternion:
    """A = 0 + sqrt(eps) E + i sqrt(mu) H at p."""
    return intensity_field(em).at(p)


def charge_current_field(cc: ChargeCurrent, eps: float = 1.0, mu: float = 1.0) -> BqField:
    se, sm = math.sqrt(eps), math.sqrt(mu)

    def ev(tau, x):
        out = np.zeros(np.shape(tau) + (4,), dtype=complex)
        out[..., 0] = 1j * np.asarray(cc.rho_E(tau, x)) / se
        out[..., 1:] = sm * np.asarray(cc.j_E(tau, x))
        return out

    return BqField(ev, note="charge-current")


def charge_current_bq(cc: ChargeCurrent, eps: float, mu: float, p) -> Biquaternion:
    """Theta = i rho_E / sqrt(eps) + sqrt(mu) j_E at p."""
    return charge_current_field(cc, eps, mu).at(p)


def em_plane_wave(direction, E0, eps: float = 1.0, mu: float = 1.0, k: float = 1.0,
                  phase: float = 0.0) -> EMField:
    """Vacuum-type plane wave travelling along ``direction``.

    E = E0 cos(k((n, x) - tau) + phase), H = sqrt(eps/mu) [n, E].
    """
    n = np.asarray(direction, float)
    n = n / np.linalg.norm(n)
    E0 = np.asarray(E0, float)
    if abs(float(n @ E0)) > 1e-12 * (1 + np.linalg.norm(E0)):
        raise ValueError("E0 must be orthogonal to the direction of travel")
    H0 = math.sqrt(eps / mu) * np.cross(n, E0)

    def arg(tau, x):
        return k * (np.asarray(x) @ n - np.asarray(tau)) + phase

    def wave(tau, x):
        return np.cos(arg(tau, x))[..., None]

    def partials(tau, x):
        # d/dz cos(arg) = -sin(arg) * k * (-1, n)
        g = -np.sin(arg(tau, x))[..., None, None] * (k * np.concatenate([[-1.0], n]))[:, None]
        return g * E0, g * H0

    return EMField(lambda t, x: wave(t, x) * E0, lambda t, x: wave(t, x) * H0, eps, mu, partials)


def poynting(em: EMField, p) -> np.ndarray:
    """c^{-1} E x H, the momentum density."""
    p = as_point(p)
    E = _real3(em.E(np.asarray(p.tau), p.x))
    H = _real3(em.H(np.asarray(p.tau), p.x))
    return np.cross(E, H) / em.c


def poynting_from_intensity(A: Biquaternion) -> np.ndarray:
    """P from ½[conj(A), A] = iP, the imaginary vector part of ½A∘A*."""
    V = A.vector
    return (0.5 * np.cross(np.conj(V), V)).imag


# --------------------------------------------------------------------------
# residuals
# --------------------------------------------------------------------------

class MaxwellResidual(NamedTuple):
    total: Biquaternion
    scalar: complex
    vector: np.ndarray


class ModifiedMaxwellResidual(NamedTuple):
    """``charge = rho - div A + ∂tau a`` and ``current = ∂tau A + i rot A + J - grad a``.

    ``total`` is ∇⁺(i a + A) + Theta computed through the bigradient; its
    scalar part equals ``i * charge`` and its vector part ``current``.
    """

    total: Biquaternion
    charge: complex
    current: np.ndarray


def maxwell_residual(A: BqField, theta: BqField, p, modified_a: Optional[Callable] = None,
                     h: float | None = None):
    """∇⁺A + Theta at p, split into scalar and vector parts.

    With ``modified_a`` (a scalar field a(tau, x)) the residual of the
    modified system with the scalar field is returned instead.
    """
    p = as_point(p)
    if modified_a is None:
        r = bigradient(1, A, p, h) + theta.at(p)
        return MaxwellResidual(r, r.scalar, r.vector.copy())

    def combined(tau, x):
        out = np.array(A(tau, x), dtype=complex)
        out[..., 0] = 1j * np.asarray(modified_a(tau, x))
        return out

    total = bigradient(1, BqField(combined), p, h if h is not None else DEFAULT_FD_STEP) + theta.at(p)

    # direct route from partials of A and a
    step = h if h is not None else DEFAULT_FD_STEP
    D = field_partials(A, p.tau, p.x, h)
    a_field = BqField.from_scalar(modified_a)
    Da = field_partials(a_field, p.tau, p.x, step)[:, 0]
    th = theta.at(p)
    rho = th.scalar / 1j
    divA = D[1, 1] + D[2, 2] + D[3, 3]
    rot = np.array([D[2, 3] - D[3, 2], D[3, 1] - D[1, 3], D[1, 2] - D[2, 1]])
    charge = rho - divA + Da[0]
    current = D[0, 1:] + 1j * rot + th.vector - Da[1:]
    return ModifiedMaxwellResidual(total, complex(charge), current)


def charge_conservation_residual(theta: BqField, p, h: float | None = None) -> complex:
    """∂tau rho + div J, read off the scalar part of ∇⁻Theta = i(∂tau rho + div J)."""
    return complex(bigradient(-1, theta, p, h).scalar / 1j)


# --------------------------------------------------------------------------
# shock fronts
# --------------------------------------------------------------------------

class EMShockCheck(NamedTuple):
    """Residuals of the front conditions for EM gaps.

    ``e_form``/``h_form``: [E] - c[[B], m] and [H] - c[m, [D]];
    ``d_form``/``b_form``: [D] - c^{-1}[[H], m] and [B] - c^{-1}[m, [E]];
    ``transversality``: (m, [A]); ``bq``: [A] - i m∘[A].
    """

    e_form: np.ndarray
    h_form: np.ndarray
    d_form: np.ndarray
    b_form: np.ndarray
    transversality: complex
    transversal: bool
    bq: Biquaternion

    @property
    def admissible(self) -> bool:
        worst = max(np.max(np.abs(self.e_form)), np.max(np.abs(self.h_form)), self.bq.norm())
        return self.transversal and worst <= 1e-10


def em_shock_check(gapE, gapH, m, eps: float = 1.0, mu: float = 1.0,
                   tol: float = 1e-10) -> EMShockCheck:
    m = np.asarray(m, float)
    E = np.asarray(gapE, float)
    H = np.asarray(gapH, float)
    c = 1.0 / math.sqrt(eps * mu)
    D, B = eps * E, mu * H
    A = Biquaternion(0.0, math.sqrt(eps) * E + 1j * math.sqrt(mu) * H)
    check = shock_gap_check(ShockGap(m, A))
    trans = complex(m @ A.vector)
    return EMShockCheck(
        e_form=E - c * np.cross(B, m),
        h_form=H - c * np.cross(m, D),
        d_form=D - np.cross(H, m) / c,
        b_form=B - np.cross(m, E) / c,
        transversality=trans,
        transversal=abs(trans) <= tol * (1.0 + A.norm()),
        bq=check.residual,
    )


def em_gap_from_kernel(m, rng: np.random.Generator, eps: float = 1.0, mu: float = 1.0):
    """Random real gaps ([E], [H]) built from the admissible-gap kernel with zero scalar part."""
    basis = shock_constraint_kernel(m)
    # combination with vanishing scalar part
    s = basis[0]
    coef = np.array([-s[1], s[0]]) if np.abs(s).max() > 1e-14 else np.array([1.0, 0.0])
    coef = coef * (rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    A = basis @ coef
    return A[1:].real / math.sqrt(eps), A[1:].imag / math.sqrt(mu)


# --------------------------------------------------------------------------
# spinors
# --------------------------------------------------------------------------

def spinor_energy_impulse(S: Biquaternion) -> Biquaternion:
    """S∘S* without the factor ½ used for field energy densities."""
    return S * S.conj()


@dataclass(frozen=True)
class XiSpinor:
    """Elementary spinor exp(i((xi, x) - rho tau + s|xi| tau)) (i + xi/|xi|) / sqrt 2.

    It is annihilated by ∇^s + i rho.
    """

    xi: np.ndarray
    rho: float
    sign: int

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float).reshape(3)
        if not np.all(np.isfinite(xi)) or np.linalg.norm(xi) == 0.0:
            raise ZeroWaveVector("wave vector xi must be nonzero")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def amplitude(self) -> np.ndarray:
        n = np.linalg.norm(self.xi)
        return np.concatenate([[1j], self.xi / n]) / math.sqrt(2.0)

    @property
    def frequency(self) -> float:
        """Coefficient of tau in the phase."""
        return -self.rho + self.sign * float(np.linalg.norm(self.xi))

    @property
    def phase_speed(self) -> float:
        """V = 1 ± rho/|xi| as reported for the pair of waves."""
        return 1.0 + self.sign * self.rho / float(np.linalg.norm(self.xi))

    @property
    def regime(self) -> str:
        V = self.phase_speed
        return "luminal" if V == 1.0 else ("supersonic" if V > 1.0 else "subsonic")

    @property
    def field(self) -> BqField:
        amp = self.amplitude
        xi, w = self.xi, self.frequency
        kvec = 1j * np.concatenate([[w], xi])

        def ev(tau, x):
            ph = np.exp(1j * (np.asarray(x) @ xi + w * np.asarray(tau)))
            return ph[..., None] * amp

        def dv(tau, x):
            ph = np.exp(1j * (np.asarray(x) @ xi + w * np.asarray(tau)))
            return ph[..., None, None] * kvec[:, None] * amp

        return BqField(ev, dv, "xi-spinor")

    def at(self, p) -> Biquaternion:
        return self.field.at(p)

    def dirac_residual(self, p, h: float | None = None) -> Biquaternion:
        """(∇^s + i rho)∘Sp at p."""
        return md_operator(1j * self.rho, self.sign, self.field, p, h)


def elementary_xi_spinor(xi, rho: float, sign: int) -> XiSpinor:
    return XiSpinor(xi, rho, sign)


@dataclass(frozen=True)
class OmegaSpinor:
    """Harmonic spinor (kappa - i k e) e^{-ik(e, x)} / (k sqrt 2), kappa = omega + rho, k = |kappa|.

    It is annihilated by the gradiental operator kappa - ∇.
    """

    omega: float
    rho: float
    e: np.ndarray

    def __post_init__(self):
        e = np.array(self.e, dtype=float).reshape(3)
        if abs(np.linalg.norm(e) - 1.0) > 1e-12:
            raise ValueError("direction e must be a unit vector")
        if float(self.omega) + float(self.rho) == 0.0:
            raise ZeroWaveNumber("k = |omega + rho| must be nonzero")
        e.flags.writeable = False
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def kappa(self) -> float:
        return self.omega + self.rho

    @property
    def k(self) -> float:
        return abs(self.kappa)

    @property
    def amplitude(self) -> np.ndarray:
        k = self.k
        return np.concatenate([[self.kappa], -1j * k * self.e]) / (k * math.sqrt(2.0))

    @property
    def field(self) -> BqField:
        amp, k, e = self.amplitude, self.k, self.e
        kvec = np.concatenate([[0.0], -1j * k * e])

        def ev(tau, x):
            ph = np.exp(-1j * k * (np.asarray(x) @ e))
            return ph[..., None] * amp

        def dv(tau, x):
            ph = np.exp(-1j * k * (np.asarray(x) @ e))
            return ph[..., None, None] * kvec[:, None] * amp

        return BqField(ev, dv, "omega-spinor")

    def at(self, x) -> Biquaternion:
        x = np.asarray(x, float)
        return Biquaternion.from_components(self.field(np.asarray(0.0), x))

    def gradiental_residual(self, x, h: float | None = None) -> Biquaternion:
        """(kappa - ∇)∘Psi0 at x."""
        return gradiental_apply(self.kappa, -1, self.field, x, h)


def elementary_omega_spinor(omega: float, rho: float, e) -> OmegaSpinor:
    return OmegaSpinor(omega, rho, e)


def spinor_field_convolve(C: BqField, base, x, support, q: QuadratureSpec = QuadratureSpec(),
                          time_support: Optional[tuple] = None) -> Biquaternion:
    """(base * C)(x) = ∫ base(x - y)∘C(y) dV(y) for C vanishing outside ``support``.

    ``base`` is an :class:`OmegaSpinor` (spatial convolution, x a 3-vector)
    or an :class:`XiSpinor` (spacetime convolution, x a spacetime point, C
    additionally vanishing for tau outside ``time_support``).  The spinor
    stands to the left, so derivatives act on it and the result stays in
    the kernel of the same operator for any C.
    """
    c, R = np.asarray(support[0], float), float(support[1])
    y, _, w = ball_rule(R, q)
    z = c + y
    field = base.field
    if isinstance(base, OmegaSpinor):
        x = np.asarray(x, float).reshape(3)
        S = field(np.zeros(len(w)), x - z)
        Cv = C(np.zeros(len(w)), z)
        return Biquaternion.from_components(w @ bq_mul(S, Cv))
    if time_support is None:
        raise ValueError("spacetime convolution needs a time_support interval")
    p = as_point(x)
    s, ws = gauss_interval(q.n_r, *map(float, time_support))
    total = np.zeros(4, dtype=complex)
    for sk, wk in zip(s, ws):
        S = field(np.full(len(w), p.tau - sk), p.x - z)
        Cv = C(np.full(len(w), sk), z)
        total += wk * (w @ bq_mul(S, Cv))
    return Biquaternion.from_components(total)


def nonoriented_spinor_field(p_density: Callable, omega: float, rho: float, x,
                             C: Optional[BqField] = None, support=None,
                             q: QuadratureSpec = QuadratureSpec()) -> Biquaternion:
    """∫_{|e|=1} p(e) (Psi0(., e) * C)(x) dS(e); C = None means the delta (no convolution)."""
    dirs, ws = sphere_rule(q.n_s, q.sphere)
    pv = np.asarray(p_density(dirs))
    total = np.zeros(4, dtype=complex)
    for e, w, pe in zip(dirs, ws, pv):
        if pe == 0:
            continue
        e = e / np.linalg.norm(e)
        base = OmegaSpinor(omega, rho, e)
        if C is None:
            val = base.at(x).components
        else:
            val = spinor_field_convolve(C, base, x, support, q).components
        total += w * pe * val
    return Biquaternion.from_components(total)


def spinor_summary(S: Biquaternion) -> dict:
    """Norm, pseudonorm and energy-impulse of a spinor value."""
    xi = spinor_energy_impulse(S)
    return {
        "norm": S.norm(),
        "pseudonorm": S.pseudonorm(),
        "xi": xi,
        "xi_norm": xi.norm(),
        "xi_norm2": xi.norm() ** 2,
        "half_xi": energy_impulse(S).xi,
    }
