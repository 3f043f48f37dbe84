"""Seeded property suites behind ``biquat verify``.

Every identity is checked on ``n`` random cases drawn from numpy's PCG64
generator (``numpy.random.default_rng``), seeded per suite with
``[seed, suite_index]`` so a suite's numbers do not depend on which other
suites run.  Quadrature-backed identities are expensive and use
``min(n, cap)`` cases; the report records the count actually used.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import algebra as alg
from . import diffops as dops
from . import physics as phys
from . import transforms as tr
from . import waves as wv
from .algebra import Biquaternion, random_biquaternion
from .errors import DegenerateAxis
from .quadrature import QuadratureSpec

SUITES = ("algebra", "transforms", "diffops", "waves", "physics")
SCHEMA = "1"


@dataclass
class IdentityResult:
    suite: str
    identity: str
    cases: int
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "identity": self.identity,
            "cases": self.cases,
            "max_residual": float(self.max_residual),
            "tol": float(self.tol),
            "pass": self.passed,
        }


class _Suite:
    def __init__(self, name: str, rng: np.random.Generator, n: int):
        self.name = name
        self.rng = rng
        self.n = n
        self.results: list[IdentityResult] = []

    def check(self, identity: str, tol: float, case: Callable[[np.random.Generator], float],
              cap: int | None = None):
        count = self.n if cap is None else min(self.n, cap)
        if count == 0:
            return
        worst = 0.0
        for _ in range(count):
            r = float(case(self.rng))
            if not math.isfinite(r):
                r = math.inf
            worst = max(worst, r)
        self.results.append(IdentityResult(self.name, identity, count, worst, tol))


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _real_quaternion(rng) -> Biquaternion:
    return Biquaternion.from_components(rng.uniform(-1, 1, 4).astype(complex))


def _selfconjugated(rng) -> Biquaternion:
    return Biquaternion(rng.uniform(-1, 1), 1j * rng.uniform(-1, 1, 3))


def _point(rng) -> tr.SpacetimePoint:
    return tr.SpacetimePoint(rng.uniform(-1, 1), rng.uniform(-1, 1, 3))


def _poincare(rng) -> tr.PoincareOp:
    return tr.PoincareOp(rng.uniform(-np.pi, np.pi), rng.uniform(-1, 1), _unit(rng))


def _d(a: Biquaternion, b: Biquaternion) -> float:
    return (a - b).norm()


def _poly_field(rng) -> dops.BqField:
    """Random biquaternion polynomial of degree <= 2 in (tau, x) with exact partials."""
    c0 = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
    c1 = rng.uniform(-1, 1, (4, 4)) + 1j * rng.uniform(-1, 1, (4, 4))
    c2 = rng.uniform(-1, 1, (4, 4, 4)) + 1j * rng.uniform(-1, 1, (4, 4, 4))
    c2 = 0.5 * (c2 + c2.transpose(1, 0, 2))

    def z_of(tau, x):
        return np.concatenate([np.asarray(tau, float)[..., None], np.asarray(x, float)], axis=-1)

    def ev(tau, x):
        z = z_of(tau, x)
        return c0 + np.einsum("...u,uc->...c", z, c1) + np.einsum("...u,...v,uvc->...c", z, z, c2)

    def dv(tau, x):
        z = z_of(tau, x)
        return c1 + 2 * np.einsum("...v,uvc->...uc", z, c2)

    return dops.BqField(ev, dv, "polynomial")


def _gauss_field(rng) -> dops.BqField:
    """exp(-|z - z0|^2 / 2 + i (a, z)) times a constant biquaternion, with exact partials."""
    z0 = rng.uniform(-0.5, 0.5, 4)
    a = rng.uniform(-1, 1, 4)
    c = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)

    def phase(tau, x):
        z = np.concatenate([np.asarray(tau, float)[..., None], np.asarray(x, float)], axis=-1)
        d = z - z0
        return z, d, np.exp(-0.5 * np.sum(d * d, -1) + 1j * (z @ a))

    def ev(tau, x):
        return phase(tau, x)[2][..., None] * c

    def dv(tau, x):
        _, d, f = phase(tau, x)
        return (f[..., None] * (-d + 1j * a))[..., :, None] * c

    return dops.BqField(ev, dv, "gaussian")


def _rand_test_function(rng) -> wv.TestFunction:
    return wv.TestFunction(
        tuple(rng.uniform(-0.2, 0.2, 4)), tuple(rng.uniform(0.8, 1.3, 4)), rng.uniform(0.5, 2.0))


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def suite_algebra(s: _Suite):
    rb = random_biquaternion

    def assoc(rng):
        F, G, H = rb(rng), rb(rng), rb(rng)
        return _d((F * G) * H, F * (G * H)) / (1 + F.norm() * G.norm() * H.norm())

    def commut(rng):
        F, G = rb(rng), rb(rng)
        return _d(alg.commutator(F, G), Biquaternion(0.0, 2 * np.cross(F.vector, G.vector)))

    def jacobi(rng):
        F, G, H = rb(rng), rb(rng), rb(rng)
        c = alg.commutator
        return (c(c(F, G), H) + c(c(H, F), G) + c(c(G, H), F)).norm()

    def conj_rev(rng):
        F, G = rb(rng), rb(rng)
        return max(_d((F * G).conj(), G.conj() * F.conj()),
                   _d(alg.mutual(F * G), alg.mutual(G) * alg.mutual(F)))

    def norm_law(rng):
        F = _real_quaternion(rng)
        n2 = F.norm() ** 2
        return max(_d(F.conj() * F, Biquaternion(n2)), _d(F * F.conj(), Biquaternion(n2)))

    def pseudo_law(rng):
        F = _selfconjugated(rng)
        p2 = alg.pseudonorm2(F)
        return max(_d(F.cconj() * F, Biquaternion(p2)), _d(F * F.cconj(), Biquaternion(p2)))

    def inverse(rng):
        while True:
            F = rb(rng)
            if abs(alg.scalar_product(F, F)) > 1e-3:
                break
        Fi = alg.inverse(F)
        return max(_d(F * Fi, alg.ONE), _d(Fi * F, alg.ONE))

    def commutator_scalar(rng):
        return abs(alg.commutator(rb(rng), rb(rng)).scalar)

    s.check("associativity", 1e-12, assoc)
    s.check("commutator_cross", 1e-12, commut)
    s.check("commutator_scalar_zero", 1e-12, commutator_scalar)
    s.check("jacobi", 1e-12, jacobi)
    s.check("conjugate_of_product", 1e-12, conj_rev)
    s.check("norm_law_real", 1e-12, norm_law)
    s.check("pseudonorm_law_selfconjugated", 1e-12, pseudo_law)
    s.check("inverse_roundtrip", 1e-10, inverse)


def suite_transforms(s: _Suite):
    def rotor_unit(rng):
        U = tr.Rotor(rng.uniform(-np.pi, np.pi), _unit(rng)).bq
        return _d(U * U.conj(), alg.ONE)

    def boost_unit(rng):
        L = tr.Boost(rng.uniform(-2, 2), _unit(rng)).bq
        return _d(L * alg.mutual(L), alg.ONE)

    def rotation(rng):
        U = tr.Rotor(rng.uniform(-np.pi, np.pi), _unit(rng))
        Z = _point(rng)
        a = tr.apply_rotation(U, Z)
        b = tr.rotation_closed_form(U, Z)
        return max(float(np.max(np.abs(a.as_array() - b.as_array()))),
                   abs(a.tau - Z.tau), abs(np.linalg.norm(a.x) - np.linalg.norm(Z.x)))

    def boost_pseudonorm(rng):
        Z = _point(rng)
        Zp = tr.apply_boost(tr.Boost(rng.uniform(-1, 1), _unit(rng)), Z)
        return abs(Zp.pseudonorm2() - Z.pseudonorm2())

    def poincare(rng):
        P, Z = _poincare(rng), _point(rng)
        Zp = tr.apply_poincare(P, Z)
        back = tr.apply_poincare(P, Zp, inverse=True)
        return max(abs(Zp.pseudonorm2() - Z.pseudonorm2()),
                   float(np.max(np.abs(back.as_array() - Z.as_array()))))

    def poincare_unit(rng):
        p = _poincare(rng).bq
        return max(_d(p * alg.mutual(p), alg.ONE), _d(p.conj() * alg.mutual(p.conj()), alg.ONE))

    def relativistic(rng):
        v, e, Z = rng.uniform(-0.9, 0.9), _unit(rng), _point(rng)
        a = tr.relativistic_map(v, e, Z)
        b = tr.apply_boost(tr.Boost.from_velocity(v, e), Z)
        back = tr.relativistic_map(v, e, a, inverse=True)
        return max(float(np.max(np.abs(a.as_array() - b.as_array()))),
                   float(np.max(np.abs(back.as_array() - Z.as_array()))))

    def rotor_compose(rng):
        U1 = tr.Rotor(rng.uniform(-np.pi, np.pi), _unit(rng))
        U2 = tr.Rotor(rng.uniform(-np.pi, np.pi), _unit(rng))
        Z = _point(rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateAxis)
            U3 = tr.compose_rotors(U1, U2)
        a = tr.apply_rotation(U3, Z)
        b = tr.apply_rotation(U1, tr.apply_rotation(U2, Z))
        return float(np.max(np.abs(a.as_array() - b.as_array())))

    def poincare_compose(rng):
        e = _unit(rng)
        P1 = tr.PoincareOp(rng.uniform(-1, 1), rng.uniform(-1, 1), e)
        P2 = tr.PoincareOp(rng.uniform(-1, 1), rng.uniform(-1, 1), e)
        comp = tr.compose_poincare(P1, P2)
        Z = _point(rng)
        a = tr.apply_poincare(comp.op, Z)
        b = tr.apply_poincare(P1, tr.apply_poincare(P2, Z))
        return max(_d(comp.op.bq, comp.product),
                   float(np.max(np.abs(a.as_array() - b.as_array()))) / max(1.0, a.tau ** 2))

    def covariance(rng):
        K = _gauss_field(rng)
        sign = 1 if rng.uniform() < 0.5 else -1
        P = _poincare(rng)
        G = dops.BqField(lambda t, x: dops.bigradient_from_partials(sign, K.partials(t, x)))
        Kp = dops.transform_field(P, K, sign, "potential")
        Gp = dops.transform_field(P, G, sign, "source")
        p = _point(rng)
        return _d(dops.bigradient(sign, Kp, p), Gp.at(p))

    s.check("rotor_unitary", 1e-12, rotor_unit)
    s.check("boost_lorentz_unit", 1e-12, boost_unit)
    s.check("poincare_lorentz_unit", 1e-12, poincare_unit)
    s.check("rotation_closed_form", 1e-12, rotation)
    s.check("boost_pseudonorm", 1e-12, boost_pseudonorm)
    s.check("poincare_pseudonorm_and_inverse", 1e-12, poincare)
    s.check("relativistic_formulas", 1e-12, relativistic)
    s.check("rotor_composition_action", 1e-12, rotor_compose)
    s.check("poincare_same_axis_composition", 1e-12, poincare_compose)
    s.check("biwave_covariance", 1e-10, covariance)


def suite_diffops(s: _Suite):
    def matrix_path(rng):
        F = _poly_field(rng)
        p = _point(rng)
        sign = 1 if rng.uniform() < 0.5 else -1
        return float(np.max(np.abs(dops.matrix_apply(sign, F, p)
                                   - dops.bigradient(sign, F, p).components)))

    def symbol(rng):
        # the identity has no random input; repeated for a uniform report
        C = dops.symbol_product(-1, 1)
        D = dops.symbol_product(1, -1)
        target = np.zeros_like(C)
        for mu in range(4):
            target[mu, mu] = [1, -1, -1, -1][mu] * np.eye(4)
        return float(max(np.max(np.abs(C - target)), np.max(np.abs(D - target))))

    def quadratic_factorization(rng):
        F = _poly_field(rng)
        F = dops.BqField(F.evaluator, None, "polynomial")
        r = dops.dalembert_factorization_check(F, _point(rng), 1e-2)
        return _d(r.lhs, r.rhs)

    def partials_order(rng):
        F = _gauss_field(rng)
        e = dops.partials_convergence(F, _point(rng), (1e-2, 5e-3))
        return abs(e[0] / e[1] - 4.0) if e[1] > 1e-13 else 0.0

    def commuting(rng):
        F = _gauss_field(rng)
        p = _point(rng)
        a = dops.bigradient(-1, dops.bigradient_field(1, F), p, 1e-3)
        b = dops.bigradient(1, dops.bigradient_field(-1, F), p, 1e-3)
        return _d(a, b)

    def kgfsh_lemma(rng):
        F = _gauss_field(rng)
        m = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

        def u(t, x):
            return F(t, x)[..., 0]

        p = _point(rng)
        return abs(dops.kgfsh_nested(m, u, p, 1e-3).scalar - dops.kgfsh_apply(m, u, p, 1e-3))

    s.check("matrix_vs_biquaternion", 1e-12, matrix_path)
    s.check("operator_symbol_identity", 0.0, symbol, cap=1)
    s.check("factorization_quadratic", 1e-7, quadratic_factorization)
    s.check("partials_order2_ratio", 0.4, partials_order)
    s.check("bigradients_commute", 1e-5, commuting)
    s.check("kgfsh_lemma", 1e-4, kgfsh_lemma)


def suite_waves(s: _Suite):
    q = QuadratureSpec(64, 24)

    def shock(rng):
        m = _unit(rng)
        g = wv.random_admissible_gap(m, rng)
        c = wv.shock_gap_check(g)
        return max(c.residual.norm(), abs(c.longitudinal), float(np.max(np.abs(c.transversal))))

    def shock_equiv(rng):
        m = _unit(rng)
        # a random gap has zero residual iff it lies in the constraint kernel
        K = random_biquaternion(rng)
        B = wv.shock_constraint_kernel(m)
        proj = B @ (B.conj().T @ K.components)
        res = wv.shock_gap_check(wv.ShockGap(m, Biquaternion.from_components(proj))).residual.norm()
        T = Biquaternion(0.0, m)
        image = 0.5 * (K + 1j * (T * K))
        return max(res, _d(Biquaternion.from_components(B @ (B.conj().T @ image.components)), image))

    def pairing_linear(rng):
        f1, f2 = _rand_test_function(rng), _rand_test_function(rng)
        a, b = complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-1, 1, 2))
        m = 1j * rng.uniform(-1, 1)
        kern = wv.ConeLayerKernel(m)
        lo = min(f1.cone_range()[0], f2.cone_range()[0])
        hi = max(f1.cone_range()[1], f2.cone_range()[1])
        combo = wv.pair_kernel(kern, lambda z: a * f1(z) + b * f2(z), (lo, hi), q)
        sep = (a * wv.pair_kernel(kern, f1, (lo, hi), q) + b * wv.pair_kernel(kern, f2, (lo, hi), q))
        return abs(combo - sep)

    def constant(rng):
        c = random_biquaternion(rng)
        tau = rng.uniform(0.1, 2.0)
        p = [tau, *rng.uniform(-1, 1, 3)]
        val = wv.retarded_convolve(wv.ConeLayerKernel(), dops.BqField.constant(c), p, q)
        return _d(val, c * (tau * tau / 2))

    def distribution(rng):
        phi = _rand_test_function(rng)
        return abs(wv.wave_distribution_check(phi, q) / phi.at_origin() - 1)

    def kgfsh_distribution(rng):
        phi = _rand_test_function(rng)
        return abs(wv.kgfsh_distribution_check(1j * rng.uniform(-2, 2), phi, q) / phi.at_origin() - 1)

    def plane_kirchhoff(rng):
        sign = 1 if rng.uniform() < 0.5 else -1
        K = wv.plane_wave_solution(sign, rng.uniform(-1, 1, 3), random_biquaternion(rng))
        K0 = dops.BqField(lambda t, x: K(np.zeros_like(t), x))
        p = [rng.uniform(0.2, 1.5), *rng.uniform(-1, 1, 3)]
        got = wv.biwave_solve(sign, None, K0, p, QuadratureSpec(32, 12))
        return _d(got, K.at(p)) / K.at(p).norm()

    s.check("shock_kernel_admissible", 1e-12, shock)
    s.check("shock_constraints_equivalence", 1e-12, shock_equiv)
    s.check("cone_pairing_linearity", 1e-10, pairing_linear, cap=20)
    s.check("retarded_constant_source", 1e-8, constant, cap=20)
    s.check("wave_fundamental_distribution", 1e-3, distribution, cap=5)
    s.check("kgfsh_fundamental_distribution", 1e-3, kgfsh_distribution, cap=5)
    s.check("kirchhoff_plane_wave", 1e-3, plane_kirchhoff, cap=5)


def suite_physics(s: _Suite):
    def xi_spinor(rng):
        sp = phys.elementary_xi_spinor(rng.uniform(-2, 2, 3), rng.uniform(-2, 2),
                                       1 if rng.uniform() < 0.5 else -1)
        S = sp.at(_point(rng))
        return max(abs(S.norm() - 1), abs(S.pseudonorm()))

    def xi_dirac(rng):
        sp = phys.elementary_xi_spinor(rng.uniform(-2, 2, 3), rng.uniform(-2, 2),
                                       1 if rng.uniform() < 0.5 else -1)
        return sp.dirac_residual(_point(rng)).norm()

    def xi_energy(rng):
        xi = rng.uniform(-2, 2, 3)
        sp = phys.elementary_xi_spinor(xi, rng.uniform(-2, 2), 1)
        X = phys.spinor_energy_impulse(sp.at(_point(rng)))
        target = Biquaternion(1.0, -1j * xi / np.linalg.norm(xi))
        return max(_d(X, target), abs(X.norm() ** 2 - 2), abs(X.pseudonorm()))

    def omega_spinor(rng):
        omega, rho = rng.uniform(-2, 2), rng.uniform(-2, 2)
        e = _unit(rng)
        sp = phys.elementary_omega_spinor(omega, rho, e)
        x = rng.uniform(-1, 1, 3)
        S = sp.at(x)
        X = phys.spinor_energy_impulse(S)
        target = Biquaternion(1.0, -1j * e * np.sign(omega + rho))
        return max(abs(S.norm() - 1), abs(S.pseudonorm()), _d(X, target),
                   sp.gradiental_residual(x).norm())

    def em_energy(rng):
        E, H = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        eps, mu = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        em = phys.EMField(lambda t, x: E, lambda t, x: H, eps, mu)
        p = _point(rng)
        A = phys.intensity_bq(em, p)
        ei = alg.energy_impulse(A)
        W = 0.5 * (eps * E @ E + mu * H @ H)
        return max(abs(ei.W - W), float(np.max(np.abs(ei.P - phys.poynting(em, p)))),
                   float(np.max(np.abs(phys.poynting_from_intensity(A) - phys.poynting(em, p)))),
                   0.0 if ei.W >= 0 else 1.0)

    def em_shock(rng):
        m = _unit(rng)
        eps, mu = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        E, H = phys.em_gap_from_kernel(m, rng, eps, mu)
        c = phys.em_shock_check(E, H, m, eps, mu)
        worst = max(float(np.max(np.abs(v))) for v in (c.e_form, c.h_form, c.d_form, c.b_form))
        return max(worst, c.bq.norm(), abs(c.transversality))

    def em_longitudinal(rng):
        m = _unit(rng)
        c = phys.em_shock_check(m * rng.uniform(0.5, 1.5), np.zeros(3), m)
        return 0.0 if not c.admissible else 1.0

    def maxwell_plane(rng):
        n = _unit(rng)
        E0 = np.cross(n, _unit(rng))
        em = phys.em_plane_wave(n, E0, rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2))
        A = phys.intensity_field(em)
        return phys.maxwell_residual(A, dops.BqField.constant(0.0), _point(rng)).total.norm()

    def maxwell_covariance(rng):
        n = _unit(rng)
        em = phys.em_plane_wave(n, np.cross(n, _unit(rng)), 1.0, 1.0, rng.uniform(0.5, 2))
        A = phys.intensity_field(em)
        Ap = dops.transform_field(_poincare(rng), A, 1, "potential")
        return dops.bigradient(1, Ap, _point(rng)).norm()

    s.check("xi_spinor_norm_pseudonorm", 1e-12, xi_spinor)
    s.check("xi_spinor_dirac_residual", 1e-10, xi_dirac)
    s.check("xi_spinor_energy_impulse", 1e-12, xi_energy)
    s.check("omega_spinor_identities", 1e-12, omega_spinor)
    s.check("em_energy_poynting", 1e-12, em_energy)
    s.check("em_shock_conditions", 1e-12, em_shock)
    s.check("em_longitudinal_rejected", 0.0, em_longitudinal)
    s.check("maxwell_plane_wave", 1e-10, maxwell_plane)
    s.check("maxwell_covariance", 1e-10, maxwell_covariance)


_RUNNERS = {
    "algebra": suite_algebra,
    "transforms": suite_transforms,
    "diffops": suite_diffops,
    "waves": suite_waves,
    "physics": suite_physics,
}


def run(suites: Iterable[str], n: int, seed: int, tol: float | None = None) -> dict:
    """Run the named suites and return the JSON-ready report."""
    names = list(SUITES) if "all" in suites else list(suites)
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
    if n < 0:
        raise ValueError("n must be >= 0")
    results: list[IdentityResult] = []
    for name in names:
        rng = np.random.default_rng([seed, SUITES.index(name)])
        s = _Suite(name, rng, n)
        with np.errstate(all="ignore"):
            _RUNNERS[name](s)
        results.extend(s.results)
    if tol is not None:
        for r in results:
            r.tol = tol
    return {
        "schema": SCHEMA,
        "generator": "numpy PCG64",
        "seed": seed,
        "n": n,
        "suites": names,
        "tol_override": tol,
        "results": [r.as_dict() for r in results],
        "failed": [f"{r.suite}.{r.identity}" for r in results if not r.passed],
        "pass": all(r.passed for r in results),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
