import math

import numpy as np
import pytest

from biquat import diffops as dops
from biquat import physics as phys
from biquat.algebra import Biquaternion, energy_impulse
from biquat.errors import ZeroWaveNumber, ZeroWaveVector
from biquat.quadrature import QuadratureSpec
from biquat.sources import charge_pulse, gaussian_source

Q = QuadratureSpec(16, 6)


def unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def const_em(E, H, eps=1.0, mu=1.0):
    return phys.EMField(lambda t, x: np.asarray(E, float), lambda t, x: np.asarray(H, float), eps, mu)


def test_em_field_validation():
    with pytest.raises(ValueError):
        const_em([1, 0, 0], [0, 0, 0], eps=0.0)
    assert const_em([0] * 3, [0] * 3, 4.0, 1.0).c == 0.5


def test_intensity_and_charge_current_frozen():
    A = phys.intensity_bq(const_em([1, 0, 0], [0, 1, 0], eps=4.0, mu=9.0), [0, 0, 0, 0])
    assert A == Biquaternion(0, [2, 3j, 0])
    cc = phys.ChargeCurrent(lambda t, x: 2.0, lambda t, x: np.array([0.0, 0.0, 1.0]))
    th = phys.charge_current_bq(cc, 4.0, 9.0, [0, 0, 0, 0])
    assert th == Biquaternion(1j, [0, 0, 3])


def test_energy_and_poynting(rng):
    E, H = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
    eps, mu = 2.0, 0.5
    em = const_em(E, H, eps, mu)
    A = phys.intensity_bq(em, [0, 0, 0, 0])
    ei = energy_impulse(A)
    assert ei.W == pytest.approx(0.5 * (eps * E @ E + mu * H @ H))
    S = np.cross(E, H) / em.c
    np.testing.assert_allclose(phys.poynting(em, [0, 0, 0, 0]), S, atol=1e-15)
    np.testing.assert_allclose(phys.poynting_from_intensity(A), S, atol=1e-15)
    np.testing.assert_allclose(ei.P, S, atol=1e-15)


def test_plane_wave_requires_transverse_field():
    with pytest.raises(ValueError):
        phys.em_plane_wave([1, 0, 0], [1, 1, 0])


def _curl(F, tau, x, h=1e-5):
    J = np.empty((3, 3))
    for k in range(3):
        d = np.zeros(3)
        d[k] = h
        J[:, k] = (F(np.asarray(tau), x + d) - F(np.asarray(tau), x - d)) / (2 * h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def test_plane_wave_maxwell_two_routes(rng):
    n = unit(rng)
    eps, mu, k = 2.0, 0.7, 1.3
    em = phys.em_plane_wave(n, np.cross(n, unit(rng)), eps, mu, k, 0.4)
    A = phys.intensity_field(em)
    zero = dops.BqField.constant(0.0)
    for _ in range(5):
        p = rng.uniform(-1, 1, 4)
        assert phys.maxwell_residual(A, zero, p).total.norm() < 1e-12
        # vector form with tau = c t: rot H = eps c dE/dtau, rot E = -mu c dH/dtau
        h = 1e-5
        t, x = p[0], p[1:]
        dE = (em.E(np.asarray(t + h), x) - em.E(np.asarray(t - h), x)) / (2 * h)
        dH = (em.H(np.asarray(t + h), x) - em.H(np.asarray(t - h), x)) / (2 * h)
        c = em.c
        np.testing.assert_allclose(_curl(em.H, t, x), eps * c * dE, atol=1e-8)
        np.testing.assert_allclose(_curl(em.E, t, x), -mu * c * dH, atol=1e-8)


def test_charge_pulse_conserves_charge():
    th = charge_pulse(1.0, [0, 0, 0], 0.5, [0.4, -0.2, 0.1]).field
    for p in ([0.3, 0.1, 0.0, 0.2], [1.0, 0.4, -0.2, 0.1]):
        assert abs(phys.charge_conservation_residual(th, p, 1e-4)) < 1e-6
    static_charge_with_current = gaussian_source(Biquaternion(1j, [1.0, 0, 0]), [0, 0, 0], 0.5).field
    assert abs(phys.charge_conservation_residual(static_charge_with_current, [0.3, 0.2, 0, 0], 1e-4)) > 0.1


def test_modified_maxwell_two_routes(rng):
    n = unit(rng)
    em = phys.em_plane_wave(n, np.cross(n, unit(rng)))
    A = phys.intensity_field(em)

    def a(t, x):
        return np.sin(np.asarray(t)) * np.asarray(x)[..., 0]

    p = np.array([0.3, 0.5, -0.2, 0.1])
    res = phys.maxwell_residual(A, dops.BqField.constant(0.0), p, modified_a=a)
    # source-free plane wave: the residual is the scalar field's own contribution
    assert res.charge == pytest.approx(math.cos(0.3) * 0.5, abs=1e-6)
    np.testing.assert_allclose(res.current, [-math.sin(0.3), 0, 0], atol=1e-6)
    assert res.total.scalar == pytest.approx(1j * res.charge, abs=1e-6)
    np.testing.assert_allclose(res.total.vector, res.current, atol=1e-6)


def test_em_shock_conditions(rng):
    for _ in range(20):
        m = unit(rng)
        eps, mu = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        E, H = phys.em_gap_from_kernel(m, rng, eps, mu)
        chk = phys.em_shock_check(E, H, m, eps, mu)
        assert chk.admissible
        for v in (chk.e_form, chk.h_form, chk.d_form, chk.b_form):
            assert np.abs(v).max() < 1e-12
        assert abs(m @ E) < 1e-12 and abs(m @ H) < 1e-12
    m = np.array([0.0, 0.0, 1.0])
    assert not phys.em_shock_check([0, 0, 1.0], [0, 0, 0], m).admissible
    # transverse but with the wrong E/H relation
    assert not phys.em_shock_check([1.0, 0, 0], [1.0, 0, 0], m).admissible


def test_xi_spinor_properties():
    sp = phys.elementary_xi_spinor([3.0, 0, 4.0], 1.0, 1)
    assert sp.frequency == pytest.approx(4.0)
    assert sp.phase_speed == pytest.approx(1.2)
    assert sp.regime == "supersonic"
    assert phys.elementary_xi_spinor([3.0, 0, 4.0], 1.0, -1).regime == "subsonic"
    assert phys.elementary_xi_spinor([1.0, 0, 0], 0.0, 1).regime == "luminal"
    np.testing.assert_allclose(sp.amplitude, np.array([1j, 0.6, 0, 0.8]) / math.sqrt(2))
    with pytest.raises(ZeroWaveVector):
        phys.elementary_xi_spinor([0, 0, 0], 1.0, 1)
    with pytest.raises(ValueError):
        phys.elementary_xi_spinor([1, 0, 0], 1.0, 0)


def test_xi_spinor_is_annihilated(rng):
    for sign in (1, -1):
        sp = phys.elementary_xi_spinor(rng.uniform(-2, 2, 3), rng.uniform(-2, 2), sign)
        p = rng.uniform(-1, 1, 4)
        assert sp.dirac_residual(p).norm() < 1e-13
        assert sp.dirac_residual(p, 1e-3).norm() < 1e-5
        S = sp.at(p)
        assert S.norm() == pytest.approx(1.0, abs=1e-14)
        assert S.pseudonorm() == 0


def test_spinor_energy_impulse_pins_norm():
    xi = np.array([1.0, 2.0, 2.0])
    S = phys.elementary_xi_spinor(xi, 0.5, 1).at([0.2, 0.1, 0.0, -0.3])
    X = phys.spinor_energy_impulse(S)
    assert X.isclose(Biquaternion(1.0, -1j * xi / 3))
    summary = phys.spinor_summary(S)
    assert summary["xi_norm2"] == pytest.approx(2.0)
    assert summary["xi_norm"] == pytest.approx(math.sqrt(2.0))
    assert summary["half_xi"].isclose(X * 0.5)


def test_omega_spinor(rng):
    for omega, rho in ((1.0, 0.5), (-2.0, 0.3), (0.0, 1.5)):
        e = unit(rng)
        sp = phys.elementary_omega_spinor(omega, rho, e)
        x = rng.uniform(-1, 1, 3)
        S = sp.at(x)
        assert S.norm() == pytest.approx(1.0, abs=1e-14)
        assert S.pseudonorm() == 0
        assert sp.gradiental_residual(x).norm() < 1e-13
        assert sp.gradiental_residual(x, 1e-3).norm() < 1e-5
    with pytest.raises(ZeroWaveNumber):
        phys.elementary_omega_spinor(1.0, -1.0, [0, 0, 1])
    with pytest.raises(ValueError):
        phys.elementary_omega_spinor(1.0, 0.0, [0, 0, 2])


def _bump_field():
    src = gaussian_source(Biquaternion(1.0, [0.3j, 0, -0.5]), [0, 0, 0], 0.3, cutoff=5)
    return src.field, src.support


def test_spatial_spinor_convolution_stays_in_kernel():
    C, support = _bump_field()
    base = phys.elementary_omega_spinor(1.0, 0.5, [0, 0.6, 0.8])
    F = dops.BqField(lambda t, x: np.array(
        [phys.spinor_field_convolve(C, base, xx, support, Q).components
         for xx in np.asarray(x).reshape(-1, 3)]).reshape(np.shape(x)[:-1] + (4,)))
    x = np.array([0.4, -0.2, 0.3])
    res = dops.gradiental_apply(base.kappa, -1, F, x, 1e-3)
    assert res.norm() < 1e-5 * (1 + F.at([0, *x]).norm())


def test_spacetime_spinor_convolution_stays_in_kernel():
    C, support = _bump_field()
    base = phys.elementary_xi_spinor([0.5, -1.0, 0.3], 0.7, -1)

    def ev(t, x):
        t = np.asarray(t).reshape(-1)
        x = np.asarray(x).reshape(-1, 3)
        return np.array([phys.spinor_field_convolve(C, base, [tt, *xx], support, Q, (0.0, 1.0)).components
                         for tt, xx in zip(t, x)])

    F = dops.BqField(ev)
    p = np.array([0.5, 0.1, 0.0, -0.2])
    assert dops.md_operator(0.7j, -1, F, p, 1e-3).norm() < 1e-5
    with pytest.raises(ValueError):
        phys.spinor_field_convolve(C, base, p, support, Q)


def test_nonoriented_spinor_field():
    def density(dirs):
        return 1.0 + dirs[:, 2]

    omega, rho = 1.5, 0.2

    def ev(t, x):
        return np.array([phys.nonoriented_spinor_field(density, omega, rho, xx, q=Q).components
                         for xx in np.asarray(x).reshape(-1, 3)]).reshape(np.shape(x)[:-1] + (4,))

    F = dops.BqField(ev)
    x = np.array([0.2, 0.1, -0.3])
    assert dops.gradiental_apply(omega + rho, -1, F, x, 1e-3).norm() < 1e-5
