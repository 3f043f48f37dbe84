import numpy as np
import pytest

from biquat import algebra as alg
from biquat.algebra import E1, E2, E3, ONE, ZERO, Biquaternion
from biquat.errors import NonInvertible

# 2x2 complex matrix model: e_j -> -i sigma_j.  Independent of the product code.
SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def to_matrix(F):
    c = F.components
    return c[0] * np.eye(2) + np.einsum("j,jab->ab", c[1:], -1j * SIGMA)


def from_matrix(M):
    f = np.trace(M) / 2
    F = [np.trace(M @ SIGMA[j]) / 2 * 1j for j in range(3)]
    return Biquaternion(f, F)


def rand_bq(rng):
    return Biquaternion.from_components(rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4))


def test_matrix_model_roundtrip(rng):
    F = rand_bq(rng)
    assert from_matrix(to_matrix(F)).isclose(F)


@pytest.mark.parametrize("i,j,expected", [
    (1, 1, -ONE), (2, 2, -ONE), (3, 3, -ONE),
    (1, 2, E3), (2, 3, E1), (3, 1, E2),
    (2, 1, -E3), (3, 2, -E1), (1, 3, -E2),
])
def test_basis_table(i, j, expected):
    assert alg.BASIS[i] * alg.BASIS[j] == expected


def test_hand_products():
    assert Biquaternion(1, [1, 0, 0]) * Biquaternion(1, [0, 1, 0]) == Biquaternion(1, [1, 1, 1])
    iE1 = Biquaternion(0, [1j, 0, 0])
    assert iE1 * iE1 == ONE
    # (1 + i e1)(1 - i e1) = 1 - (i e1)^2 = 0: a zero divisor
    assert Biquaternion(1, [1j, 0, 0]) * Biquaternion(1, [-1j, 0, 0]) == ZERO


def test_product_matches_matrix_model(rng):
    for _ in range(200):
        F, G = rand_bq(rng), rand_bq(rng)
        np.testing.assert_allclose(to_matrix(F * G), to_matrix(F) @ to_matrix(G), atol=1e-14)


def test_array_kernel_broadcasts(rng):
    a = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    b = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    out = alg.bq_mul(a, b)
    for k in range(5):
        ref = Biquaternion.from_components(a[k]) * Biquaternion.from_components(b[k])
        np.testing.assert_allclose(out[k], ref.components, atol=1e-14)


def test_scalar_and_commutator(rng):
    F, G = rand_bq(rng), rand_bq(rng)
    prod = F * G
    assert np.isclose(prod.scalar, F.scalar * G.scalar - F.vector @ G.vector)
    c = alg.commutator(F, G)
    assert abs(c.scalar) < 1e-15
    np.testing.assert_allclose(c.vector, 2 * np.cross(F.vector, G.vector), atol=1e-14)


def test_conjugations():
    F = Biquaternion(1 + 2j, [3j, 1, -1 + 1j])
    assert F.mutual() == Biquaternion(1 + 2j, [-3j, -1, 1 - 1j])
    assert F.cconj() == Biquaternion(1 - 2j, [-3j, 1, -1 - 1j])
    assert F.conj() == Biquaternion(1 - 2j, [3j, -1, 1 + 1j])
    cj = alg.conjugations(F)
    assert cj.conj == F.conj() and cj.complex_conj == F.cconj()
    assert alg.is_selfconjugated(Biquaternion(2.0, [1j, -2j, 0]))
    assert not alg.is_selfconjugated(Biquaternion(2.0, [1, 0, 0]))


def test_norm_and_pseudonorm_values():
    F = Biquaternion(3, [4, 0, 0])
    assert F.norm() == 5.0
    assert alg.pseudonorm2(F) == -7.0
    # branch with nonnegative real part
    p = Biquaternion(0, [1, 0, 0]).pseudonorm()
    assert p.real >= 0 and abs(p * p + 1) < 1e-15
    assert Biquaternion(2, [0, 0, 0]).pseudonorm() == 2


def test_pseudonorm_snaps_rounding_noise():
    # |f|^2 - |F|^2 cancels to rounding level for unit spinor amplitudes
    v = np.array([0.1, 0.7, -0.3])
    v /= np.linalg.norm(v)
    S = Biquaternion(1j, v) / np.sqrt(2)
    assert S.pseudonorm() == 0


def test_inverse(rng):
    F = Biquaternion(2, [1j, 0, 1])
    np.testing.assert_allclose((F * F.inverse()).components, ONE.components, atol=1e-15)
    np.testing.assert_allclose(to_matrix(F.inverse()), np.linalg.inv(to_matrix(F)), atol=1e-14)
    with pytest.raises(NonInvertible):
        Biquaternion(1, [1j, 0, 0]).inverse()
    with pytest.raises(ZeroDivisionError):
        ONE / Biquaternion(1, [1j, 0, 0])
    assert (F / F).isclose(ONE)


def test_solve_linear(rng):
    F, B = rand_bq(rng), rand_bq(rng)
    X = alg.solve_linear(F, B, "left")
    assert (F * X).isclose(B)
    Y = alg.solve_linear(F, B, "right")
    assert (Y * F).isclose(B)


def test_unitarity_checks():
    # rotor: U∘U⁻ = 1 but U∘Ū = cos 2phi + e sin 2phi
    phi = 0.4
    U = Biquaternion(np.cos(phi), np.sin(phi) * np.array([0, 0, 1.0]))
    assert alg.is_lorentz_unitary(U)
    assert not alg.is_unitary(U)
    # boost: both products are ch^2 - sh^2 = 1
    L = Biquaternion(np.cosh(0.3), 1j * np.sinh(0.3) * np.array([1.0, 0, 0]))
    assert alg.is_lorentz_unitary(L)
    assert alg.is_unitary(L)
    assert alg.is_unitary(Biquaternion(np.exp(0.7j)))
    assert not alg.is_unitary(Biquaternion(2.0))


def test_energy_impulse_frozen():
    # F = e1 + i e2: xi = 1/2 F F* = 1 + i e3, W = 1, P = e3, null
    ei = alg.energy_impulse(Biquaternion(0, [1, 1j, 0]))
    assert ei.xi.isclose(Biquaternion(1, [0, 0, 1j]))
    assert ei.W == pytest.approx(1.0)
    np.testing.assert_allclose(ei.P, [0, 0, 1])
    assert ei.pseudonorm2 == pytest.approx(0.0)


def test_json_roundtrip(rng):
    F = rand_bq(rng)
    assert Biquaternion.from_json(F.to_json()) == F
    assert Biquaternion(1 + 2j, [0, 1, 0]).to_json() == \
        '{"s":[1.0,2.0],"v":[[0.0,0.0],[1.0,0.0],[0.0,0.0]]}'
    with pytest.raises(ValueError):
        Biquaternion.from_json_obj({"s": [1, 0]})


def test_equality_and_hash():
    a = Biquaternion(1, [1, 2, 3])
    b = Biquaternion(1.0, [1.0, 2.0, 3.0])
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1


def test_arithmetic_with_scalars():
    F = Biquaternion(1, [1, 0, 0])
    assert 2 * F == Biquaternion(2, [2, 0, 0])
    assert F + 1 == Biquaternion(2, [1, 0, 0])
    assert -F == Biquaternion(-1, [-1, 0, 0])
