import numpy as np
import pytest

from biquat import diffops as dops
from biquat.algebra import Biquaternion
from biquat.errors import OutOfDomain, ParseError
from biquat.waves import plane_wave_solution

METRIC = np.array([1.0, -1.0, -1.0, -1.0])


def z_of(t, x):
    return np.concatenate([np.asarray(t, float)[..., None], np.asarray(x, float)], -1)


def poly_field(rng, exact=True):
    c0 = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
    c1 = rng.uniform(-1, 1, (4, 4)) + 1j * rng.uniform(-1, 1, (4, 4))
    c2 = rng.uniform(-1, 1, (4, 4, 4)) + 1j * rng.uniform(-1, 1, (4, 4, 4))
    c2 = 0.5 * (c2 + c2.transpose(1, 0, 2))

    def ev(t, x):
        z = z_of(t, x)
        return c0 + np.einsum("...u,uc->...c", z, c1) + np.einsum("...u,...v,uvc->...c", z, z, c2)

    def dv(t, x):
        return c1 + 2 * np.einsum("...v,uvc->...uc", z_of(t, x), c2)

    return dops.BqField(ev, dv if exact else None), c2


def linear(coord, comp):
    """Field equal to z_coord placed in component comp."""
    def ev(t, x):
        out = np.zeros(np.shape(t) + (4,), complex)
        out[..., comp] = z_of(t, x)[..., coord]
        return out
    return dops.BqField(ev)


P0 = np.array([0.3, -0.2, 0.5, 0.1])


@pytest.mark.parametrize("sign", [1, -1])
def test_bigradient_frozen_linear_fields(sign):
    s = sign
    # ∂τ of the scalar tau
    assert dops.bigradient(s, linear(0, 0), P0).isclose(Biquaternion(1.0))
    # gradient of the scalar x1 gives ± i e1
    assert dops.bigradient(s, linear(1, 0), P0).isclose(Biquaternion(0, [s * 1j, 0, 0]))
    # divergence of x1 e1 enters the scalar part as ∓ i
    assert dops.bigradient(s, linear(1, 1), P0).isclose(Biquaternion(-s * 1j))
    # rot(x2 e1) = -e3
    assert dops.bigradient(s, linear(2, 1), P0).isclose(Biquaternion(0, [0, 0, -s * 1j]))
    # time derivative of the vector part keeps its sign
    assert dops.bigradient(s, linear(0, 2), P0).isclose(Biquaternion(0, [0, 1, 0]))


def test_constant_field_scalar_value():
    F = dops.BqField.constant(2.0)
    np.testing.assert_array_equal(F(np.zeros(2), np.zeros((2, 3))), [[2, 0, 0, 0]] * 2)
    G = dops.BqField.constant(Biquaternion(0, [1, 0, 0]))
    assert G.at(P0) == Biquaternion(0, [1, 0, 0])
    assert dops.bigradient(1, G, P0) == Biquaternion()


def test_fd_partials_exact_on_quadratics(rng):
    F, _ = poly_field(rng)
    Fd = dops.BqField(F.evaluator)
    D_exact = dops.field_partials(F, P0[0], P0[1:])
    D_fd = dops.field_partials(Fd, P0[0], P0[1:], 1e-2)
    np.testing.assert_allclose(D_fd, D_exact, atol=1e-11)


def test_matrix_path_agrees(rng):
    for _ in range(20):
        F, _ = poly_field(rng)
        p = rng.uniform(-1, 1, 4)
        for sign in (1, -1):
            np.testing.assert_allclose(dops.matrix_apply(sign, F, p),
                                       dops.bigradient(sign, F, p).components, atol=1e-13)


def test_dirac_matrices_structure():
    D = dops.dirac_matrices()
    assert len(D) == 4
    np.testing.assert_array_equal(D[0], np.eye(4))
    for Dj in D[1:]:
        np.testing.assert_array_equal(Dj, Dj.conj().T)
        np.testing.assert_allclose(Dj @ Dj, np.eye(4))
    # spatial matrices anticommute pairwise
    for i in range(1, 4):
        for j in range(i + 1, 4):
            np.testing.assert_allclose(D[i] @ D[j] + D[j] @ D[i], 0)


def test_symbol_product_is_metric():
    target = np.einsum("uv,ab->uvab", np.diag(METRIC), np.eye(4))
    np.testing.assert_array_equal(dops.symbol_product(-1, 1), target)
    np.testing.assert_array_equal(dops.symbol_product(1, -1), target)
    # same-sign products are not the wave operator
    assert np.abs(dops.symbol_product(1, 1) - target).max() > 0.5


def test_factorization_on_quadratics(rng):
    F, c2 = poly_field(rng, exact=False)
    chk = dops.dalembert_factorization_check(F, P0, 1e-2)
    box_exact = 2 * np.einsum("u,uuc->c", METRIC, c2)
    np.testing.assert_allclose(chk.lhs.components, box_exact, atol=1e-9)
    np.testing.assert_allclose(chk.rhs.components, box_exact, atol=1e-9)
    # with exact inner partials only the outer operator is differenced
    G, c2 = poly_field(rng)
    np.testing.assert_allclose(dops.dalembert_factorization_check(G, P0, 1e-2).lhs.components,
                               2 * np.einsum("u,uuc->c", METRIC, c2), atol=1e-9)


def test_partials_second_order_convergence():
    amp = np.array([1.0, 0.5j, -0.3, 0.2 + 0.1j])

    def g(t, x):
        return np.exp(-np.sum(z_of(t, x) ** 2, -1))

    def dg(t, x):
        return (-2 * z_of(t, x) * g(t, x)[..., None])[..., None] * amp

    F = dops.BqField(lambda t, x: g(t, x)[..., None] * amp, dg)
    errs = dops.partials_convergence(F, P0, (1e-2, 5e-3, 2.5e-3))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_bigradients_commute(rng):
    F, _ = poly_field(rng, exact=False)
    a = dops.bigradient(-1, dops.bigradient_field(1, F, 1e-2), P0, 1e-2)
    b = dops.bigradient(1, dops.bigradient_field(-1, F, 1e-2), P0, 1e-2)
    assert (a - b).norm() < 1e-9


def test_md_operator_annihilates_plane_wave():
    m = 0.4 - 0.2j
    for sign in (1, -1):
        for branch in (1, -1):
            K = plane_wave_solution(sign, [0.3, -0.7, 0.2], Biquaternion(1, [0.5j, 0, 1]), branch, m)
            assert dops.md_operator(m, sign, K, P0).norm() < 1e-13


def test_kgfsh_apply_oracles():
    m = 0.3 + 0.4j

    def damped(t, x):
        return np.exp(-m * t) * np.sin(x[..., 0] - t)

    assert abs(dops.kgfsh_apply(m, damped, P0)) < 1e-6

    def quad(t, x):
        return t * t + 0 * x[..., 0]

    t = P0[0]
    assert dops.kgfsh_apply(m, quad, P0) == pytest.approx(2 + 4 * m * t + m * m * t * t, abs=1e-9)
    nested = dops.kgfsh_nested(m, quad, P0, 1e-3)
    assert nested.scalar == pytest.approx(2 + 4 * m * t + m * m * t * t, abs=1e-6)
    assert np.abs(nested.vector).max() < 1e-6


def test_gradiental_frozen():
    k = 1.7
    for sign in (1, -1):
        # B = x1 (scalar): k x1 ± e1
        out = dops.gradiental_apply(k, sign, linear(1, 0), [0.4, 0, 0])
        assert out.isclose(Biquaternion(k * 0.4, [sign, 0, 0]))
        # B = x1 e1: ∇∘B = -div B = -1
        out = dops.gradiental_apply(k, sign, linear(1, 1), [0.4, 0, 0])
        assert out.isclose(Biquaternion(-sign, [k * 0.4, 0, 0]))


def test_box_on_grid_matches_analytic(rng):
    F, c2 = poly_field(rng)
    g = dops.GridBqField.sample(F, [0, 0, 0, 0], [0.1, 0.1, 0.1, 0.1], [4, 4, 4, 4])
    p = g.node((1, 2, 1, 2))
    np.testing.assert_allclose(dops.box(g, p).components, 2 * np.einsum("u,uuc->c", METRIC, c2),
                               atol=1e-9)
    chk = dops.dalembert_factorization_check(g, p)
    np.testing.assert_allclose(chk.lhs.components, chk.rhs.components, atol=1e-9)
    np.testing.assert_allclose(dops.bigradient(1, g, p).components,
                               dops.bigradient(1, F, p).components, atol=1e-10)


def test_grid_domain_errors(rng):
    F, _ = poly_field(rng)
    g = dops.GridBqField.sample(F, [0, 0, 0, 0], [0.1] * 4, [3, 3, 3, 3])
    with pytest.raises(OutOfDomain):
        g.index_of([0.05, 0, 0, 0])
    with pytest.raises(OutOfDomain):
        g.partials_at((0, 1, 1, 1))
    # multilinear interpolation is exact at nodes and zero outside
    np.testing.assert_allclose(g(np.asarray(0.1), np.array([0.1, 0.2, 0.0])),
                               F(np.asarray(0.1), np.array([0.1, 0.2, 0.0])), atol=1e-14)
    np.testing.assert_array_equal(g(np.asarray(5.0), np.zeros(3)), np.zeros(4))


def test_grid_serialization_roundtrip(rng):
    F, _ = poly_field(rng)
    g = dops.GridBqField.sample(F, [0, -1, 0, 0], [0.5, 0.25, 1, 1], [2, 3, 1, 2])
    text = g.dumps()
    lines = text.splitlines()
    assert lines[0] == ('{"schema":"1","origin":[0.0,-1.0,0.0,0.0],'
                        '"spacing":[0.5,0.25,1.0,1.0],"extents":[2,3,1,2]}')
    assert len(lines) == 1 + 2 * 3 * 1 * 2
    # records are row-major with x3 fastest
    assert Biquaternion.from_json(lines[2]) == g.value_at((0, 0, 0, 1))
    h = dops.GridBqField.loads(text)
    np.testing.assert_array_equal(h.samples, g.samples)
    assert h.dumps() == text


def test_grid_parse_errors(rng):
    F, _ = poly_field(rng)
    lines = dops.GridBqField.sample(F, [0] * 4, [1] * 4, [1, 1, 1, 3]).dumps().splitlines()
    bad = lines.copy()
    bad[2] = '{"s": [1, 0]}'
    with pytest.raises(ParseError, match="line 3"):
        dops.GridBqField.loads("\n".join(bad))
    with pytest.raises(ParseError, match="line 1"):
        dops.GridBqField.loads('{"schema":"1"}\n')
    with pytest.raises(ParseError):
        dops.GridBqField.loads("\n".join(lines[:-1]))
