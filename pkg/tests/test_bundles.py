import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fixtures
from mgl import (
    ConeContext,
    HermitianBundle,
    check_paired,
    load_bundle,
    pair,
    restrict_bundle,
    symmetrize,
    trivial_bundle,
    validate_bundle,
)
from mgl.errors import DimensionMismatch, NegativeG, SchemaError


def test_validate_unit_phase_rank1():
    g = fixtures.p2()
    b = HermitianBundle(g, 1, {(0, 1): [[np.exp(1j * np.pi / 3)]]})
    report = validate_bundle(b)
    assert report.ok
    assert report.edge_defects[(0, 1)] <= 1e-15


def test_validate_nonunitary_defect_three():
    g = fixtures.p2()
    b = HermitianBundle(g, 2, {(0, 1): np.diag([1.0, 2.0])})
    report = validate_bundle(b)
    assert not report.ok
    assert report.edge_defects[(0, 1)] == pytest.approx(3.0)


def test_validate_indefinite_endo():
    g = fixtures.p2()
    endo = np.zeros((2, 2, 2), dtype=complex)
    endo[0] = np.diag([1.0, -0.5])
    b = HermitianBundle(g, 2, {}, endo)
    report = validate_bundle(b)
    assert not report.ok
    assert report.endo_min_eigs[0] == pytest.approx(-0.5)


def test_reverse_connection_is_adjoint():
    g = fixtures.triangle()
    rng = np.random.default_rng(3)
    b = fixtures.random_bundle(g, 2, rng)
    for (x, y) in g.edges:
        np.testing.assert_allclose(b.phi(y, x), b.phi(x, y).conj().T)
    # Non-edges and omitted entries act as the identity.
    assert np.array_equal(trivial_bundle(g, 2).phi(0, 1), np.eye(2))


def test_symmetrize_examples():
    g = fixtures.p2()
    b1 = trivial_bundle(g, 1)
    out = symmetrize(np.array([[3 + 4j], [0]]), b1)
    np.testing.assert_allclose(out, [5.0, 0.0])

    b2 = trivial_bundle(g, 2)
    out = symmetrize(np.array([[1, 1], [0, 0]], dtype=complex), b2)
    np.testing.assert_allclose(out, [np.sqrt(2), 0.0])


def test_symmetrize_norm_preservation():
    g = fixtures.random_graph()
    ctx = ConeContext(g)
    rng = np.random.default_rng(5)
    b = trivial_bundle(g, 3)
    for _ in range(50):
        u = fixtures.random_section(g.n, 3, rng)
        su = symmetrize(u, b)
        assert abs(ctx.norm(su) - ctx.section_norm(u)) <= 1e-12 * ctx.section_norm(u)


def test_pair_hand_example():
    g = fixtures.single_vertex(0.0)
    b = trivial_bundle(g, 1)
    f2 = pair(np.array([[3 + 4j]]), np.array([2.0]), b)
    np.testing.assert_allclose(f2, [[(6 + 8j) / 5]])
    inner = (np.array([[3 + 4j]]) * f2.conj()).sum()
    assert inner == pytest.approx(10.0)


def test_pair_zero_block_uses_first_basis_vector():
    g = fixtures.p2()
    b = trivial_bundle(g, 2)
    f1 = np.zeros((2, 2), dtype=complex)
    f1[1, 1] = 5.0
    f2 = pair(f1, np.array([1.0, 0.0]), b)
    np.testing.assert_allclose(f2[0], [1.0, 0.0])
    np.testing.assert_allclose(f2[1], [0.0, 0.0])


def test_pair_zero_g_gives_zero():
    g = fixtures.p3()
    b = trivial_bundle(g, 2)
    rng = np.random.default_rng(0)
    f2 = pair(fixtures.random_section(3, 2, rng), np.zeros(3), b)
    assert np.abs(f2).max() == 0.0


def test_pair_rejects_negative_g():
    g = fixtures.p2()
    b = trivial_bundle(g, 1)
    with pytest.raises(NegativeG):
        pair(np.ones((2, 1), dtype=complex), np.array([1.0, -0.1]), b)


def test_pair_postconditions_random():
    g = fixtures.random_graph()
    ctx = ConeContext(g)
    b = trivial_bundle(g, 2)
    rng = np.random.default_rng(17)
    for _ in range(50):
        f1 = fixtures.random_section(g.n, 2, rng)
        gfun = np.abs(rng.standard_normal(g.n))
        f2 = pair(f1, gfun, b)
        np.testing.assert_allclose(symmetrize(f2, b), gfun, atol=1e-13)
        lhs = ctx.section_inner(f1, f2)
        rhs = ctx.inner(symmetrize(f1, b), gfun)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
        assert check_paired(f1, f2).ok


def test_check_paired_examples():
    disjoint = check_paired(
        np.array([[1.0 + 0j], [0.0]]), np.array([[0.0 + 0j], [1.0]])
    )
    assert disjoint.ok

    misaligned = check_paired(np.array([[1.0 + 0j]]), np.array([[1j]]))
    assert not misaligned.ok
    assert misaligned.worst_vertex == 0
    assert misaligned.worst_defect == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cauchy_schwarz_symmetrization(seed):
    # Cauchy-Schwarz compatibility: |<f1, f2>| <= <S f1, S f2>, slack >= -1e-12.
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 7)), int(rng.integers(1, 4))
    g = fixtures.WeightedGraph(n, {}, None, 0.5 + rng.random(n))
    ctx = ConeContext(g)
    b = trivial_bundle(g, d)
    f1 = fixtures.random_section(n, d, rng)
    f2 = fixtures.random_section(n, d, rng)
    lhs = abs(ctx.section_inner(f1, f2))
    rhs = ctx.inner(symmetrize(f1, b), symmetrize(f2, b)).real
    assert rhs - lhs >= -1e-12 * max(1.0, rhs)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_triangle_homogeneity_lipschitz(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 7)), int(rng.integers(1, 4))
    g = fixtures.WeightedGraph(n, {}, None, 0.5 + rng.random(n))
    ctx = ConeContext(g)
    b = trivial_bundle(g, d)
    f1 = fixtures.random_section(n, d, rng)
    f2 = fixtures.random_section(n, d, rng)
    gfun = np.abs(rng.standard_normal(n))

    # Triangle inequality against nonnegative test functions.
    lhs = ctx.inner(symmetrize(f1 + f2, b), gfun).real
    rhs = ctx.inner(symmetrize(f1, b) + symmetrize(f2, b), gfun).real
    assert lhs <= rhs + 1e-12 * max(1.0, abs(rhs))

    # Positive homogeneity for complex scalars.
    alpha = complex(rng.standard_normal(), rng.standard_normal())
    diff = symmetrize(alpha * f1, b) - abs(alpha) * symmetrize(f1, b)
    assert np.abs(diff).max() <= 1e-14 * max(1.0, abs(alpha) * np.abs(f1).max())

    # Lipschitz bound ||S f1 - S f2|| <= ||f1 - f2||.
    lip = ctx.norm(symmetrize(f1, b) - symmetrize(f2, b))
    assert lip <= ctx.section_norm(f1 - f2) + 1e-12


def test_abs_difference_identity():
    # For S(f2) <= S(f1) paired pairs: S(f1 - f2) = S(f1) - S(f2).
    g = fixtures.random_graph()
    b = trivial_bundle(g, 2)
    rng = np.random.default_rng(23)
    for _ in range(50):
        f1 = fixtures.random_section(g.n, 2, rng)
        gfun = rng.random(g.n) * symmetrize(f1, b)
        f2 = pair(f1, gfun, b)
        assert check_paired(f1, f2).ok
        lhs = symmetrize(f1 - f2, b)
        rhs = symmetrize(f1, b) - symmetrize(f2, b)
        assert np.abs(lhs - rhs).max() <= 1e-10


def test_restrict_bundle_folding():
    g = fixtures.p3()
    rng = np.random.default_rng(9)
    b = fixtures.random_bundle(g, 2, rng)
    folded = restrict_bundle(b, [0, 1], fold_boundary=True)
    plain = restrict_bundle(b, [0, 1], fold_boundary=False)
    # Vertex 1 loses the edge to vertex 2 with b = 1; folding adds I.
    np.testing.assert_allclose(folded.endo[1], plain.endo[1] + np.eye(2))
    np.testing.assert_allclose(folded.endo[0], plain.endo[0])
    assert folded.graph.edges == {(0, 1): 1.0}


def test_load_bundle_defaults_and_errors():
    g = fixtures.p2()
    b = load_bundle(g, {"rank": 1})
    assert np.array_equal(b.phi(0, 1), np.eye(1))
    assert np.abs(b.endo).max() == 0.0

    with pytest.raises(SchemaError):
        load_bundle(g, {"rank": 0})
    with pytest.raises(SchemaError):
        load_bundle(g, {"rank": 1, "connection": [{"u": 0, "v": 1}]})
    with pytest.raises(SchemaError):
        load_bundle(g, {"rank": 1, "endo": [[[0.0, 0.0]]]})
    # Connection on a non-edge is rejected.
    with pytest.raises(SchemaError):
        load_bundle(
            fixtures.p3(),
            {"rank": 1, "connection": [{"u": 0, "v": 2, "matrix": [[[1.0, 0.0]]]}]},
        )


def test_section_shape_checks():
    g = fixtures.p2()
    b = trivial_bundle(g, 2)
    with pytest.raises(DimensionMismatch):
        symmetrize(np.ones((2, 3)), b)
    with pytest.raises(DimensionMismatch):
        check_paired(np.ones((2, 2)), np.ones((3, 2)))
