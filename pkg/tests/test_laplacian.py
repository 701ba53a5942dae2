import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from betti_scope.complex import build_complex, orient_random
from betti_scope.errors import EmptyComplex, TooLarge
from betti_scope.exact import characteristic_polynomial, integer_rank, matrix_rank
from betti_scope.generators import disjoint_union, hollow_triangle, random_flag, sphere_boundary, torus_grid
from betti_scope.laplacian import (
    SparseOperator,
    SpectralMeasure,
    betti_exact,
    coboundary,
    cut_bound,
    exact_spectrum,
    is_psd_exact,
    kernel_gap_integral,
    laplacian,
    laplacian_pseudo_determinant,
    log_determinant_c,
    norm_bound,
    pseudo_determinant,
    stieltjes_check,
)
from conftest import flag_complexes
from oracles import dense_boundary_laplacian, sympy_betti

EDGE = build_complex([(0, 1)], 1)


def test_betti_examples():
    assert betti_exact(build_complex([(k,) for k in range(5)], 1)) == [5]
    assert betti_exact(hollow_triangle()) == [1, 1]
    assert betti_exact(sphere_boundary(2)) == [1, 0, 1]
    assert betti_exact(torus_grid(4)) == [1, 2, 1]
    with pytest.raises(EmptyComplex):
        betti_exact(build_complex([], 2))


@given(flag_complexes)
def test_betti_matches_sympy_oracle(K):
    if not K.vertices:
        return
    assert betti_exact(K) == sympy_betti(K.maximal_simplices())


@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=6))
def test_integer_rank_matches_sympy(rows):
    sparse = [{c: v for c, v in enumerate(r) if v} for r in rows]
    assert integer_rank(sparse) == sympy.Matrix(rows).rank() == matrix_rank(np.array(rows))


@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_charpoly_matches_sympy(rows):
    t = sympy.Symbol("t")
    expected = sympy.Matrix(rows).charpoly(t).all_coeffs()[::-1]
    assert characteristic_polynomial(np.array(rows)) == [int(c) for c in expected]


@given(flag_complexes, st.integers(0, 10**6))
def test_coboundary_squares_to_zero(K, seed):
    K = orient_random(K, seed)
    for q in range(K.dimension - 1):
        assert not (coboundary(K, q + 1).matrix @ coboundary(K, q).matrix).count_nonzero()


@given(flag_complexes)
def test_laplacian_matches_dense_definition(K):
    for i in range(K.dimension + 1):
        assert np.array_equal(laplacian(K, i).toarray(), dense_boundary_laplacian(K, i))


@given(flag_complexes, st.integers(0, 10**6))
def test_laplacian_spectrum_is_orientation_free(K, seed):
    L = orient_random(K, seed)
    for i in range(K.dimension + 1):
        a, b = laplacian(K, i).toarray(), laplacian(L, i).toarray()
        # reorienting conjugates by a diagonal +-1 matrix
        assert np.array_equal(np.abs(a), np.abs(b))
        assert np.array_equal(np.diag(a), np.diag(b))
        assert np.allclose(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b))


def test_spectral_measure_examples():
    m = exact_spectrum(laplacian(EDGE, 0))
    assert list(m.values) == [0.0, 2.0] and list(m.weights) == [0.5, 0.5]
    m = exact_spectrum(np.diag([5] * 4))
    assert list(m.values) == [5.0] and m.weights[0] == 1
    m = exact_spectrum(laplacian(hollow_triangle(), 1))
    assert np.allclose(m.values, [0, 3]) and np.allclose(m.weights, [1 / 3, 2 / 3])
    with pytest.raises(TooLarge):
        exact_spectrum(np.eye(5, dtype=int), cap=4)


def test_tetrahedron_boundary_edge_laplacian_is_scalar():
    # every nonzero eigenvalue of the up and down parts equals 4
    assert np.array_equal(laplacian(sphere_boundary(2), 1).toarray(), 4 * np.eye(6, dtype=int))


def test_norm_bound_examples():
    assert norm_bound(laplacian(EDGE, 0)) == 4
    assert norm_bound(np.zeros((3, 3))) == 1
    assert norm_bound(laplacian(hollow_triangle(), 1)) == 12


def test_pseudo_determinant_examples():
    assert pseudo_determinant(laplacian(EDGE, 0)) == 2
    assert pseudo_determinant(np.eye(4, dtype=int)) == 1
    assert pseudo_determinant(np.zeros((3, 3), dtype=int)) == 1
    assert pseudo_determinant(laplacian(hollow_triangle(), 1)) == 9


@given(flag_complexes)
def test_split_pseudo_determinant_matches_direct(K):
    for i in range(K.dimension + 1):
        assert laplacian_pseudo_determinant(K, i) == pseudo_determinant(laplacian(K, i))


def test_psd_exact():
    assert is_psd_exact(laplacian(torus_grid(3), 1))
    assert not is_psd_exact(np.array([[0, 1], [1, 0]]))
    assert not is_psd_exact(np.array([[1, 2], [0, 1]]))


def test_log_determinant_examples():
    assert log_determinant_c(exact_spectrum(laplacian(EDGE, 0))) == pytest.approx(0.5 * math.log(2))
    assert log_determinant_c(exact_spectrum(np.eye(3, dtype=int))) == 0
    assert log_determinant_c(exact_spectrum(laplacian(hollow_triangle(), 1))) == pytest.approx(2 / 3 * math.log(3))


def test_stieltjes_examples():
    m = exact_spectrum(laplacian(EDGE, 0))
    lhs, rhs = stieltjes_check(lambda x: x, lambda x: 1.0, m, 1.0)
    assert lhs == pytest.approx(1) and rhs == pytest.approx(1)
    m = exact_spectrum(laplacian(torus_grid(3), 1))
    lhs, rhs = stieltjes_check(math.log, lambda x: 1 / x, m, 1e-6)
    assert lhs == pytest.approx(log_determinant_c(m)) and rhs == pytest.approx(lhs, abs=1e-6)


def test_kernel_gap_integral_against_quadrature():
    from scipy.integrate import quad
    m = exact_spectrum(laplacian(torus_grid(3), 1))
    K = m.support_bound
    cuts = [0.0] + [float(v) for v in m.values if v > 0] + [K]
    num = sum(quad(lambda x: (m.cdf(x) - m.cdf(0.0)) / x, a, b)[0] for a, b in zip(cuts, cuts[1:]))
    assert kernel_gap_integral(m) == pytest.approx(num, rel=1e-8)
    assert kernel_gap_integral(m) <= math.log(K)


def test_cut_bound_example():
    assert cut_bound(12, 1e-4) == pytest.approx(0.2698, abs=1e-3)


def test_measure_cdf_and_union_invariance():
    m1 = exact_spectrum(laplacian(hollow_triangle(), 1))
    m4 = exact_spectrum(laplacian(disjoint_union(hollow_triangle(), 4), 1))
    assert np.allclose(m1.values, m4.values) and np.allclose(m1.weights, m4.weights)
    assert m1.cdf(2.9) == pytest.approx(1 / 3) and m1.cdf(3) == pytest.approx(1)
    assert SpectralMeasure.from_eigenvalues([0, 1e-12, 2], 4).kernel_multiplicity == 1


def test_triplet_round_trip():
    op = laplacian(random_flag(15, 4, seed=1), 1)
    back = SparseOperator.from_triplets(op.to_triplets())
    assert np.array_equal(back.toarray(), op.toarray())
