import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betti_scope.complex import build_complex
from betti_scope.errors import EmptyDimension, InvalidCut, InvalidParameter, UnknownSimplex
from betti_scope.estimator import (
    budget,
    cdf_from_moments,
    chebyshev_from_raw,
    chebyshev_moments,
    estimate_betti_spectral,
    estimate_moments,
    kernel_estimate,
    local_diagonal_power,
    spectral_summary,
)
from betti_scope.generators import disjoint_union, hollow_triangle, random_flag, torus_grid
from betti_scope.laplacian import laplacian, norm_bound
from conftest import flag_complexes

EDGE = build_complex([(0, 1)], 1)


def _power_oracle(K, i, r):
    A = laplacian(K, i).toarray().astype(object)
    P = np.identity(A.shape[0], dtype=object)
    for _ in range(r):
        P = P.dot(A)
    return P


def test_local_power_examples():
    assert local_diagonal_power(EDGE, (0,), 0) == 1
    assert local_diagonal_power(EDGE, (0,), 1) == 1
    with pytest.raises(UnknownSimplex):
        local_diagonal_power(EDGE, (0, 2), 1)


@given(flag_complexes, st.integers(0, 6))
def test_local_power_matches_matrix_power(K, r):
    for i in range(K.dimension + 1):
        P = _power_oracle(K, i, r)
        for k, s in enumerate(K.simplices(i)):
            assert local_diagonal_power(K, s, r) == P[k, k]


@given(flag_complexes)
def test_exact_moments_match_dense_trace(K):
    for i in range(K.dimension + 1):
        m = estimate_moments(K, i, 8, None)
        n = K.n_simplices(i)
        for r in range(9):
            P = _power_oracle(K, i, r)
            assert m[r] == Fraction(int(np.trace(P)), n)


def test_first_vertex_moment_is_mean_degree():
    K = random_flag(40, 5, seed=4)
    m = estimate_moments(K, 0, 1, None)
    assert m[1] == Fraction(2 * K.n_simplices(1), K.n_simplices(0))


def test_sampled_moments_are_deterministic():
    K = random_flag(40, 5, seed=4)
    assert estimate_moments(K, 1, 6, 30, seed=2) == estimate_moments(K, 1, 6, 30, seed=2)
    with pytest.raises(EmptyDimension):
        estimate_moments(K, 7, 4, None)


def test_union_moments_equal_component_moments():
    a = estimate_moments(hollow_triangle(), 1, 8, None)
    b = estimate_moments(disjoint_union(hollow_triangle(), 7), 1, 8, None)
    assert a == b


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_chebyshev_moments_against_eigenvalues(seed):
    K = random_flag(25, 4, seed=seed)
    i = 1
    A = laplacian(K, i).toarray().astype(float)
    bound = norm_bound(laplacian(K, i))
    ev = np.linalg.eigvalsh(2 * A / bound - np.eye(len(A)))
    R = 40
    expected = [np.mean(np.cos(k * np.arccos(np.clip(ev, -1, 1)))) for k in range(R + 1)]
    got = chebyshev_moments(K, i, R, bound, block=7)
    assert np.allclose(got, expected, atol=1e-10)
    assert np.allclose(chebyshev_from_raw(estimate_moments(K, i, 8, None), bound), expected[:9], atol=1e-10)


def test_cdf_examples():
    zero = np.zeros(65)
    zero[0] = 1.0
    zero[1::2] = -1.0
    zero[2::2] = 1.0  # T_k(-1) = (-1)^k: all mass at lambda = 0
    assert np.all(np.abs(cdf_from_moments(zero, 4.0, [0.0, 1.0, 4.0]) - 1) < 0.05)
    assert cdf_from_moments(zero, 4.0, [-1.0])[0] == 0
    s = spectral_summary(EDGE, 0, 64)
    assert 0.45 <= s.cdf(1.0) <= 0.55
    s = spectral_summary(hollow_triangle(), 1, 64)
    assert 0.28 <= s.cdf(1.5) <= 0.39
    with pytest.raises(InvalidParameter):
        cdf_from_moments(zero[:10], 4.0, [1.0])


def test_cdf_grid_is_monotone_and_clipped():
    s = spectral_summary(random_flag(60, 5, seed=1), 1, 48)
    assert np.all(np.diff(s.cdf_grid) >= 0)
    assert s.cdf_grid.min() >= 0 and s.cdf_grid.max() <= 1


def test_kernel_estimate_bound_term_and_cut_validation():
    s = spectral_summary(hollow_triangle(), 1, 32)
    est = kernel_estimate(s, 1e-4)
    assert est.bound_term == pytest.approx(0.2698, abs=1e-3)
    for bad in (0.0, 1.0, -2.0):
        with pytest.raises(InvalidCut):
            kernel_estimate(s, bad)


def test_hollow_union_with_exact_moments():
    K = disjoint_union(hollow_triangle(), 1000)
    s = spectral_summary(K, 1, 128)
    est = kernel_estimate(s, 0.5)
    assert abs(est.per_vertex - 1 / 3) < 0.05


def test_zero_laplacian_estimate_equals_density():
    K = build_complex([(k,) for k in range(9)], 1)
    est = estimate_betti_spectral(K, 0, 0.1, seed=0)
    assert est.kernel_fraction == pytest.approx(1, abs=0.05)
    assert est.per_vertex == pytest.approx(est.simplex_density, abs=0.05)


def test_budget():
    R, S = budget(0.05)
    assert R == 160 and S == math.ceil(2 * math.log(80) / 0.05**2) == 3506
    with pytest.raises(InvalidParameter):
        estimate_betti_spectral(EDGE, 0, 1.5)


def test_torus_vertex_estimate_is_small():
    assert estimate_betti_spectral(torus_grid(20), 0, 0.05, seed=1).per_vertex <= 0.05


def test_sampled_mode_on_larger_union():
    K = disjoint_union(hollow_triangle(), 3000)
    runs = [estimate_betti_spectral(K, 1, 0.05, seed=s) for s in range(10)]
    assert not runs[0].summary.exact_mode
    assert all(abs(e.per_vertex - 1 / 3) <= 0.05 for e in runs)
    assert len({e.per_vertex for e in runs}) > 1
