import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from betti_scope.complex import build_complex
from betti_scope.errors import InvalidParameter, NoMatch, RadiusMismatch
from betti_scope.generators import disjoint_union, hollow_triangle, path, random_flag, solid_triangle, torus_grid
from betti_scope.sampling import (
    LocalProfile,
    ReferenceCorpus,
    class_count_bound,
    empirical_profile,
    empirical_profiles,
    exact_profile,
    exact_profiles,
    sample_size_for,
    sampling_distance,
    sup_deviation,
    test_betti,
)


def test_exact_profile_examples():
    p = exact_profile(disjoint_union(hollow_triangle(), 5), 1)
    assert list(p.frequencies().values()) == [1.0]
    p = exact_profile(path(3), 1)
    assert sorted(p.frequencies().values()) == pytest.approx([1 / 3, 2 / 3])
    p = exact_profile(hollow_triangle(), 2, i=1)
    assert len(p.counts) == 1 and p.total == 3


def test_profile_json_round_trip():
    p = exact_profile(random_flag(30, 4, seed=2), 2)
    back = LocalProfile.from_json(json.loads(json.dumps(p.to_json())))
    assert back == p


def test_empirical_profile_determinism_and_single_vertex():
    K = random_flag(30, 4, seed=5)
    assert empirical_profile(K, 1, 50, seed=9) == empirical_profile(K, 1, 50, seed=9)
    one = build_complex([(0,)], 1)
    assert empirical_profile(one, 2, 7, seed=1).frequencies() == exact_profile(one, 2).frequencies()
    with pytest.raises(InvalidParameter):
        empirical_profile(K, 1, 0, seed=1)


def test_empirical_converges_to_exact():
    K = random_flag(30, 4, seed=11)
    exact = exact_profiles(K, 2)
    fails = sum(sup_deviation(empirical_profiles(K, 2, 10**5, seed=s), exact, [1, 2]) >= 0.02 for s in range(5))
    assert fails == 0


def test_sample_size_formula():
    assert sample_size_for(1.0, 0.05, 10) == 1199 == math.ceil(200 * math.log(400))
    sizes = [sample_size_for(0.5, e, 20) for e in (0.1, 0.3, 0.6, 0.9, 0.999)]
    assert sizes == sorted(sizes, reverse=True)
    with pytest.raises(InvalidParameter):
        sample_size_for(0.5, 1.0, 3)


def test_class_count_bound():
    K = path(3)
    assert class_count_bound(exact_profiles(K, 1)) == 4


def test_distance_examples():
    tri = exact_profiles(hollow_triangle(), 1)
    pt = exact_profiles(build_complex([(0,)], 1), 1)
    d = sampling_distance(tri, pt, 1)
    # two classes, each frequency differs by 1: 1/2 + 1/4
    assert d.value == 0.75 and d.n_classes == 2 and d.truncation_bound == 0.25
    assert sampling_distance(tri, tri, 1).value == 0
    with pytest.raises(RadiusMismatch):
        sampling_distance(tri, pt, 2)


@given(st.integers(0, 10**6))
def test_distance_symmetric_and_triangle(seed):
    Ks = [random_flag(12, 3, seed=seed + k) for k in range(3)]
    Ps = [exact_profiles(K, 2) for K in Ks]
    universe = {c for P in Ps for p in P.values() for c in p.support}
    d = lambda a, b: sampling_distance(Ps[a], Ps[b], 2, universe).value
    assert d(0, 1) == d(1, 0) >= 0
    assert d(0, 2) <= d(0, 1) + d(1, 2) + 1e-15


def test_tester_matches_hollow_union():
    corpus = ReferenceCorpus.build([disjoint_union(hollow_triangle(), 4), disjoint_union(solid_triangle(), 4)],
                                   radius=1, tolerance=0.5, names=["hollow", "solid"])
    M = disjoint_union(hollow_triangle(), 1000)
    res = test_betti(M, corpus, 1, 0.1, seed=3)
    assert res.matched_index == 0 and res.estimate == pytest.approx(1 / 3)
    assert corpus.entries[0].betti == [4, 4]


def test_tester_no_match():
    corpus = ReferenceCorpus.build([disjoint_union(hollow_triangle(), 4)], radius=1, tolerance=0.2)
    with pytest.raises(NoMatch) as info:
        test_betti(disjoint_union(solid_triangle(), 50), corpus, 1, 0.1, seed=0)
    assert info.value.closest_index == 0


def test_torus_profile_stable_in_n():
    profiles = [exact_profile(torus_grid(n), 2).frequencies() for n in (6, 7, 9)]
    assert profiles[0] == profiles[1] == profiles[2]
