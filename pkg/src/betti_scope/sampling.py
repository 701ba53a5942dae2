"""Rooted-ball statistics, their sampled estimates, and the corpus-matching tester."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .canonical import CanonicalCode, canonical_code
from .complex import SimplicialComplex, build_complex, extract_simplex_ball, extract_vertex_ball
from .errors import EmptyComplex, InvalidParameter, NoMatch, RadiusMismatch
from .laplacian import betti_exact

ProfileSet = Mapping[int, "LocalProfile"]


@dataclass
class LocalProfile:
    """Counts of rooted-ball classes at one radius, over all roots or a sample."""

    radius: int
    root_dimension: int
    counts: dict[CanonicalCode, int]
    total: int
    mode: str = "exact"
    sample_size: int | None = None

    def frequency(self, code: CanonicalCode) -> float:
        return self.counts.get(code, 0) / self.total if self.total else 0.0

    def frequencies(self) -> dict[CanonicalCode, float]:
        return {c: n / self.total for c, n in self.counts.items()}

    @property
    def support(self) -> set[CanonicalCode]:
        return set(self.counts)

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "root_dimension": self.root_dimension,
            "mode": self.mode,
            "total": self.total,
            "sample_size": self.sample_size,
            "counts": {c.hex(): n for c, n in sorted(self.counts.items(), key=lambda kv: kv[0].sort_key())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "LocalProfile":
        r, i = int(data["radius"]), int(data["root_dimension"])
        counts = {CanonicalCode.fromhex(h, r, i): int(n) for h, n in data["counts"].items()}
        return cls(r, i, counts, int(data["total"]), data["mode"], data.get("sample_size"))


def roots_of(K: SimplicialComplex, i: int = 0) -> tuple:
    return K.vertices if i == 0 else K.simplices(i)


def ball_code(K: SimplicialComplex, root, r: int, i: int = 0) -> CanonicalCode:
    """Canonical code of the radius-r ball at ``root``, memoized on ``K``."""
    key = ("code", i, r, root)
    code = K._cache.get(key)
    if code is None:
        ball = extract_vertex_ball(K, root, r) if i == 0 else extract_simplex_ball(K, root, r)
        code = canonical_code(ball)
        K._cache[key] = code
    return code


def _codes_chunk(args):
    K, roots, r, i = args
    return [ball_code(K, root, r, i) for root in roots]


def _all_codes(K: SimplicialComplex, r: int, i: int, threads: int) -> list[CanonicalCode]:
    roots = roots_of(K, i)
    if threads <= 1 or len(roots) < 2 * threads:
        return [ball_code(K, root, r, i) for root in roots]
    chunks = [roots[k::threads] for k in range(threads)]
    with ProcessPoolExecutor(threads) as pool:
        parts = list(pool.map(_codes_chunk, [(K.unoriented(), c, r, i) for c in chunks]))
    for chunk, codes in zip(chunks, parts):
        for root, code in zip(chunk, codes):
            K._cache[("code", i, r, root)] = code
    return [ball_code(K, root, r, i) for root in roots]


def exact_profile(K: SimplicialComplex, r: int, i: int = 0, threads: int = 1) -> LocalProfile:
    """p_K(alpha) for every class alpha at radius r, counting each root once."""
    roots = roots_of(K, i)
    if not roots:
        raise EmptyComplex(f"complex has no {i}-simplices to root balls at")
    counts = Counter(_all_codes(K, r, i, threads))
    return LocalProfile(r, i, dict(counts), len(roots), "exact")


def exact_profiles(K: SimplicialComplex, r_max: int, i: int = 0, threads: int = 1) -> dict[int, LocalProfile]:
    return {r: exact_profile(K, r, i, threads) for r in range(1, r_max + 1)}


def sample_roots(K: SimplicialComplex, N: int, seed, i: int = 0) -> list:
    """N roots drawn uniformly with replacement."""
    if N < 1:
        raise InvalidParameter("sample size must be at least 1")
    roots = roots_of(K, i)
    if not roots:
        raise EmptyComplex(f"complex has no {i}-simplices to sample")
    picks = np.random.default_rng(seed).integers(0, len(roots), size=N)
    return [roots[k] for k in picks]


def _profile_of(K, sample, r, i) -> LocalProfile:
    counts = Counter(ball_code(K, root, r, i) for root in sample)
    return LocalProfile(r, i, dict(counts), len(sample), "empirical", len(sample))


def empirical_profile(K: SimplicialComplex, r: int, N: int, seed, i: int = 0) -> LocalProfile:
    """Q(K, alpha)/N from N uniformly sampled roots."""
    return _profile_of(K, sample_roots(K, N, seed, i), r, i)


def empirical_profiles(K: SimplicialComplex, r_max: int, N: int, seed, i: int = 0) -> dict[int, LocalProfile]:
    """Empirical profiles at radii 1..r_max, all read off one sample of roots."""
    sample = sample_roots(K, N, seed, i)
    return {r: _profile_of(K, sample, r, i) for r in range(1, r_max + 1)}


def sample_size_for(rho: float, eps: float, class_count_bound: int) -> int:
    """Samples so that every class frequency is within rho/10 with probability >= 1 - eps.

    Two-sided Hoeffding per class with a union bound over ``class_count_bound``
    classes gives (50/rho^2) ln(2|A|/eps); the constant is taken four times
    larger.

    >>> sample_size_for(1.0, 0.05, 10)
    1199
    """
    if not (rho > 0) or not (0 < eps < 1) or int(class_count_bound) < 1:
        raise InvalidParameter("need rho > 0, 0 < eps < 1 and a class bound >= 1")
    return math.ceil(200.0 / rho**2 * math.log(2 * int(class_count_bound) / eps))


def class_count_bound(*profile_sets: ProfileSet) -> int:
    """Twice the number of distinct classes observed across the profile sets."""
    codes = set()
    for ps in profile_sets:
        for prof in ps.values():
            codes |= prof.support
    return max(1, 2 * len(codes))


def sup_deviation(P: ProfileSet, Q: ProfileSet, radii: Iterable[int]) -> float:
    """Largest |p(alpha) - q(alpha)| over all classes at the given radii."""
    worst = 0.0
    for r in radii:
        a, b = P[r], Q[r]
        for code in a.support | b.support:
            worst = max(worst, abs(a.frequency(code) - b.frequency(code)))
    return worst


class Distance(NamedTuple):
    value: float
    truncation_bound: float
    n_classes: int


def sampling_distance(P: ProfileSet, Q: ProfileSet, r_max: int,
                      universe: Iterable[CanonicalCode] | None = None) -> Distance:
    """Truncated sum of 2^-k |p(alpha_k) - q(alpha_k)| over enumerated classes.

    Classes are enumerated by (radius, code bytes).  The enumeration runs over
    ``universe`` when given, else over the classes seen in P or Q at radii
    <= r_max; pass one shared universe when comparing more than two complexes
    so that all distances use the same weights.  ``truncation_bound`` is the
    weight left for classes past the enumeration.
    """
    radii = range(1, r_max + 1)
    for r in radii:
        if r not in P or r not in Q:
            raise RadiusMismatch(f"both profile sets need radius {r}")
        if P[r].root_dimension != Q[r].root_dimension:
            raise RadiusMismatch("profiles are rooted at different dimensions")
    if universe is None:
        classes = set()
        for r in radii:
            classes |= P[r].support | Q[r].support
    else:
        classes = {c for c in universe if 1 <= c.radius <= r_max}
    ordered = sorted(classes, key=CanonicalCode.sort_key)
    total = 0.0
    for k, code in enumerate(ordered, start=1):
        diff = abs(P[code.radius].frequency(code) - Q[code.radius].frequency(code))
        if diff:
            total += math.ldexp(diff, -k)
    return Distance(total, math.ldexp(1.0, -len(ordered)), len(ordered))


@dataclass
class CorpusEntry:
    complex: SimplicialComplex
    profiles: dict[int, LocalProfile]
    betti: list[int]
    n_vertices: int
    name: str = ""

    def normalized_betti(self, i: int) -> float:
        b = self.betti[i] if i < len(self.betti) else 0
        return b / self.n_vertices


@dataclass
class ReferenceCorpus:
    """Finite list of reference complexes with exact profiles at radii <= radius."""

    entries: list[CorpusEntry]
    radius: int
    tolerance: float
    degree_bound: int
    _codes: set = field(default_factory=set, repr=False)

    @classmethod
    def build(cls, complexes: Sequence[SimplicialComplex], radius: int, tolerance: float,
              names: Sequence[str] | None = None) -> "ReferenceCorpus":
        if not complexes:
            raise InvalidParameter("corpus needs at least one complex")
        if radius < 1 or not tolerance > 0:
            raise InvalidParameter("corpus needs radius >= 1 and tolerance > 0")
        d = max(K.degree_bound for K in complexes)
        entries = []
        for k, K in enumerate(complexes):
            if K.degree_bound != d:
                K = build_complex(K.maximal_simplices(), d)
            entries.append(CorpusEntry(K, exact_profiles(K, radius), betti_exact(K),
                                       K.n_simplices(0), names[k] if names else f"L{k}"))
        codes = set()
        for e in entries:
            for p in e.profiles.values():
                codes |= p.support
        return cls(entries, radius, tolerance, d, codes)

    @property
    def codes(self) -> set[CanonicalCode]:
        return self._codes


class TesterResult(NamedTuple):
    estimate: float
    matched_index: int
    n_used: int
    deviation: float


def test_betti(M: SimplicialComplex, corpus: ReferenceCorpus, i: int, eps: float, seed) -> TesterResult:
    """Per-vertex Betti number guess read off the first corpus entry matching M locally.

    Samples N vertices of M, with N from ``sample_size_for(rho, eps, |A|)`` and
    |A| twice the classes seen in the corpus and the sample (the sample is
    topped up if it reveals new classes), and accepts the first entry whose
    exact profile is within rho/5 of the sample frequencies at every radius.
    """
    if not 0 < eps < 1:
        raise InvalidParameter("eps must lie in (0, 1)")
    r, rho = corpus.radius, corpus.tolerance
    rng = np.random.default_rng(seed)
    roots = roots_of(M, 0)
    if not roots:
        raise EmptyComplex("cannot test the empty complex")
    seen = set(corpus.codes)
    bound = max(1, 2 * len(seen))
    sample: list = []
    while True:
        N = sample_size_for(rho, eps, bound)
        if N > len(sample):
            picks = rng.integers(0, len(roots), size=N - len(sample))
            fresh = [roots[k] for k in picks]
            for root in fresh:
                for rr in range(1, r + 1):
                    seen.add(ball_code(M, root, rr))
            sample.extend(fresh)
        if 2 * len(seen) <= bound:
            break
        bound = 2 * len(seen)
    empirical = {rr: _profile_of(M, sample, rr, 0) for rr in range(1, r + 1)}
    threshold = rho / 5
    best = (math.inf, -1)
    for j, entry in enumerate(corpus.entries):
        dev = sup_deviation(empirical, entry.profiles, range(1, r + 1))
        if dev < threshold:
            return TesterResult(entry.normalized_betti(i), j, len(sample), dev)
        best = min(best, (dev, j))
    raise NoMatch(best[1], best[0], threshold)


test_betti.__test__ = False  # not a pytest test despite the name
