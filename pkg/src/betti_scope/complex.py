"""Bounded-degree simplicial complexes, orientations and rooted local balls."""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeExceeded,
    DuplicateSimplex,
    InvalidParameter,
    InvalidSimplex,
    UnknownSimplex,
    UnknownVertex,
)

Simplex = tuple[int, ...]


class SimplicialComplex:
    """Face-closed complex whose vertices each lie in at most ``degree_bound`` edges.

    Simplices are stored as strictly increasing vertex tuples.  An optional
    ``vertex_rank`` reorders vertices when an oriented view is requested; the
    underlying simplex sets never change.  Instances are treated as immutable.
    """

    def __init__(self, faces: Sequence[Iterable[Simplex]], degree_bound: int,
                 vertex_rank: dict[int, int] | None = None):
        self.degree_bound = int(degree_bound)
        self._faces: tuple[tuple[Simplex, ...], ...] = tuple(
            tuple(sorted(set(layer))) for layer in faces
        )
        while self._faces and not self._faces[-1]:
            self._faces = self._faces[:-1]
        self.vertex_rank = dict(vertex_rank) if vertex_rank is not None else None
        self._cache: dict = {}

    # -- basic structure -------------------------------------------------

    @property
    def dimension(self) -> int:
        """Largest i with a nonempty set of i-simplices; -1 for the empty complex."""
        return len(self._faces) - 1

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.simplices(0))

    def simplices(self, i: int) -> tuple[Simplex, ...]:
        if 0 <= i < len(self._faces):
            return self._faces[i]
        return ()

    def n_simplices(self, i: int) -> int:
        return len(self.simplices(i))

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self._faces)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.f_vector))

    def __len__(self) -> int:
        return sum(self.f_vector)

    def __contains__(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        return s in self.index(len(s) - 1)

    def index(self, i: int) -> dict[Simplex, int]:
        """Row index of each i-simplex in the sorted order."""
        key = ("index", i)
        if key not in self._cache:
            self._cache[key] = {s: k for k, s in enumerate(self.simplices(i))}
        return self._cache[key]

    def _stars(self) -> dict[int, tuple[Simplex, ...]]:
        if "star" not in self._cache:
            star: dict[int, list[Simplex]] = {v: [] for v in self.vertices}
            for layer in self._faces[1:]:
                for s in layer:
                    for v in s:
                        star[v].append(s)
            self._cache["star"] = {v: tuple(ss) for v, ss in star.items()}
        return self._cache["star"]

    def star(self, v: int) -> tuple[Simplex, ...]:
        """All simplices of dimension >= 1 that contain ``v``."""
        try:
            return self._stars()[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def neighbors(self, v: int) -> tuple[int, ...]:
        key = ("nbr", v)
        if key not in self._cache:
            self._cache[key] = tuple(
                sorted(u for e in self.star(v) if len(e) == 2 for u in e if u != v)
            )
        return self._cache[key]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def maximal_simplices(self) -> list[Simplex]:
        """Simplices that are not a proper face of another simplex, sorted."""
        covered: set[Simplex] = set()
        for layer in self._faces[1:]:
            for s in layer:
                for f in itertools.combinations(s, len(s) - 1):
                    covered.add(f)
        return sorted(s for layer in self._faces for s in layer if s not in covered)

    # -- orientation -----------------------------------------------------

    @property
    def is_oriented(self) -> bool:
        return self.vertex_rank is not None

    def oriented(self, simplex: Simplex) -> Simplex:
        """Vertex order that counts as the positive orientation of ``simplex``."""
        if self.vertex_rank is None:
            return tuple(sorted(simplex))
        return tuple(sorted(simplex, key=self.vertex_rank.__getitem__))

    def unoriented(self) -> "SimplicialComplex":
        return SimplicialComplex(self._faces, self.degree_bound)

    def same_simplices(self, other: "SimplicialComplex") -> bool:
        return self._faces == other._faces

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (self._faces == other._faces and self.degree_bound == other.degree_bound
                and self.vertex_rank == other.vertex_rank)

    def __hash__(self):
        return hash((self._faces, self.degree_bound))

    def __repr__(self):
        return f"SimplicialComplex(f_vector={self.f_vector}, degree_bound={self.degree_bound})"

    # -- derived complexes -----------------------------------------------

    def relabel(self, mapping: dict[int, int]) -> "SimplicialComplex":
        faces = [[tuple(sorted(mapping[v] for v in s)) for s in layer] for layer in self._faces]
        rank = None
        if self.vertex_rank is not None:
            rank = {mapping[v]: r for v, r in self.vertex_rank.items()}
        return SimplicialComplex(faces, self.degree_bound, rank)

    def subcomplex(self, simplices: Iterable[Simplex]) -> "SimplicialComplex":
        """Complex spanned by ``simplices`` (already known to be face-closed)."""
        faces: list[list[Simplex]] = []
        for s in simplices:
            k = len(s) - 1
            while len(faces) <= k:
                faces.append([])
            faces[k].append(s)
        return SimplicialComplex(faces, self.degree_bound)


def _closure(simplices: Iterable[Simplex]) -> list[set[Simplex]]:
    faces: list[set[Simplex]] = []
    for s in simplices:
        for k in range(1, len(s) + 1):
            while len(faces) < k:
                faces.append(set())
            faces[k - 1].update(itertools.combinations(s, k))
    return faces


def build_complex(maximal_simplices: Iterable[Sequence[int]], degree_bound: int) -> SimplicialComplex:
    """Face-close ``maximal_simplices`` and validate the degree bound.

    >>> build_complex([(0, 1, 2)], 3).f_vector
    (3, 3, 1)
    """
    if int(degree_bound) < 1:
        raise InvalidParameter("degree bound must be a positive integer")
    seen: set[Simplex] = set()
    tops: list[Simplex] = []
    for raw in maximal_simplices:
        s = tuple(sorted(int(v) for v in raw))
        if not s or len(set(s)) != len(s) or s[0] < 0:
            raise InvalidSimplex(raw)
        if s in seen:
            raise DuplicateSimplex(s)
        seen.add(s)
        tops.append(s)
    faces = _closure(tops)
    if len(faces) > 1:
        counts = Counter(v for e in faces[1] for v in e)
        for v in sorted(counts):
            if counts[v] > degree_bound:
                raise DegreeExceeded(v, counts[v], degree_bound)
    return SimplicialComplex(faces, degree_bound)


def orient_random(K: SimplicialComplex, seed) -> SimplicialComplex:
    """Copy of ``K`` oriented by a seeded uniform ranking of its vertices.

    A simplex is positively oriented when its vertices are listed in
    increasing rank, the discrete form of i.i.d. uniform vertex labels.
    """
    rng = np.random.default_rng(seed)
    verts = K.vertices
    ranks = rng.permutation(len(verts))
    return SimplicialComplex(K._faces, K.degree_bound,
                             {v: int(r) for v, r in zip(verts, ranks)})


@dataclass(frozen=True)
class RootedBall:
    ball: SimplicialComplex
    root: int | Simplex
    radius: int
    root_dimension: int = 0

    @property
    def root_vertices(self) -> tuple[int, ...]:
        if self.root_dimension == 0 and isinstance(self.root, int):
            return (self.root,)
        return tuple(self.root)


def vertex_distances(K: SimplicialComplex, sources: Iterable[int], r: int) -> dict[int, int]:
    """Graph distances in the 1-skeleton from ``sources``, truncated at ``r``."""
    dist = {}
    queue = deque()
    for s in sources:
        dist[s] = 0
        queue.append(s)
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for u in K.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def induced_simplices(K: SimplicialComplex, vertex_set) -> list[Simplex]:
    """All simplices of ``K`` whose vertices lie in ``vertex_set``."""
    out = [(v,) for v in vertex_set]
    for v in vertex_set:
        for s in K.star(v):
            # count each simplex once, from its smallest vertex
            if s[0] == v and all(u in vertex_set for u in s):
                out.append(s)
    return out


def extract_vertex_ball(K: SimplicialComplex, p: int, r: int) -> RootedBall:
    """B_r(p): the simplices of K spanned by vertices within distance r of p."""
    if r < 0:
        raise InvalidParameter("radius must be non-negative")
    if p not in K._stars():
        raise UnknownVertex(p)
    dist = vertex_distances(K, [p], r)
    return RootedBall(K.subcomplex(induced_simplices(K, dist.keys())), p, r, 0)


def simplex_distances(K: SimplicialComplex, sigma: Simplex, r: int) -> dict[Simplex, int]:
    """Distances from ``sigma`` among same-dimension simplices sharing a vertex."""
    i = len(sigma) - 1
    dist = {sigma: 0}
    queue = deque([sigma])
    while queue:
        tau = queue.popleft()
        if dist[tau] == r:
            continue
        for v in tau:
            for s in K.star(v):
                if len(s) == i + 1 and s not in dist:
                    dist[s] = dist[tau] + 1
                    queue.append(s)
    return dist


def extract_simplex_ball(K: SimplicialComplex, sigma: Sequence[int], r: int) -> RootedBall:
    """B^i_r(sigma) together with all faces of the collected i-simplices.

    For a 0-simplex the ball is the vertex ball B_r(p): two vertices never share
    a vertex, so graph distance in the 1-skeleton is used instead.
    """
    if r < 0:
        raise InvalidParameter("radius must be non-negative")
    s = tuple(sorted(sigma))
    if not s or s not in K.index(len(s) - 1):
        raise UnknownSimplex(s)
    if len(s) == 1:
        ball = extract_vertex_ball(K, s[0], r)
        return RootedBall(ball.ball, s, r, 0)
    collected = simplex_distances(K, s, r)
    faces = _closure(collected.keys())
    return RootedBall(SimplicialComplex(faces, K.degree_bound), s, r, len(s) - 1)
