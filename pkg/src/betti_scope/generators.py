"""Deterministic and seeded families of bounded-degree complexes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence

import networkx as nx
import numpy as np

from .complex import SimplicialComplex, build_complex
from .errors import InvalidSpec

KINDS = ("disjoint_union", "torus_grid", "sphere_boundary", "simplex", "cycle", "path", "random_flag")
ALIASES = {"torus": "torus_grid", "sphere": "sphere_boundary", "flag": "random_flag",
           "union": "disjoint_union"}


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of one generated complex.

    ``size`` means: grid side for ``torus_grid``, k for ``sphere_boundary``
    (boundary of the (k+1)-simplex) and ``simplex``, vertex count for
    ``cycle``, ``path`` and ``random_flag``, number of copies of ``base`` for
    ``disjoint_union``.
    """

    kind: str
    size: int
    degree_bound: int | None = None
    seed: int | None = None
    base: "FamilySpec | None" = None
    max_dim: int | None = None
    fill: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ALIASES.get(self.kind, self.kind))


def torus_grid(n: int) -> SimplicialComplex:
    """n x n torus, each square split along the diagonal (i, j)-(i+1, j+1)."""
    if n < 3:
        raise InvalidSpec(f"torus_grid needs n >= 3, got {n}")

    def v(i, j):
        return (i % n) * n + (j % n)

    tris = []
    for i in range(n):
        for j in range(n):
            tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            tris.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
    return build_complex(tris, 6)


def sphere_boundary(k: int) -> SimplicialComplex:
    """Boundary of the (k+1)-simplex, a triangulated k-sphere on k+2 vertices."""
    if k < 0:
        raise InvalidSpec("sphere_boundary needs k >= 0")
    return build_complex(itertools.combinations(range(k + 2), k + 1), max(k + 1, 1))


def full_simplex(k: int) -> SimplicialComplex:
    if k < 0:
        raise InvalidSpec("simplex needs k >= 0")
    return build_complex([tuple(range(k + 1))], max(k, 1))


def cycle(n: int) -> SimplicialComplex:
    if n < 3:
        raise InvalidSpec(f"cycle needs at least 3 vertices, got {n}")
    return build_complex([(i, (i + 1) % n) for i in range(n)], 2)


def path(n: int) -> SimplicialComplex:
    if n < 1:
        raise InvalidSpec("path needs at least one vertex")
    if n == 1:
        return build_complex([(0,)], 2)
    return build_complex([(i, i + 1) for i in range(n - 1)], 2)


def hollow_triangle() -> SimplicialComplex:
    return cycle(3)


def solid_triangle() -> SimplicialComplex:
    return build_complex([(0, 1, 2)], 3)


def disjoint_union(parts: Sequence[SimplicialComplex] | SimplicialComplex, copies: int | None = None,
                   ) -> SimplicialComplex:
    """Disjoint union with vertex ids shifted so the parts do not meet."""
    if isinstance(parts, SimplicialComplex):
        parts = [parts] * (1 if copies is None else copies)
    if not parts:
        raise InvalidSpec("disjoint union of nothing")
    d = max(K.degree_bound for K in parts)
    tops = []
    offset = 0
    for K in parts:
        verts = K.vertices
        for s in K.maximal_simplices():
            tops.append(tuple(v + offset for v in s))
        offset += (max(verts) + 1) if verts else 0
    return build_complex(tops, d)


def random_bounded_graph(n: int, d: int, rng: np.random.Generator, fill: float = 1.0) -> nx.Graph:
    """Random graph with maximum degree <= d.

    Candidate edges are drawn uniformly and rejected when an endpoint is
    already saturated, until about ``fill * n * d / 2`` edges are placed or the
    attempt budget runs out.
    """
    G = nx.Graph()
    G.add_nodes_from(range(n))
    if n < 2:
        return G
    target = int(fill * n * d / 2)
    budget = 20 * target + 100
    deg = [0] * n
    edges: set[tuple[int, int]] = set()
    drawn = 0
    while len(edges) < target and drawn < budget:
        batch = rng.integers(0, n, size=(min(4096, budget - drawn), 2)).tolist()
        for u, v in batch:
            drawn += 1
            if u == v or deg[u] >= d or deg[v] >= d:
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                continue
            edges.add(e)
            deg[u] += 1
            deg[v] += 1
            if len(edges) >= target:
                break
    G.add_edges_from(sorted(edges))
    return G


def random_flag(n: int, d: int, seed, max_dim: int | None = None, fill: float = 1.0) -> SimplicialComplex:
    """Clique complex of a seeded random graph of maximum degree d."""
    if n < 1 or d < 1:
        raise InvalidSpec("random_flag needs n >= 1 and d >= 1")
    top = d if max_dim is None else min(max_dim, d)
    G = random_bounded_graph(n, d, np.random.default_rng(seed), fill)
    cliques = [tuple(sorted(c)) for c in nx.enumerate_all_cliques(G) if len(c) <= top + 1]
    return build_complex(cliques, d)


def generate(spec: FamilySpec) -> SimplicialComplex:
    kind, n = spec.kind, spec.size
    if kind not in KINDS:
        raise InvalidSpec(f"unknown family kind {spec.kind!r}")
    if kind == "torus_grid":
        K = torus_grid(n)
    elif kind == "sphere_boundary":
        K = sphere_boundary(n)
    elif kind == "simplex":
        K = full_simplex(n)
    elif kind == "cycle":
        K = cycle(n)
    elif kind == "path":
        K = path(n)
    elif kind == "random_flag":
        if spec.degree_bound is None or spec.seed is None:
            raise InvalidSpec("random_flag needs degree_bound and seed")
        return random_flag(n, spec.degree_bound, spec.seed, spec.max_dim, spec.fill)
    else:
        if spec.base is None or n < 1:
            raise InvalidSpec("disjoint_union needs a base spec and at least one copy")
        K = disjoint_union(generate(spec.base), n)
    if spec.degree_bound is not None and spec.degree_bound != K.degree_bound:
        K = build_complex(K.maximal_simplices(), spec.degree_bound)
    return K


def convergent_sequence(spec: FamilySpec, sizes: Sequence[int]) -> list[SimplicialComplex]:
    """Members of one family at strictly increasing sizes."""
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidSpec("sizes must be strictly increasing")
    return [generate(replace(spec, size=s)) for s in sizes]
