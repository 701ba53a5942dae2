"""Exact canonical forms of rooted balls.

The search is the usual individualization/refinement scheme: an equitable
vertex coloring is refined from root distance and simplex incidences, the
first non-singleton cell is split by individualizing each of its vertices in
turn, and the lexicographically smallest relabeled simplex list over all
leaves is kept.  Automorphisms found by equal leaves prune sibling branches
lying in one orbit.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .complex import RootedBall

Encoding = tuple[int, tuple[tuple[tuple[int, ...], ...], ...]]


@dataclass(frozen=True)
class CanonicalCode:
    bytes: bytes
    radius: int
    root_dimension: int

    def sort_key(self):
        return (self.radius, self.root_dimension, self.bytes)

    def __lt__(self, other: "CanonicalCode") -> bool:
        return self.sort_key() < other.sort_key()

    def hex(self) -> str:
        return self.bytes.hex()

    @classmethod
    def fromhex(cls, text: str, radius: int, root_dimension: int) -> "CanonicalCode":
        return cls(bytes.fromhex(text), radius, root_dimension)


def _compress(keys: list) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


class _Canonizer:
    def __init__(self, n: int, simplices: list[tuple[int, ...]], initial: list):
        self.n = n
        self.simplices = simplices
        self.incid: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
        for s in simplices:
            for v in s:
                self.incid[v].append(s)
        self.initial = _compress(initial)
        self.best: Encoding | None = None
        self.leaves: dict[Encoding, list[int]] = {}
        self.generators: list[list[int]] = self._twin_swaps()

    def _twin_swaps(self) -> list[list[int]]:
        """Transpositions (u v) that map the simplex set onto itself.

        Twins are found cheaply up front and seed the automorphism group, so
        cells of mutual twins are searched through one branch only.
        """
        link = [frozenset(frozenset(x for x in s if x != v) for s in self.incid[v]) for v in range(self.n)]
        buckets: dict = {}
        for v in range(self.n):
            buckets.setdefault((self.initial[v], len(self.incid[v])), []).append(v)
        out = []
        for group in buckets.values():
            for a, u in enumerate(group):
                for v in group[a + 1:]:
                    lu = {f for f in link[u] if v not in f}
                    lv = {f for f in link[v] if u not in f}
                    if lu == lv and {f - {v} for f in link[u] if v in f} == {f - {u} for f in link[v] if u in f}:
                        g = list(range(self.n))
                        g[u], g[v] = v, u
                        out.append(g)
                        break
        return out

    def refine(self, colors: list[int]) -> list[int]:
        k = len(set(colors))
        while k < self.n:
            sig = []
            for v in range(self.n):
                around = sorted(
                    (len(s), tuple(sorted(colors[u] for u in s if u != v)))
                    for s in self.incid[v]
                )
                sig.append((colors[v], tuple(around)))
            new = _compress(sig)
            k_new = max(new) + 1
            if k_new == k:
                return new
            colors, k = new, k_new
        return colors

    def encode(self, labels: list[int]) -> Encoding:
        by_dim: dict[int, list[tuple[int, ...]]] = {}
        for s in self.simplices:
            by_dim.setdefault(len(s), []).append(tuple(sorted(labels[v] for v in s)))
        top = max(by_dim, default=1)
        return (self.n, tuple(tuple(sorted(by_dim.get(k, ()))) for k in range(2, top + 1)))

    def _orbits(self, prefix: list[int]):
        """Union-find over orbits of the generators fixing ``prefix`` pointwise.

        Returns ``find``; calling ``update()`` folds in generators found since.
        """
        parent = list(range(self.n))
        used = [0]

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def update():
            for g in self.generators[used[0]:]:
                if all(g[p] == p for p in prefix):
                    for v in range(self.n):
                        a, b = find(v), find(g[v])
                        if a != b:
                            parent[a] = b
            used[0] = len(self.generators)

        update()
        return find, update

    def search(self, colors: list[int], prefix: list[int], ancestors: list) -> None:
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, m in counts.items() if m > 1), default=None)
        if target is None:
            self._leaf(colors)
            return
        cell = [v for v in range(self.n) if colors[v] == target]
        find, update = self._orbits(prefix)
        done: list[int] = []
        current = [None]

        def redundant() -> bool:
            # the branch being explored here is an image of an explored sibling
            if not done or current[0] is None:
                return False
            update()
            return find(current[0]) in {find(x) for x in done}

        for w in cell:
            if any(check() for check in ancestors):
                return
            current[0] = w
            if redundant():
                continue
            split = [2 * c + (c == target and v != w) for v, c in enumerate(colors)]
            self.search(self.refine(_compress(split)), prefix + [w], ancestors + [redundant])
            done.append(w)

    def _leaf(self, labels: list[int]) -> None:
        enc = self.encode(labels)
        seen = self.leaves.get(enc)
        if seen is not None:
            inverse = [0] * self.n
            for v, lab in enumerate(seen):
                inverse[lab] = v
            self.generators.append([inverse[labels[v]] for v in range(self.n)])
            return
        self.leaves[enc] = labels
        if self.best is None or enc < self.best:
            self.best = enc

    def run(self) -> Encoding:
        self.search(self.refine(self.initial), [], [])
        assert self.best is not None
        return self.best


def canonical_form(vertices, simplices, root_vertices) -> Encoding:
    """Canonical encoding of a complex with a distinguished root vertex set."""
    verts = sorted(vertices)
    local = {v: k for k, v in enumerate(verts)}
    simp = [tuple(local[v] for v in s) for s in simplices if len(s) > 1]
    roots = {local[v] for v in root_vertices}
    adj: list[list[int]] = [[] for _ in verts]
    for s in simp:
        if len(s) == 2:
            adj[s[0]].append(s[1])
            adj[s[1]].append(s[0])
    dist = [-1] * len(verts)
    queue = deque(roots)
    for v in roots:
        dist[v] = 0
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    initial = [(v not in roots, dist[v] if dist[v] >= 0 else len(verts)) for v in range(len(verts))]
    return _Canonizer(len(verts), simp, initial).run()


def _to_bytes(enc: Encoding) -> bytes:
    n, layers = enc
    parts = [str(n)]
    for layer in layers:
        parts.append(";".join(",".join(map(str, s)) for s in layer))
    return "|".join(parts).encode("ascii")


def canonical_code(b: RootedBall) -> CanonicalCode:
    """Code shared by exactly the balls related by a root-preserving isomorphism."""
    K = b.ball
    simplices = [s for i in range(1, K.dimension + 1) for s in K.simplices(i)]
    enc = canonical_form(K.vertices, simplices, b.root_vertices)
    return CanonicalCode(_to_bytes(enc), b.radius, b.root_dimension)
