"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools

import numpy as np
import sympy


def sympy_betti(maximal, n_dims=None):
    """Betti numbers from boundary matrices built from scratch, ranks by sympy."""
    faces = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            faces.update(itertools.combinations(s, k))
    by_dim = {}
    for f in faces:
        by_dim.setdefault(len(f) - 1, []).append(f)
    top = max(by_dim) if by_dim else -1
    for k in by_dim:
        by_dim[k].sort()
    ranks = {}
    for q in range(1, top + 1):
        idx = {f: j for j, f in enumerate(by_dim[q - 1])}
        M = sympy.zeros(len(by_dim[q - 1]), len(by_dim[q]))
        for c, s in enumerate(by_dim[q]):
            for j in range(len(s)):
                M[idx[s[:j] + s[j + 1:]], c] = (-1) ** j
        ranks[q] = M.rank()
    return [len(by_dim[k]) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(top + 1)]


def dense_boundary_laplacian(K, i):
    """Delta^i from a dense coboundary matrix built in sorted-vertex orientation."""
    def cob(q):
        lo, hi = K.simplices(q), K.simplices(q + 1)
        idx = {f: j for j, f in enumerate(lo)}
        D = np.zeros((len(hi), len(lo)), dtype=np.int64)
        for r, s in enumerate(hi):
            for j in range(len(s)):
                D[r, idx[s[:j] + s[j + 1:]]] = (-1) ** j
        return D
    up = cob(i)
    L = up.T @ up
    if i >= 1:
        down = cob(i - 1)
        L = L + down @ down.T
    return L


def rooted_isomorphic(ball_a, ball_b) -> bool:
    """Brute force over all vertex bijections preserving roots and simplices."""
    A, B = ball_a.ball, ball_b.ball
    if A.f_vector != B.f_vector or ball_a.radius != ball_b.radius:
        return False
    ra, rb = ball_a.root_vertices, ball_b.root_vertices
    if len(ra) != len(rb):
        return False
    va, vb = list(A.vertices), list(B.vertices)
    simp_b = {frozenset(s) for k in range(B.dimension + 1) for s in B.simplices(k)}
    simp_a = [s for k in range(A.dimension + 1) for s in A.simplices(k)]
    for perm in itertools.permutations(vb):
        m = dict(zip(va, perm))
        if {m[v] for v in ra} != set(rb):
            continue
        if all(frozenset(m[v] for v in s) in simp_b for s in simp_a):
            return True
    return False
