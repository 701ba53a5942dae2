"""Exact integer linear algebra: fraction-free sparse rank and characteristic polynomials."""
from __future__ import annotations

from math import gcd
from typing import Iterable, Mapping

import flint
import numpy as np

SparseRow = Mapping[int, int]


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {k: v // g for k, v in row.items()}


def integer_rank(rows: Iterable[SparseRow]) -> int:
    """Rank over Q of an integer matrix given as sparse rows.

    Rows are inserted one at a time into an echelon basis keyed by leading
    column.  Elimination is fraction-free (``b*r - a*p`` with the pair divided
    by its gcd) and every stored row is kept primitive, so entries stay small
    for the +-1 coboundary matrices this is used on.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        r = {c: int(v) for c, v in row.items() if v}
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = _primitive(r)
                break
            a, b = r[lead], p[lead]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {k: b * v for k, v in r.items()}
            for k, v in p.items():
                w = new.get(k, 0) - a * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            r = _primitive(new) if new else new
    return len(pivots)


def dense_rows(A) -> list[dict[int, int]]:
    """Sparse-row view of a dense or scipy sparse integer matrix."""
    if hasattr(A, "tocsr"):
        A = A.tocsr()
        out = []
        for k in range(A.shape[0]):
            lo, hi = A.indptr[k], A.indptr[k + 1]
            out.append({int(c): int(v) for c, v in zip(A.indices[lo:hi], A.data[lo:hi]) if v})
        return out
    A = np.asarray(A)
    return [{int(c): int(A[k, c]) for c in np.flatnonzero(A[k])} for k in range(A.shape[0])]


def matrix_rank(A) -> int:
    """Exact rank of a dense or sparse integer matrix (FLINT fraction-free elimination)."""
    A = np.asarray(A.toarray() if hasattr(A, "toarray") else A)
    if A.size == 0:
        return 0
    return flint.fmpz_mat([[int(x) for x in row] for row in A]).rank()


def characteristic_polynomial(A) -> list[int]:
    """Integer coefficients c_0..c_n of det(tI - A), lowest degree first."""
    A = np.asarray(A.toarray() if hasattr(A, "toarray") else A)
    n = A.shape[0]
    if n == 0:
        return [1]
    M = flint.fmpz_mat([[int(x) for x in row] for row in A])
    coeffs = [int(c) for c in M.charpoly().coeffs()]
    return coeffs + [0] * (n + 1 - len(coeffs))
