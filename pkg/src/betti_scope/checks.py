"""Invariant checks run by ``betti-scope verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex
from .laplacian import (
    DEFAULT_CAP,
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
)

EXACT_PSD_CAP = 300


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def adjacent(K: SimplicialComplex, i: int, s, t) -> bool:
    """Support relation of Delta^i: shared vertex for i >= 1, an edge for i = 0."""
    if i == 0:
        return (min(s[0], t[0]), max(s[0], t[0])) in K.index(1)
    return bool(set(s) & set(t))


def coboundary_squares_to_zero(K: SimplicialComplex) -> CheckResult:
    bad = []
    for q in range(K.dimension - 1):
        prod = coboundary(K, q + 1).matrix @ coboundary(K, q).matrix
        prod.eliminate_zeros()
        if prod.nnz:
            bad.append(q)
    return CheckResult("d_{q+1} d_q = 0", not bad, f"failing q: {bad}" if bad else "")


def laplacian_structure(K: SimplicialComplex, i: int) -> CheckResult:
    """Symmetric, integer, |entries| <= d+1, supported on adjacent pairs."""
    L = laplacian(K, i).matrix.tocoo()
    simp = K.simplices(i)
    problems = []
    if (abs(L - L.T)).nnz:
        problems.append("not symmetric")
    if L.nnz and np.abs(L.data).max() > K.degree_bound + 1:
        problems.append(f"entry {np.abs(L.data).max()} > d+1")
    if L.nnz and (L.diagonal() < 0).any():
        problems.append("negative diagonal")
    for r, c in zip(L.row, L.col):
        if r != c and not adjacent(K, i, simp[r], simp[c]):
            problems.append(f"entry at non-adjacent {simp[r]}, {simp[c]}")
            break
    return CheckResult(f"Delta^{i} structure", not problems, "; ".join(problems))


def run_invariants(K: SimplicialComplex, cap: int = DEFAULT_CAP) -> list[CheckResult]:
    out = [coboundary_squares_to_zero(K)]
    betti = betti_exact(K)
    chi = sum((-1) ** i * b for i, b in enumerate(betti))
    out.append(CheckResult("Euler characteristic", chi == K.euler_characteristic(),
                           f"sum (-1)^i b^i = {chi}, sum (-1)^i |K_i| = {K.euler_characteristic()}"))
    for i in range(K.dimension + 1):
        op = laplacian(K, i)
        out.append(laplacian_structure(K, i))
        if op.size > cap:
            out.append(CheckResult(f"Delta^{i} spectral checks", True, f"skipped: size {op.size} > cap {cap}"))
            continue
        m = exact_spectrum(op, cap)
        Kb = norm_bound(op)
        ev = m.eigenvalues
        if op.size <= EXACT_PSD_CAP:
            psd, how = is_psd_exact(op, cap), "exact"
        else:
            psd, how = bool(ev.min(initial=0.0) >= -1e-9 * Kb), "float"
        out.append(CheckResult(f"Delta^{i} PSD", psd, how))
        out.append(CheckResult(f"dim Ker Delta^{i} = b^{i}", m.kernel_multiplicity == betti[i],
                               f"{m.kernel_multiplicity} vs {betti[i]}"))
        top = float(ev.max(initial=0.0))
        out.append(CheckResult(f"norm bound Delta^{i}", Kb >= top - 1e-9 * Kb, f"K = {Kb:g}, max eigenvalue {top:.6g}"))
        pdet = laplacian_pseudo_determinant(K, i, cap)
        out.append(CheckResult(f"pdet Delta^{i} >= 1", pdet >= 1, f"{pdet.bit_length()} bits"))
        c_float = log_determinant_c(m)
        c_exact = math.log(pdet) / op.size if op.size else 0.0
        out.append(CheckResult(f"c(mu^{i}) >= 0", c_exact >= 0 and c_float >= -1e-9,
                               f"exact {c_exact:.6g}, spectral {c_float:.6g}"))
        gap = kernel_gap_integral(m, Kb)
        grid = np.geomspace(1e-6, 0.999, 60)
        cut_ok = all(m.cdf(x) - m.cdf(0.0) <= cut_bound(Kb, x) + 1e-12 for x in grid)
        out.append(CheckResult(f"log K bound Delta^{i}", gap <= math.log(Kb) + 1e-9 and cut_ok,
                               f"integral {gap:.6g} <= log K {math.log(Kb):.6g}"))
    return out
