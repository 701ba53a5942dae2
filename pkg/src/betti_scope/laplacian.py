"""Coboundary operators, combinatorial Laplacians and their spectral measures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate
import scipy.sparse as sp

from .complex import Simplex, SimplicialComplex
from .errors import EmptyComplex, TooLarge
from .exact import characteristic_polynomial, dense_rows, integer_rank, matrix_rank

DEFAULT_CAP = 2000


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Integer matrix indexed by simplices.

    ``kind`` is ``"coboundary"`` (rows are (i+1)-simplices, columns
    i-simplices), ``"laplacian"`` (square on i-simplices) or ``"matrix"``.
    """

    matrix: sp.csr_matrix
    rows: tuple
    cols: tuple
    domain_dim: int = 0
    kind: str = "matrix"

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    @classmethod
    def from_array(cls, A, kind: str = "matrix") -> "SparseOperator":
        M = sp.csr_matrix(np.asarray(A, dtype=np.int64))
        return cls(M, tuple(range(M.shape[0])), tuple(range(M.shape[1])), 0, kind)

    def to_triplets(self) -> str:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = [f"% {self.shape[0]} {self.shape[1]} {coo.nnz}"]
        lines += [f"{coo.row[k]} {coo.col[k]} {coo.data[k]}" for k in order]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplets(cls, text: str) -> "SparseOperator":
        header, *body = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols, nnz = (int(x) for x in header.lstrip("%").split())
        r, c, v = [], [], []
        for ln in body[:nnz]:
            a, b, x = ln.split()
            r.append(int(a)); c.append(int(b)); v.append(int(x))
        M = sp.csr_matrix((v, (r, c)), shape=(rows, cols), dtype=np.int64)
        return cls(M, tuple(range(rows)), tuple(range(cols)))


def coboundary(K: SimplicialComplex, q: int) -> SparseOperator:
    """Matrix of d_q : C^q -> C^{q+1}.

    Row (a_0..a_{q+1}) has entry (-1)^j on the face omitting a_j, where the
    a_j are listed in the complex's orientation.
    """
    faces, cofaces = K.simplices(q), K.simplices(q + 1)
    idx = K.index(q)
    r, c, v = [], [], []
    for row, s in enumerate(cofaces):
        ordered = K.oriented(s)
        for j in range(len(ordered)):
            face = tuple(sorted(ordered[:j] + ordered[j + 1:]))
            r.append(row)
            c.append(idx[face])
            v.append(-1 if j % 2 else 1)
    M = sp.csr_matrix((v, (r, c)), shape=(len(cofaces), len(faces)), dtype=np.int64)
    return SparseOperator(M, cofaces, faces, q, "coboundary")


def laplacian(K: SimplicialComplex, i: int) -> SparseOperator:
    """Delta^i = d_{i-1} d_{i-1}^* + d_i^* d_i on i-cochains (first term absent for i=0)."""
    key = ("laplacian", i)
    if key not in K._cache:
        up = coboundary(K, i).matrix
        L = (up.T @ up).tocsr()
        if i >= 1:
            down = coboundary(K, i - 1).matrix
            L = (L + down @ down.T).tocsr()
        L.sum_duplicates()
        L.eliminate_zeros()
        L.sort_indices()
        simp = K.simplices(i)
        K._cache[key] = SparseOperator(L.astype(np.int64), simp, simp, i, "laplacian")
    return K._cache[key]


def coboundary_ranks(K: SimplicialComplex) -> list[int]:
    """Exact ranks of d_0, ..., d_{dim-1}."""
    return [integer_rank(dense_rows(coboundary(K, q).matrix)) for q in range(max(K.dimension, 0))]


def betti_exact(K: SimplicialComplex) -> list[int]:
    """Real Betti numbers b^i = |K_i| - rank d_i - rank d_{i-1}, by exact rank."""
    if K.dimension < 0:
        raise EmptyComplex("Betti numbers of the empty complex are not defined")
    ranks = coboundary_ranks(K) + [0]
    out = []
    for i in range(K.dimension + 1):
        below = ranks[i - 1] if i >= 1 else 0
        out.append(K.n_simplices(i) - ranks[i] - below)
    return out


def kernel_dimension(A: SparseOperator) -> int:
    """dim Ker A over Q."""
    return A.shape[1] - matrix_rank(A.matrix)


def norm_bound(A: SparseOperator | np.ndarray) -> float:
    """Operator-norm bound 2*L*M, floored at 1.

    L is the largest number of nonzeros in a row or column, M the largest
    absolute entry.
    """
    M = A.matrix if isinstance(A, SparseOperator) else sp.csr_matrix(np.asarray(A))
    M = sp.csr_matrix(M)
    M.eliminate_zeros()
    if M.nnz == 0:
        return 1.0
    per_row = np.diff(M.indptr).max()
    per_col = np.diff(M.tocsc().indptr).max()
    L = int(max(per_row, per_col))
    big = float(np.abs(M.data).max())
    return max(2.0 * L * big, 1.0)


@dataclass(frozen=True)
class SpectralMeasure:
    """Normalized spectral measure: distinct eigenvalues with multiplicities, mass 1/n each."""

    values: np.ndarray
    multiplicities: np.ndarray
    n: int
    support_bound: float

    @property
    def weights(self) -> np.ndarray:
        return self.multiplicities / self.n

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.repeat(self.values, self.multiplicities)

    def mass(self, value: float, tol: float = 1e-9) -> float:
        hit = np.abs(self.values - value) <= tol * max(1.0, abs(value))
        return float(self.multiplicities[hit].sum()) / self.n

    @property
    def kernel_multiplicity(self) -> int:
        return int(self.multiplicities[self.values == 0].sum())

    @property
    def kernel_fraction(self) -> float:
        return self.kernel_multiplicity / self.n

    def cdf(self, lam) -> np.ndarray | float:
        """sigma(lam) = mu([0, lam])."""
        lam_arr = np.asarray(lam, dtype=float)
        cum = np.concatenate([[0], np.cumsum(self.multiplicities)]) / self.n
        out = cum[np.searchsorted(self.values, lam_arr, side="right")]
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_eigenvalues(cls, eigenvalues, support_bound: float, tol: float = 1e-9) -> "SpectralMeasure":
        ev = np.sort(np.asarray(eigenvalues, dtype=float))
        values, mults = [], []
        zeros = int(np.count_nonzero(ev == 0))
        if zeros:
            values.append(0.0)
            mults.append(zeros)
        rest = ev[ev != 0]
        start = 0
        for k in range(1, rest.size + 1):
            if k == rest.size or rest[k] - rest[k - 1] > tol * max(1.0, support_bound):
                values.append(float(rest[start:k].mean()))
                mults.append(k - start)
                start = k
        order = np.argsort(values, kind="stable")
        return cls(np.array(values, dtype=float)[order], np.array(mults, dtype=int)[order],
                   ev.size, support_bound)


def _dense(A: SparseOperator | np.ndarray) -> np.ndarray:
    return A.toarray() if isinstance(A, SparseOperator) else np.asarray(A)


def exact_spectrum(A: SparseOperator | np.ndarray, cap: int = DEFAULT_CAP) -> SpectralMeasure:
    """All eigenvalues of a symmetric integer matrix with multiplicities.

    The kernel multiplicity comes from exact rank; the remaining eigenvalues
    from a dense symmetric eigensolve.
    """
    D = _dense(A)
    n = D.shape[0]
    if n > cap:
        raise TooLarge(n, cap)
    K = norm_bound(A)
    if n == 0:
        return SpectralMeasure.from_eigenvalues([], K)
    ev = np.linalg.eigvalsh(D.astype(float))
    nullity = n - matrix_rank(D)
    ev[np.argsort(np.abs(ev), kind="stable")[:nullity]] = 0.0
    return SpectralMeasure.from_eigenvalues(ev, K)


def pseudo_determinant(A: SparseOperator | np.ndarray, cap: int = DEFAULT_CAP) -> int:
    """|q(0)| where det(tI - A) = t^s q(t), q(0) != 0: the product of nonzero eigenvalues."""
    D = _dense(A)
    if D.shape[0] > cap:
        raise TooLarge(D.shape[0], cap)
    coeffs = characteristic_polynomial(D)
    return abs(next(c for c in coeffs if c != 0))


def is_psd_exact(A: SparseOperator | np.ndarray, cap: int = DEFAULT_CAP) -> bool:
    """Exact PSD test for a symmetric integer matrix.

    A real-rooted det(tI - A) has no negative roots iff its coefficients
    alternate in sign.
    """
    D = _dense(A)
    if D.shape[0] > cap:
        raise TooLarge(D.shape[0], cap)
    if not np.array_equal(D, D.T):
        return False
    coeffs = characteristic_polynomial(D)
    n = len(coeffs) - 1
    return all(c * (-1) ** (n - k) >= 0 for k, c in enumerate(coeffs))


def log_determinant_c(m: SpectralMeasure) -> float:
    """c(mu) = (1/n) * sum of log(lambda) over nonzero eigenvalues."""
    if m.n == 0:
        return 0.0
    pos = m.values > 0
    return float(np.sum(m.multiplicities[pos] * np.log(m.values[pos]))) / m.n


def kernel_gap_integral(m: SpectralMeasure, K: float | None = None) -> float:
    """Integral over [0, K] of (sigma(lam) - sigma(0)) / lam, in closed form.

    Each nonzero atom at lambda_j <= K contributes (1/n) log(K / lambda_j).
    When c(mu) >= 0 this is at most log K.
    """
    K = m.support_bound if K is None else K
    pos = (m.values > 0) & (m.values <= K)
    if m.n == 0:
        return 0.0
    return float(np.sum(m.multiplicities[pos] * np.log(K / m.values[pos]))) / m.n


def cut_bound(K: float, lam: float) -> float:
    """log K / log(1/lam): bound on sigma(lam) - sigma(0) implied by c(mu) >= 0."""
    return math.log(K) / math.log(1.0 / lam)


def stieltjes_check(f: Callable[[float], float], fprime: Callable[[float], float],
                    m: SpectralMeasure, eps: float, K: float | None = None,
                    ) -> tuple[float, float]:
    """Both sides of the integration-by-parts identity on [eps, K].

    Left: sum of f over atoms in (eps, K].  Right:
    -int f'(lam) F(lam) dlam + f(K) F(K) - f(eps) F(eps), the integral taken by
    adaptive quadrature piecewise between atoms, where F is constant.
    """
    K = m.support_bound if K is None else K
    inside = (m.values > eps) & (m.values <= K)
    lhs = float(sum(f(v) * w for v, w in zip(m.values[inside], m.weights[inside])))
    cuts = [eps] + [float(v) for v in m.values[inside] if v < K] + [K]
    integral = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        F = m.cdf(a)
        if F == 0:
            continue
        part, _ = scipy.integrate.quad(fprime, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        integral += F * part
    rhs = -integral + f(K) * m.cdf(K) - f(eps) * m.cdf(eps)
    return lhs, float(rhs)


def laplacian_pseudo_determinant(K: SimplicialComplex, i: int, cap: int = DEFAULT_CAP) -> int:
    """pdet(Delta^i) from the two smaller Gram matrices of the coboundaries.

    d_{i-1} d_{i-1}^* and d_i^* d_i have orthogonal ranges because d_i d_{i-1} = 0,
    so the nonzero spectrum of Delta^i is the union of theirs, and each shares
    its nonzero spectrum with the transposed product d_{i-1}^* d_{i-1} (on
    (i-1)-cochains) or d_i d_i^* (on (i+1)-cochains).
    """
    out = 1
    up = coboundary(K, i).matrix
    if up.shape[0]:
        out *= pseudo_determinant(_smaller_gram(up), cap)
    if i >= 1:
        down = coboundary(K, i - 1).matrix
        if down.shape[1]:
            out *= pseudo_determinant(_smaller_gram(down), cap)
    return out


def _smaller_gram(B) -> np.ndarray:
    # B B^T and B^T B have the same nonzero eigenvalues
    G = B @ B.T if B.shape[0] <= B.shape[1] else B.T @ B
    return G.toarray()
