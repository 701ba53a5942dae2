"""Sampled spectral-measure estimation of per-vertex Betti numbers.

Moments of the normalized spectral measure of Delta^i are averages of
diagonal entries of powers, and each diagonal entry depends only on a bounded
neighbourhood of its simplex.  Sampling simplices therefore gives moment
estimates at a cost independent of the size of the complex.  The distribution
function is reconstructed with a Jackson-damped Chebyshev expansion and the
kernel mass is read off at a small spectral cut, next to the a-priori bound
log K / log(1/cut) on the mass of small nonzero eigenvalues.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .complex import Simplex, SimplicialComplex, extract_simplex_ball
from .errors import DegenerateSupport, EmptyDimension, InvalidCut, InvalidParameter, UnknownSimplex
from .laplacian import laplacian, norm_bound

RAW_MOMENT_MAX = 8
R_CAP = 256
INT64_SAFE = 2**62


def local_diagonal_power(K: SimplicialComplex, sigma: Sequence[int], r: int) -> int:
    """((Delta^i)^r)(sigma, sigma) computed inside the ball around sigma.

    A closed walk of length r from sigma never leaves distance floor(r/2), so
    the principal submatrix of Delta^i on that ball carries the whole entry.
    """
    if r < 0:
        raise InvalidParameter("power must be non-negative")
    s = tuple(sorted(sigma))
    i = len(s) - 1
    if not s or s not in K.index(i):
        raise UnknownSimplex(s)
    if r == 0:
        return 1
    ball = extract_simplex_ball(K, s, r // 2).ball
    local = ball.simplices(i)
    idx = K.index(i)
    rows = [idx[t] for t in local]
    A = laplacian(K, i).matrix[rows][:, rows].toarray().astype(object)
    v = np.zeros(len(local), dtype=object)
    v[local.index(s)] = 1
    for _ in range(r // 2):
        v = A.dot(v)
    if r % 2:
        return int(v.dot(A.dot(v)))
    return int(v.dot(v))


def _row_abs_sum(A: sp.csr_matrix) -> int:
    return int(abs(A).sum(axis=1).max()) if A.nnz else 0


def diagonal_powers(K: SimplicialComplex, i: int, columns: Sequence[int], R: int) -> np.ndarray:
    """Exact (Delta^i)^r (sigma, sigma) for r = 0..R and each column index sigma.

    Returns an integer array of shape (len(columns), R + 1); entries are
    Python ints when int64 could overflow.
    """
    A = laplacian(K, i).matrix
    n = A.shape[0]
    cols = np.asarray(columns, dtype=np.int64)
    half = R // 2
    out_dtype = np.int64
    growth = max(_row_abs_sum(A), 1)
    if growth ** (R + 1) * max(n, 1) >= INT64_SAFE:
        out_dtype = object
    out = np.zeros((len(cols), R + 1), dtype=out_dtype)
    out[:, 0] = 1
    if R == 0 or len(cols) == 0:
        return out
    if out_dtype is object:
        D = A.toarray().astype(object)
        for k, c in enumerate(cols):
            v = np.zeros(n, dtype=object)
            v[c] = 1
            for h in range(half + 1):
                w = D.dot(v)
                if 2 * h <= R:
                    out[k, 2 * h] = int(v.dot(v))
                if 2 * h + 1 <= R:
                    out[k, 2 * h + 1] = int(v.dot(w))
                v = w
        return out
    V = sp.csc_matrix((np.ones(len(cols), dtype=np.int64), (cols, np.arange(len(cols)))),
                      shape=(n, len(cols)))
    for h in range(half + 1):
        W = (A @ V).tocsc()
        if 2 * h <= R:
            out[:, 2 * h] = np.asarray(V.multiply(V).sum(axis=0)).ravel()
        if 2 * h + 1 <= R:
            out[:, 2 * h + 1] = np.asarray(V.multiply(W).sum(axis=0)).ravel()
        V = W
    return out


def _sample_columns(n: int, S: int | None, seed) -> np.ndarray:
    if S is None:
        return np.arange(n)
    if S < 1:
        raise InvalidParameter("sample count must be at least 1")
    return np.random.default_rng(seed).integers(0, n, size=S)


def estimate_moments(K: SimplicialComplex, i: int, R: int, S: int | None, seed=None) -> list[Fraction]:
    """m_r = average over sampled i-simplices of (Delta^i)^r (sigma, sigma), r = 0..R.

    ``S=None`` averages over every i-simplex once, which is the normalized
    trace (1/|K_i|) Tr (Delta^i)^r exactly.
    """
    n = K.n_simplices(i)
    if n == 0:
        raise EmptyDimension(f"complex has no {i}-simplices")
    cols = _sample_columns(n, S, seed)
    uniq, mult = np.unique(cols, return_counts=True)
    diag = diagonal_powers(K, i, uniq, R)
    moments = [Fraction(1)]
    for r in range(1, R + 1):
        total = sum(int(c) * int(x) for c, x in zip(mult, diag[:, r]))
        moments.append(Fraction(total, len(cols)))
    return moments


def chebyshev_moments(K: SimplicialComplex, i: int, R: int, bound: float,
                      S: int | None = None, seed=None, block: int = 512) -> np.ndarray:
    """Averages over sampled i-simplices of T_k(2 Delta^i / bound - 1)(sigma, sigma), k = 0..R.

    Uses v_k = T_k e_sigma with the doubling relations
    mu_2k = 2 <v_k, v_k> - mu_0 and mu_2k+1 = 2 <v_k+1, v_k> - mu_1.
    Columns stay sparse while their support is small.
    """
    n = K.n_simplices(i)
    if n == 0:
        raise EmptyDimension(f"complex has no {i}-simplices")
    if bound <= 0:
        raise DegenerateSupport("spectral support bound must be positive")
    cols = _sample_columns(n, S, seed)
    uniq, mult = np.unique(cols, return_counts=True)
    A = laplacian(K, i).matrix.astype(float)
    H = (A * (2.0 / bound) - sp.identity(n, format="csr")).tocsr()
    acc = np.zeros(R + 1)
    half = (R + 1) // 2
    for start in range(0, len(uniq), block):
        c = uniq[start:start + block]
        w = mult[start:start + block].astype(float)
        m = len(c)
        mu = np.zeros((m, max(2 * half + 2, R + 1)))
        prev = sp.csc_matrix((np.ones(m), (c, np.arange(m))), shape=(n, m))
        cur = (H @ prev).tocsc()
        mu[:, 0] = 1.0
        mu[:, 1] = np.asarray(prev.multiply(cur).sum(axis=0)).ravel()
        for k in range(1, half + 1):
            # invariant: prev = v_{k-1}, cur = v_k
            nxt = 2 * (H @ cur) - prev
            if sp.issparse(nxt) and nxt.nnz > 0.25 * n * m:
                nxt, cur = nxt.toarray(), cur.toarray()
            if sp.issparse(nxt):
                nxt = sp.csc_matrix(nxt)
                vv = np.asarray(cur.multiply(cur).sum(axis=0)).ravel()
                vn = np.asarray(cur.multiply(nxt).sum(axis=0)).ravel()
            else:
                nxt = np.asarray(nxt)
                vv = np.einsum("ij,ij->j", cur, cur)
                vn = np.einsum("ij,ij->j", cur, nxt)
            mu[:, 2 * k] = 2 * vv - mu[:, 0]
            mu[:, 2 * k + 1] = 2 * vn - mu[:, 1]
            prev, cur = cur, nxt
        acc += w @ mu[:, :R + 1]
    return acc / len(cols)


def chebyshev_from_raw(raw: Sequence, bound: float) -> np.ndarray:
    """Chebyshev moments of the rescaled measure from exact raw moments.

    T_k(2x/bound - 1) is expanded in powers of x with rational coefficients,
    so exact (Fraction) raw moments convert without cancellation error.
    """
    a = Fraction(2) / Fraction(bound).limit_denominator(10**12)
    raw = [Fraction(m) for m in raw]
    polys = [[Fraction(1)], [Fraction(-1), a]]
    while len(polys) < len(raw):
        p, q = polys[-1], polys[-2]
        nxt = [Fraction(0)] * (len(p) + 1)
        for j, c in enumerate(p):
            nxt[j] += -2 * c
            nxt[j + 1] += 2 * a * c
        for j, c in enumerate(q):
            nxt[j] -= c
        polys.append(nxt)
    return np.array([float(sum(c * raw[j] for j, c in enumerate(polys[k]))) for k in range(len(raw))])


def jackson_damping(R: int) -> np.ndarray:
    N = R + 1
    k = np.arange(N)
    return ((N - k) * np.cos(np.pi * k / N) + np.sin(np.pi * k / N) / np.tan(np.pi / N)) / N


def _step_coefficients(theta: np.ndarray, R: int) -> np.ndarray:
    # Chebyshev coefficients of 1[t <= cos(theta)] on [-1, 1]
    k = np.arange(1, R + 1)
    c = np.empty(theta.shape + (R + 1,))
    c[..., 0] = (np.pi - theta) / np.pi
    c[..., 1:] = -2.0 / np.pi * np.sin(np.multiply.outer(theta, k)) / k
    return c


def smoothed_cdf(cheb: np.ndarray, bound: float, lam) -> np.ndarray:
    """Jackson-damped estimate of sigma(lam), unclipped; 0 for lam < 0."""
    if bound <= 0:
        raise DegenerateSupport("spectral support bound must be positive")
    R = len(cheb) - 1
    lam = np.asarray(lam, dtype=float)
    # the damped kernel cannot see a jump narrower than its width, so points
    # below the resolution read the value there (right limit at 0)
    t = np.clip(2.0 * np.maximum(lam, resolution(bound, R)) / bound - 1.0, -1.0, 1.0)
    coef = _step_coefficients(np.arccos(t), R)
    vals = coef @ (jackson_damping(R) * np.asarray(cheb, dtype=float))
    return np.where(lam < 0, 0.0, vals)


def cdf_from_moments(cheb: np.ndarray, bound: float, grid) -> np.ndarray:
    """sigma-hat on an increasing grid: damped expansion, clipped to [0, 1], running max."""
    if len(cheb) < 17:
        raise InvalidParameter("need Chebyshev moments up to degree at least 16")
    grid = np.asarray(grid, dtype=float)
    vals = np.clip(smoothed_cdf(cheb, bound, grid), 0.0, 1.0)
    return np.maximum.accumulate(vals)


def resolution(bound: float, R: int) -> float:
    """Smallest cut at which an atom at 0 is captured: three kernel widths from the edge."""
    return bound / 2.0 * (1.0 - math.cos(min(math.pi, 3.0 * math.pi / (R + 1))))


def default_grid(bound: float, points: int = 257) -> np.ndarray:
    lin = np.linspace(0.0, bound, points)
    low = np.geomspace(1e-4, 1.0, 41) if bound > 1 else np.zeros(0)
    return np.unique(np.concatenate([lin, low]))


def hankel_min_eigenvalue(raw: Sequence, bound: float) -> float:
    """Smallest eigenvalue of the Hankel matrix of the moments of Delta/bound."""
    m = [float(Fraction(x) / Fraction(bound).limit_denominator(10**12) ** r) for r, x in enumerate(raw)]
    h = (len(m) - 1) // 2
    H = np.array([[m[a + b] for b in range(h + 1)] for a in range(h + 1)])
    return float(np.linalg.eigvalsh(H).min())


@dataclass
class SpectralSummary:
    i: int
    n_simplices: int
    simplex_density: float
    K: float
    raw_moments: list
    cheb_moments: np.ndarray
    grid: np.ndarray
    cdf_grid: np.ndarray
    sample_size: int
    seed: object
    exact_mode: bool
    hankel_min_eig: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.cheb_moments) - 1

    def cdf(self, lam) -> float:
        return float(np.clip(smoothed_cdf(self.cheb_moments, self.K, lam), 0.0, 1.0))

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "n_simplices": self.n_simplices,
            "simplex_density": self.simplex_density,
            "K": self.K,
            "raw_moments": [str(m) for m in self.raw_moments],
            "raw_moments_float": [float(m) for m in self.raw_moments],
            "cheb_moments": [float(x) for x in self.cheb_moments],
            "grid": [float(x) for x in self.grid],
            "cdf_grid": [float(x) for x in self.cdf_grid],
            "sample_size": self.sample_size,
            "seed": self.seed,
            "exact_mode": self.exact_mode,
            "hankel_min_eig": self.hankel_min_eig,
        }


def spectral_summary(K: SimplicialComplex, i: int, R: int, S: int | None = None, seed=None,
                     bound: float | None = None, grid=None) -> SpectralSummary:
    """Moments and reconstructed distribution function of Delta^i from sampled simplices."""
    n = K.n_simplices(i)
    if n == 0:
        raise EmptyDimension(f"complex has no {i}-simplices")
    if R < 16:
        raise InvalidParameter("moment degree R must be at least 16")
    bound = norm_bound(laplacian(K, i)) if bound is None else float(bound)
    cols = _sample_columns(n, S, seed)
    cheb = chebyshev_moments(K, i, R, bound, S, seed)
    raw = estimate_moments(K, i, min(R, RAW_MOMENT_MAX), S, seed)
    grid = default_grid(bound) if grid is None else np.asarray(grid, dtype=float)
    return SpectralSummary(
        i=i, n_simplices=n, simplex_density=n / K.n_simplices(0), K=bound,
        raw_moments=raw, cheb_moments=cheb, grid=grid,
        cdf_grid=cdf_from_moments(cheb, bound, grid),
        sample_size=len(cols), seed=seed, exact_mode=S is None,
        hankel_min_eig=hankel_min_eigenvalue(raw, bound),
    )


@dataclass
class BettiEstimate:
    i: int
    per_vertex: float
    kernel_fraction: float
    epsilon_star: float
    bound_term: float
    confidence: tuple[float, float]
    simplex_density: float
    resolution: float = 0.0
    gap_detected: bool = False
    summary: SpectralSummary | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "summary"}
        out["confidence"] = {"deviation": self.confidence[0], "failure_probability": self.confidence[1]}
        if self.summary is not None:
            out["summary"] = self.summary.to_json()
        return out


def kernel_estimate(summary: SpectralSummary, lam_cut: float,
                    confidence: tuple[float, float] = (0.0, 0.0)) -> BettiEstimate:
    """Kernel fraction sigma-hat(lam_cut) and the per-vertex Betti number it implies.

    From int_0^K (sigma(l) - sigma(0))/l dl <= log K, the mass of eigenvalues
    in (0, lam_cut] is at most log K / log(1/lam_cut); that bound is reported,
    not subtracted.
    """
    if not 0 < lam_cut < 1:
        raise InvalidCut(f"spectral cut must lie in (0, 1), got {lam_cut}")
    frac = summary.cdf(lam_cut)
    return BettiEstimate(
        i=summary.i,
        per_vertex=summary.simplex_density * frac,
        kernel_fraction=frac,
        epsilon_star=lam_cut,
        bound_term=math.log(summary.K) / math.log(1.0 / lam_cut),
        confidence=confidence,
        simplex_density=summary.simplex_density,
        resolution=resolution(summary.K, summary.degree),
        summary=summary,
    )


def budget(eps: float) -> tuple[int, int]:
    """(R, S) for target accuracy eps.

    S is the Hoeffding count for averages of per-simplex damped CDF values,
    which lie in [0, 1], at deviation eps/2 and failure probability eps with a
    union bound over the two candidate cuts.
    """
    R = min(R_CAP, math.ceil(max(32.0, 8.0 / eps)))
    S = math.ceil(2.0 * math.log(4.0 / eps) / eps**2)
    return R, S


def choose_cut(summary: SpectralSummary, eps: float) -> tuple[float, bool]:
    """1/2 if sigma-hat is flat on [resolution, 1/2], else max(eps^2, resolution) capped at 1/2."""
    res = resolution(summary.K, summary.degree)
    if res < 0.5:
        probe = np.concatenate([[res], summary.grid[(summary.grid > res) & (summary.grid < 0.5)], [0.5]])
        vals = [summary.cdf(x) for x in probe]
        if max(vals) - min(vals) <= eps / 4:
            return 0.5, True
    return min(max(eps**2, res), 0.5), False


def estimate_betti_spectral(K: SimplicialComplex, i: int, eps: float, seed=None, R: int | None = None,
                            S: int | None = None, cut: float | None = None) -> BettiEstimate:
    """Estimate b^i / |K_0| as (kernel fraction of Delta^i) x (|K_i| / |K_0|).

    When the Hoeffding sample count reaches |K_i| every simplex is used once
    instead (exact-moment mode).
    """
    if not 0 < eps < 1:
        raise InvalidParameter("eps must lie in (0, 1)")
    n = K.n_simplices(i)
    if n == 0:
        raise EmptyDimension(f"complex has no {i}-simplices")
    R_default, S_needed = budget(eps)
    R = R_default if R is None else R
    if S is None and S_needed < n:
        S = S_needed
    summary = spectral_summary(K, i, R, S, seed)
    gap = False
    if cut is None:
        cut, gap = choose_cut(summary, eps)
    est = kernel_estimate(summary, cut, (eps / 2, eps))
    est.gap_detected = gap
    return est
