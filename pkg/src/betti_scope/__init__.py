"""Exact and sampled real Betti numbers of bounded-degree simplicial complexes."""

__version__ = "0.1.0"

from .canonical import CanonicalCode, canonical_code
from .complex import (
    RootedBall,
    SimplicialComplex,
    build_complex,
    extract_simplex_ball,
    extract_vertex_ball,
    orient_random,
)
from .estimator import (
    BettiEstimate,
    SpectralSummary,
    cdf_from_moments,
    estimate_betti_spectral,
    estimate_moments,
    kernel_estimate,
    local_diagonal_power,
)
from .generators import FamilySpec, convergent_sequence, generate
from .laplacian import (
    SparseOperator,
    SpectralMeasure,
    betti_exact,
    coboundary,
    exact_spectrum,
    laplacian,
    log_determinant_c,
    norm_bound,
    pseudo_determinant,
    stieltjes_check,
)
from .sampling import (
    LocalProfile,
    ReferenceCorpus,
    empirical_profile,
    exact_profile,
    sample_size_for,
    sampling_distance,
    test_betti,
)
