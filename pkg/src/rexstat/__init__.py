"""Rank-extreme association for low-rank Gaussian vectors.

The sup-norm of a p-variate standard Gaussian vector whose correlation
matrix has rank d obeys the universal asymptotic bound
sqrt(d (1 - p^(-2/(d-1)))), sharp when the correlations come from i.i.d.
uniform unit vectors. This package computes the bound and everything it
buys when inverted: rank estimates, confidence intervals and tests that
remain valid with n < d, regime classification in d / log p, a regression
overall-significance threshold, simultaneous-inference bound rates, and a
seeded Monte Carlo harness reproducing the empirical studies.
"""

__version__ = "0.1.0"

from .bounds import (
    RankEstimate,
    Regime,
    TrichotomyRegime,
    bonferroni_max_corr_tail,
    classify_regime,
    coord_tail,
    estimate_rank,
    iid_max_corr_cdf,
    max_corr_bound,
    rex_bound,
    rex_bound_sq,
    separation_constant,
    trichotomy_limit,
)
from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    DimensionMismatchError,
    DomainError,
    EmptyInputError,
    ParseError,
    RexError,
    ZeroNormColumnError,
)
from .inference import (
    CountMode,
    NoiseAdmissibility,
    PosiBound,
    RankClassification,
    RankInterval,
    RankTest,
    SignificanceResult,
    classify_from_extremes,
    make_report,
    noise_admissibility,
    overall_significance_test,
    posi_bound,
    rank_test,
    rex_confidence_interval,
    universal_threshold_limit,
)
from .sampling import (
    LowRankModel,
    NoiseSpec,
    RngStream,
    SampleMatrix,
    add_noise,
    build_uniform_model,
    sample_iid_extremes,
    sample_observations,
    sample_sphere,
)
from .simulation import (
    CoverageConfig,
    CoverageTable,
    DensityEstimate,
    MeanSeparationResult,
    TrichotomyConfig,
    TrichotomyResult,
    kde,
    run_coverage,
    run_mean_separation,
    run_trichotomy,
)

__all__ = [
    "__version__",
    # bounds
    "max_corr_bound",
    "rex_bound",
    "rex_bound_sq",
    "trichotomy_limit",
    "separation_constant",
    "estimate_rank",
    "classify_regime",
    "coord_tail",
    "bonferroni_max_corr_tail",
    "iid_max_corr_cdf",
    "Regime",
    "TrichotomyRegime",
    "RankEstimate",
    # sampling
    "RngStream",
    "LowRankModel",
    "SampleMatrix",
    "NoiseSpec",
    "sample_sphere",
    "build_uniform_model",
    "sample_observations",
    "add_noise",
    "sample_iid_extremes",
    # inference
    "rex_confidence_interval",
    "rank_test",
    "classify_from_extremes",
    "overall_significance_test",
    "universal_threshold_limit",
    "posi_bound",
    "noise_admissibility",
    "make_report",
    "RankInterval",
    "RankTest",
    "RankClassification",
    "SignificanceResult",
    "PosiBound",
    "NoiseAdmissibility",
    "CountMode",
    # simulation
    "kde",
    "run_trichotomy",
    "run_mean_separation",
    "run_coverage",
    "TrichotomyConfig",
    "TrichotomyResult",
    "MeanSeparationResult",
    "CoverageConfig",
    "CoverageTable",
    "DensityEstimate",
    # errors
    "RexError",
    "DomainError",
    "ConvergenceError",
    "EmptyInputError",
    "DimensionMismatchError",
    "ZeroNormColumnError",
    "ParseError",
    "DegenerateSampleError",
]
