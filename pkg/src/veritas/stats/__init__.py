"""Statistical engine: descriptives, special functions, comparison tests."""

from .descriptive import SampleStats, cohens_d, confidence_interval, describe, mean
from .nonparametric import (
    KS_EXACT_MAX_LABELINGS,
    MWU_EXACT_MAX_PRODUCT,
    WILCOXON_EXACT_MAX_N,
    ks_two_sample,
    mann_whitney_u,
    matched_rank_biserial,
    wilcoxon_signed_rank,
)
from .parametric import paired_t, welch_t
from .pretests import levene, shapiro_wilk
from .special import (
    f_cdf,
    kolmogorov_sf,
    normal_cdf,
    normal_quantile,
    normal_sf,
    regularized_incomplete_beta,
    t_cdf,
    t_quantile,
    t_sf,
)
from .types import (
    MODE_APPROX,
    MODE_EXACT,
    ConfidenceInterval,
    EffectSize,
    TestResult,
    average_ranks,
)

__all__ = [
    "SampleStats",
    "ConfidenceInterval",
    "EffectSize",
    "TestResult",
    "MODE_EXACT",
    "MODE_APPROX",
    "WILCOXON_EXACT_MAX_N",
    "MWU_EXACT_MAX_PRODUCT",
    "KS_EXACT_MAX_LABELINGS",
    "mean",
    "describe",
    "confidence_interval",
    "cohens_d",
    "paired_t",
    "welch_t",
    "wilcoxon_signed_rank",
    "mann_whitney_u",
    "matched_rank_biserial",
    "ks_two_sample",
    "shapiro_wilk",
    "levene",
    "normal_cdf",
    "normal_sf",
    "normal_quantile",
    "t_cdf",
    "t_sf",
    "t_quantile",
    "f_cdf",
    "kolmogorov_sf",
    "regularized_incomplete_beta",
    "average_ranks",
]
