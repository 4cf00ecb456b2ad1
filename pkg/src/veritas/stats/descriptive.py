"""Descriptive statistics, confidence intervals and effect sizes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import DegenerateSampleError, InvalidArgumentError, UndefinedStatisticError
from .special import t_quantile
from .types import ConfidenceInterval, EffectSize, clean_pair, clean_sample


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    variance: float  # unbiased (n-1 denominator)
    sd: float


def mean(values: Sequence[float]) -> float:
    xs = clean_sample(values)
    return math.fsum(xs) / len(xs)


def describe(values: Sequence[float]) -> SampleStats:
    """Mean, unbiased variance and standard deviation, two-pass.

    The mean is computed first and the variance from exactly summed
    centered squares, which keeps sane digits even for narrow data on a
    huge offset.
    """
    xs = clean_sample(values)
    n = len(xs)
    if n < 2:
        raise UndefinedStatisticError("variance requires at least 2 observations")
    m = math.fsum(xs) / n
    ss = math.fsum((x - m) ** 2 for x in xs)
    var = ss / (n - 1)
    return SampleStats(n=n, mean=m, variance=var, sd=math.sqrt(var))


def confidence_interval(values: Sequence[float], level: float = 0.95) -> ConfidenceInterval:
    """t-based interval for the mean: mean +/- t_{(1+level)/2, n-1} * sd/sqrt(n)."""
    if not (0.0 < level < 1.0):
        raise InvalidArgumentError(f"confidence level must lie in (0,1), got {level}")
    stats = describe(values)
    q = t_quantile((1.0 + level) / 2.0, stats.n - 1)
    half = q * stats.sd / math.sqrt(stats.n)
    return ConfidenceInterval(
        level=level, lower=stats.mean - half, upper=stats.mean + half, center=stats.mean
    )


def cohens_d(a: Sequence[float], b: Sequence[float], paired: bool = False) -> EffectSize:
    """Standardized mean difference.

    Paired form: mean(d) / sd(d) over the element-wise differences.
    Unpaired form: (mean_a - mean_b) / pooled sd.
    """
    if paired:
        xa, xb = clean_pair(a, b)
        diffs = [x - y for x, y in zip(xa, xb)]
        stats = describe(diffs)
        if stats.sd == 0.0:
            raise DegenerateSampleError("differences have zero standard deviation")
        return EffectSize(kind="cohens-d", value=stats.mean / stats.sd)
    sa = describe(a)
    sb = describe(b)
    pooled_var = ((sa.n - 1) * sa.variance + (sb.n - 1) * sb.variance) / (sa.n + sb.n - 2)
    if pooled_var == 0.0:
        raise DegenerateSampleError("both groups have zero variance")
    return EffectSize(kind="cohens-d", value=(sa.mean - sb.mean) / math.sqrt(pooled_var))
