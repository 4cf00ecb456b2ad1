"""t-family comparison tests."""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import DegenerateSampleError, InvalidArgumentError, UndefinedStatisticError
from .descriptive import describe
from .special import t_cdf
from .types import MODE_EXACT, TestResult, clean_pair, two_sided_from_tails

_DIRECTIONS = ("two-sided", "greater", "less")


def _check_direction(direction: str) -> None:
    if direction not in _DIRECTIONS:
        raise InvalidArgumentError(f"unknown direction {direction!r}")


def _t_pvalue(t: float, df: float, direction: str) -> float:
    if direction == "greater":
        return 1.0 - t_cdf(t, df)
    if direction == "less":
        return t_cdf(t, df)
    return two_sided_from_tails(t_cdf(t, df), 1.0 - t_cdf(t, df))


def paired_t(a: Sequence[float], b: Sequence[float], direction: str = "two-sided") -> TestResult:
    """Paired t-test on the element-wise differences a - b."""
    _check_direction(direction)
    xa, xb = clean_pair(a, b)
    if len(xa) < 2:
        raise UndefinedStatisticError("paired t-test requires at least 2 pairs")
    diffs = [x - y for x, y in zip(xa, xb)]
    stats = describe(diffs)
    if stats.sd == 0.0:
        raise DegenerateSampleError(
            "all differences are identical; the paired t statistic is undefined"
        )
    t = stats.mean / (stats.sd / math.sqrt(stats.n))
    df = stats.n - 1
    return TestResult(
        method="paired-t",
        statistic=t,
        p_value=_t_pvalue(t, df, direction),
        n=(stats.n,),
        mode=MODE_EXACT,
    )


def welch_t(a: Sequence[float], b: Sequence[float], direction: str = "two-sided") -> TestResult:
    """Welch's two-sample t-test with Welch-Satterthwaite degrees of freedom."""
    _check_direction(direction)
    sa = describe(a)
    sb = describe(b)
    se2_a = sa.variance / sa.n
    se2_b = sb.variance / sb.n
    se2 = se2_a + se2_b
    if se2 == 0.0:
        if sa.mean == sb.mean:
            raise DegenerateSampleError("both samples are constant and equal")
        # Constant but different samples: the difference is certain.
        t = math.inf if sa.mean > sb.mean else -math.inf
        df = float(sa.n + sb.n - 2)
    else:
        t = (sa.mean - sb.mean) / math.sqrt(se2)
        df = se2 * se2 / (
            se2_a * se2_a / (sa.n - 1) + se2_b * se2_b / (sb.n - 1)
        )
    return TestResult(
        method="welch-t",
        statistic=t,
        p_value=_t_pvalue(t, df, direction),
        n=(sa.n, sb.n),
        mode=MODE_EXACT,
    )
