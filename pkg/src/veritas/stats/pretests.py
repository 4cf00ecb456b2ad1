"""Distribution pre-tests: Shapiro-Wilk normality, Brown-Forsythe variance.

The Shapiro-Wilk implementation follows the standard Royston
approximation for 3 <= n <= 5000.  All polynomial constants are the
published ones and appear verbatim below so the computation can be
replicated bit-for-bit:

* order-statistic scores  m_i = Phi^-1((i - 0.375) / (n + 0.25))
* coefficient corrections c1, c2 (polynomials in 1/sqrt(n))
* small-sample p transform: n = 3 exact arcsine form; 4 <= n <= 11
  gamma-shifted lognormal with g, c3, c4; n >= 12 lognormal with c5, c6
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import DegenerateSampleError, UndefinedStatisticError, UnsupportedSizeError
from .descriptive import describe
from .special import f_cdf, normal_quantile, normal_sf
from .types import MODE_APPROX, TestResult, clean_sample

SHAPIRO_MIN_N = 3
SHAPIRO_MAX_N = 5000

_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


def _poly(coeffs: Sequence[float], x: float) -> float:
    """Evaluate sum coeffs[i] * x^i (ascending powers)."""
    total = 0.0
    power = 1.0
    for c in coeffs:
        total += c * power
        power *= x
    return total


def shapiro_wilk(values: Sequence[float]) -> TestResult:
    """Shapiro-Wilk W test of normality (Royston approximation)."""
    xs = sorted(clean_sample(values))
    n = len(xs)
    if n < SHAPIRO_MIN_N or n > SHAPIRO_MAX_N:
        raise UnsupportedSizeError(
            f"shapiro-wilk supports {SHAPIRO_MIN_N} <= n <= {SHAPIRO_MAX_N}, got {n}"
        )
    if xs[-1] - xs[0] == 0.0:
        raise DegenerateSampleError("sample has zero range")

    n2 = n // 2
    an = float(n)

    # Expected normal order statistics (Blom scores) for the upper half
    # (positions n-n2+1 .. n; for odd n the median position is skipped).
    m = [normal_quantile((i - 0.375) / (an + 0.25)) for i in range(n - n2 + 1, n + 1)]
    ssq_m = 2.0 * math.fsum(v * v for v in m)

    rsn = 1.0 / math.sqrt(an)
    a = [0.0] * n2  # weights for the upper half, descending order statistic last
    if n == 3:
        a[0] = math.sqrt(0.5)
    else:
        # m in ascending order of the upper half; last entry is the largest.
        a_raw = [v / math.sqrt(ssq_m) for v in m]
        a_n = _poly(_C1, rsn) + a_raw[-1]
        if n > 5:
            a_n1 = _poly(_C2, rsn) + a_raw[-2]
            phi = (ssq_m - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
            )
            tail = 2
        else:
            a_n1 = None
            phi = (ssq_m - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
            tail = 1
        sqrt_phi = math.sqrt(phi)
        for i in range(n2 - tail):
            a[i] = m[i] / sqrt_phi
        a[n2 - 1] = a_n
        if a_n1 is not None:
            a[n2 - 2] = a_n1

    sample_mean = math.fsum(xs) / n
    ssd = math.fsum((x - sample_mean) ** 2 for x in xs)
    # W = (sum of antisymmetric weights times ordered sample)^2 / SS
    num = math.fsum(a[n2 - 1 - i] * (xs[n - 1 - i] - xs[i]) for i in range(n2))
    w = num * num / ssd
    w = min(w, 1.0)

    if n == 3:
        pw = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        pw = min(1.0, max(0.0, pw))
        return TestResult(
            method="shapiro-wilk", statistic=w, p_value=pw, n=(n,), mode=MODE_APPROX
        )

    w1 = 1.0 - w
    if n <= 11:
        gamma = _poly(_G, an)
        if math.log(w1) >= gamma:  # y would hit the gamma singularity
            return TestResult(
                method="shapiro-wilk",
                statistic=w,
                p_value=0.0,
                n=(n,),
                mode=MODE_APPROX,
                warnings=["W in the extreme tail of the null distribution"],
            )
        y = -math.log(gamma - math.log(w1))
        mu = _poly(_C3, an)
        sigma = math.exp(_poly(_C4, an))
    else:
        y = math.log(w1)
        ln_n = math.log(an)
        mu = _poly(_C5, ln_n)
        sigma = math.exp(_poly(_C6, ln_n))
    pw = normal_sf((y - mu) / sigma)
    return TestResult(
        method="shapiro-wilk", statistic=w, p_value=pw, n=(n,), mode=MODE_APPROX
    )


def levene(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Brown-Forsythe test for equal variances (median-centered Levene)."""
    xa = clean_sample(a, "a")
    xb = clean_sample(b, "b")
    if len(xa) < 2 or len(xb) < 2:
        raise UndefinedStatisticError("levene requires at least 2 observations per group")

    def _median(xs: list[float]) -> float:
        s = sorted(xs)
        m = len(s)
        return s[m // 2] if m % 2 else 0.5 * (s[m // 2 - 1] + s[m // 2])

    za = [abs(x - _median(xa)) for x in xa]
    zb = [abs(x - _median(xb)) for x in xb]
    n1, n2 = len(za), len(zb)
    n = n1 + n2
    mean_a = math.fsum(za) / n1
    mean_b = math.fsum(zb) / n2
    grand = (math.fsum(za) + math.fsum(zb)) / n
    between = n1 * (mean_a - grand) ** 2 + n2 * (mean_b - grand) ** 2
    within = math.fsum((z - mean_a) ** 2 for z in za) + math.fsum(
        (z - mean_b) ** 2 for z in zb
    )
    if between == 0.0 and within == 0.0:
        raise DegenerateSampleError("all absolute deviations are zero in both groups")
    if within == 0.0:
        # Deviations constant within groups but different between them.
        return TestResult(
            method="levene",
            statistic=math.inf,
            p_value=0.0,
            n=(n1, n2),
            mode=MODE_APPROX,
            warnings=["zero within-group deviation variance"],
        )
    stat = (n - 2) * between / within
    p = 1.0 - f_cdf(stat, 1.0, float(n - 2))
    return TestResult(
        method="levene", statistic=stat, p_value=p, n=(n1, n2), mode=MODE_APPROX
    )
