"""Rank-based comparison tests with exact small-sample null distributions.

Exact p-values come from the complete null distribution: every one of
the 2^n sign assignments for the signed-rank test and every one of the
C(n_a + n_b, n_a) group labelings for the U and KS tests is accounted
for (by exact integer counting, not sampling).  Documented exact-size
limits, part of the public contract:

* signed rank: n <= 25 after zero removal
* Mann-Whitney U: n_a * n_b <= 64 and tie-free
* KS: C(n_a + n_b, n_a) <= 20,000

Outside the limits (or under ``mode="approx"``) the tests use the
normal / asymptotic approximations with tie and continuity corrections.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Sequence

from ..errors import DegenerateSampleError, InvalidArgumentError, UnsupportedSizeError
from .special import kolmogorov_sf, normal_cdf
from .types import (
    MODE_APPROX,
    MODE_EXACT,
    EffectSize,
    TestResult,
    average_ranks,
    clean_pair,
    clean_sample,
    tie_correction_sum,
    two_sided_from_tails,
)

WILCOXON_EXACT_MAX_N = 25
MWU_EXACT_MAX_PRODUCT = 64
KS_EXACT_MAX_LABELINGS = 20_000

_DIRECTIONS = ("two-sided", "greater", "less")
_MODES = ("auto", "exact", "approx")


def _check_args(direction: str, mode: str) -> None:
    if direction not in _DIRECTIONS:
        raise InvalidArgumentError(f"unknown direction {direction!r}")
    if mode not in _MODES:
        raise InvalidArgumentError(f"unknown mode {mode!r}")


def _signed_rank_counts(doubled_ranks: Sequence[int]) -> list[int]:
    """Number of sign assignments reaching each doubled positive-rank sum."""
    total = sum(doubled_ranks)
    ways = [0] * (total + 1)
    ways[0] = 1
    upper = 0
    for r in doubled_ranks:
        upper += r
        for s in range(upper, r - 1, -1):
            ways[s] += ways[s - r]
    return ways


def wilcoxon_signed_rank(
    a: Sequence[float],
    b: Sequence[float],
    direction: str = "two-sided",
    mode: str = "auto",
) -> TestResult:
    """Wilcoxon signed-rank test for paired samples.

    The statistic is W+, the rank sum of positive differences a - b.
    Zero differences are dropped (classical convention, noted in the
    warnings); tied absolute differences receive midranks.
    """
    _check_args(direction, mode)
    xa, xb = clean_pair(a, b)
    diffs = [x - y for x, y in zip(xa, xb)]
    warnings: list[str] = []
    nonzero = [d for d in diffs if d != 0.0]
    dropped = len(diffs) - len(nonzero)
    if not nonzero:
        raise DegenerateSampleError("all paired differences are zero")
    if dropped:
        warnings.append(f"dropped {dropped} zero difference(s)")
    n = len(nonzero)

    abs_diffs = [abs(d) for d in nonzero]
    ranks, tie_sizes = average_ranks(abs_diffs)
    has_ties = any(t > 1 for t in tie_sizes)
    if has_ties:
        warnings.append("tied absolute differences; midranks used")
    w_plus = math.fsum(r for r, d in zip(ranks, nonzero) if d > 0.0)

    use_exact = mode == "exact" or (mode == "auto" and n <= WILCOXON_EXACT_MAX_N)
    if mode == "exact" and n > WILCOXON_EXACT_MAX_N:
        raise UnsupportedSizeError(
            f"exact signed-rank p is limited to n <= {WILCOXON_EXACT_MAX_N}, got {n}"
        )

    if use_exact:
        doubled = [round(2.0 * r) for r in ranks]
        ways = _signed_rank_counts(doubled)
        w2 = round(2.0 * w_plus)
        denom = 1 << n
        count_le = sum(ways[: w2 + 1])
        count_ge = sum(ways[w2:])
        p_less = count_le / denom
        p_greater = count_ge / denom
        mode_used = MODE_EXACT
    else:
        mean_w = n * (n + 1) / 4.0
        var_w = n * (n + 1) * (2 * n + 1) / 24.0 - tie_correction_sum(tie_sizes) / 48.0
        if var_w <= 0.0:
            raise DegenerateSampleError("signed-rank variance is zero under ties")
        sd = math.sqrt(var_w)
        # Continuity correction of 1/2 toward the mean for each tail.
        p_greater = 1.0 - normal_cdf((w_plus - mean_w - 0.5) / sd)
        p_less = normal_cdf((w_plus - mean_w + 0.5) / sd)
        mode_used = MODE_APPROX
        if n < 10:
            warnings.append("normal approximation with n < 10")

    if direction == "greater":
        p = p_greater
    elif direction == "less":
        p = p_less
    else:
        p = two_sided_from_tails(p_less, p_greater)
    return TestResult(
        method="wilcoxon-signed-rank",
        statistic=w_plus,
        p_value=p,
        n=(n,),
        mode=mode_used,
        warnings=warnings,
    )


def matched_rank_biserial(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    """Matched-pairs rank-biserial correlation: (W+ - W-) / (n(n+1)/2)."""
    xa, xb = clean_pair(a, b)
    nonzero = [x - y for x, y in zip(xa, xb) if x != y]
    if not nonzero:
        raise DegenerateSampleError("all paired differences are zero")
    ranks, _ = average_ranks([abs(d) for d in nonzero])
    w_plus = math.fsum(r for r, d in zip(ranks, nonzero) if d > 0.0)
    n = len(nonzero)
    total = n * (n + 1) / 2.0
    value = (2.0 * w_plus - total) / total
    return EffectSize(kind="rank-biserial", value=max(-1.0, min(1.0, value)))


def _mwu_counts(n1: int, n2: int) -> list[int]:
    """Distribution of U over all C(n1+n2, n1) labelings (no ties).

    ``counts[u]`` is the number of labelings with exactly u of the
    n1*n2 cross pairs won by the first group.  Built by the classic
    recurrence f(n1, n2, u) = f(n1-1, n2, u-n2) + f(n1, n2-1, u).
    """
    # table[i][j] = list of counts over u for i items in group 1, j in group 2
    prev_row = [[1] for _ in range(n2 + 1)]  # i = 0
    for i in range(1, n1 + 1):
        row = [[1]]  # j = 0: only u = 0
        for j in range(1, n2 + 1):
            size = i * j + 1
            counts = [0] * size
            left = prev_row[j]  # f(i-1, j, u - j)
            down = row[j - 1]  # f(i, j-1, u)
            for u in range(size):
                c = 0
                if u - j >= 0 and u - j < len(left):
                    c += left[u - j]
                if u < len(down):
                    c += down[u]
                counts[u] = c
            row.append(counts)
        prev_row = row
    return prev_row[n2]


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    direction: str = "two-sided",
    mode: str = "auto",
) -> tuple[TestResult, EffectSize]:
    """Mann-Whitney U test; also returns the rank-biserial effect size.

    The statistic is U for the first sample (number of cross pairs the
    first sample wins, halves for ties).  Exact mode enumerates the
    labeling distribution and refuses tied data (falls back to the
    approximation with a warning).
    """
    _check_args(direction, mode)
    xa = clean_sample(a, "a")
    xb = clean_sample(b, "b")
    n1, n2 = len(xa), len(xb)
    pooled = xa + xb
    ranks, tie_sizes = average_ranks(pooled)
    has_ties = any(t > 1 for t in tie_sizes)
    r1 = math.fsum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    warnings: list[str] = []

    effect = EffectSize(
        kind="rank-biserial",
        value=max(-1.0, min(1.0, 2.0 * u1 / (n1 * n2) - 1.0)),
    )

    want_exact = mode == "exact" or (mode == "auto" and n1 * n2 <= MWU_EXACT_MAX_PRODUCT)
    if mode == "exact" and n1 * n2 > MWU_EXACT_MAX_PRODUCT:
        raise UnsupportedSizeError(
            f"exact U p is limited to n_a*n_b <= {MWU_EXACT_MAX_PRODUCT}, got {n1 * n2}"
        )
    if want_exact and has_ties:
        warnings.append("ties present; exact U distribution unavailable, using approximation")
        want_exact = False

    if want_exact:
        counts = _mwu_counts(n1, n2)
        total = math.comb(n1 + n2, n1)
        u_int = round(u1)
        p_less = sum(counts[: u_int + 1]) / total
        p_greater = sum(counts[u_int:]) / total
        mode_used = MODE_EXACT
    else:
        if has_ties and "midranks" not in " ".join(warnings):
            warnings.append("ties present; midranks with tie-corrected variance")
        mean_u = n1 * n2 / 2.0
        n = n1 + n2
        tie_term = tie_correction_sum(tie_sizes) / (n * (n - 1)) if n > 1 else 0.0
        var_u = n1 * n2 / 12.0 * ((n + 1) - tie_term)
        if var_u <= 0.0:
            raise DegenerateSampleError("U variance is zero (all pooled values tied)")
        sd = math.sqrt(var_u)
        p_greater = 1.0 - normal_cdf((u1 - mean_u - 0.5) / sd)
        p_less = normal_cdf((u1 - mean_u + 0.5) / sd)
        mode_used = MODE_APPROX

    if direction == "greater":
        p = p_greater
    elif direction == "less":
        p = p_less
    else:
        p = two_sided_from_tails(p_less, p_greater)
    result = TestResult(
        method="mann-whitney-u",
        statistic=u1,
        p_value=p,
        n=(n1, n2),
        mode=mode_used,
        warnings=warnings,
    )
    return result, effect


def _ks_statistic_numerator(sorted_a: list[float], sorted_b: list[float]) -> int:
    """max over pooled values of |i*n2 - j*n1| with i,j = counts <= value.

    Integer arithmetic: the KS statistic is this numerator divided by
    n1*n2, computed exactly.
    """
    n1, n2 = len(sorted_a), len(sorted_b)
    i = j = 0
    best = 0
    while i < n1 or j < n2:
        if j >= n2 or (i < n1 and sorted_a[i] <= sorted_b[j]):
            v = sorted_a[i]
        else:
            v = sorted_b[j]
        while i < n1 and sorted_a[i] == v:
            i += 1
        while j < n2 and sorted_b[j] == v:
            j += 1
        best = max(best, abs(i * n2 - j * n1))
    return best


def ks_two_sample(
    a: Sequence[float], b: Sequence[float], mode: str = "auto"
) -> TestResult:
    """Two-sample Kolmogorov-Smirnov test (two-sided).

    D is the exact sup-distance between the empirical CDFs.  Exact p
    enumerates all labelings of the pooled multiset; the asymptotic p
    uses the Kolmogorov survival function at sqrt(n1*n2/(n1+n2)) * D.
    """
    if mode not in _MODES:
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    xa = sorted(clean_sample(a, "a"))
    xb = sorted(clean_sample(b, "b"))
    n1, n2 = len(xa), len(xb)
    d_num = _ks_statistic_numerator(xa, xb)
    d = d_num / (n1 * n2)
    warnings: list[str] = []

    labelings = math.comb(n1 + n2, n1)
    want_exact = mode == "exact" or (mode == "auto" and labelings <= KS_EXACT_MAX_LABELINGS)
    if mode == "exact" and labelings > KS_EXACT_MAX_LABELINGS:
        raise UnsupportedSizeError(
            f"exact KS p is limited to C(n_a+n_b, n_a) <= {KS_EXACT_MAX_LABELINGS},"
            f" got {labelings}"
        )

    if want_exact:
        pooled = sorted(xa + xb)
        n = n1 + n2
        count_ge = 0
        for positions in combinations(range(n), n1):
            in_a = [False] * n
            for p in positions:
                in_a[p] = True
            i = j = 0
            best = 0
            k = 0
            while k < n:
                v = pooled[k]
                while k < n and pooled[k] == v:
                    if in_a[k]:
                        i += 1
                    else:
                        j += 1
                    k += 1
                diff = abs(i * n2 - j * n1)
                if diff > best:
                    best = diff
            if best >= d_num:
                count_ge += 1
        p = count_ge / labelings
        mode_used = MODE_EXACT
    else:
        en = n1 * n2 / (n1 + n2)
        p = kolmogorov_sf(math.sqrt(en) * d)
        mode_used = MODE_APPROX
        if min(n1, n2) < 10:
            warnings.append("asymptotic KS p with a small sample")

    return TestResult(
        method="ks-two-sample",
        statistic=d,
        p_value=p,
        n=(n1, n2),
        mode=mode_used,
        warnings=warnings,
    )
