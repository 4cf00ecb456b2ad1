"""Shared result types and sample utilities for the stats engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import InvalidArgumentError

METHODS = (
    "paired-t",
    "welch-t",
    "wilcoxon-signed-rank",
    "mann-whitney-u",
    "ks-two-sample",
    "shapiro-wilk",
    "levene",
)

MODE_EXACT = "exact"
MODE_APPROX = "normal-approximation"


@dataclass
class TestResult:
    method: str
    statistic: float
    p_value: float
    n: tuple[int, ...]
    mode: str
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ConfidenceInterval:
    level: float
    lower: float
    upper: float
    center: float


@dataclass(frozen=True)
class EffectSize:
    kind: str  # "cohens-d" | "rank-biserial"
    value: float


def clean_sample(values: Sequence[float], name: str = "sample") -> list[float]:
    """Validate a sample: non-empty, all entries finite real numbers."""
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidArgumentError(f"{name}[{i}] is not a number: {v!r}")
        if not math.isfinite(v):
            raise InvalidArgumentError(f"{name}[{i}] is not finite: {v!r}")
        out.append(float(v))
    if not out:
        raise InvalidArgumentError(f"{name} is empty")
    return out


def clean_pair(
    a: Sequence[float], b: Sequence[float]
) -> tuple[list[float], list[float]]:
    xa = clean_sample(a, "a")
    xb = clean_sample(b, "b")
    if len(xa) != len(xb):
        raise InvalidArgumentError(
            f"paired samples must have equal length, got {len(xa)} and {len(xb)}"
        )
    return xa, xb


def average_ranks(values: Sequence[float]) -> tuple[list[float], list[int]]:
    """Midranks (1-based) with ties averaged; also returns tie-group sizes."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    tie_sizes: list[int] = []
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, tie_sizes


def tie_correction_sum(tie_sizes: Sequence[int]) -> float:
    """Sum of t^3 - t over tie groups (zero when all values distinct)."""
    return float(sum(t * t * t - t for t in tie_sizes if t > 1))


def two_sided_from_tails(p_less: float, p_greater: float) -> float:
    return min(1.0, 2.0 * min(p_less, p_greater))
