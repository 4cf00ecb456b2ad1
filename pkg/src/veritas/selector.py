"""Test selection and hypothesis verdicts.

Given two group samples the selector classifies them by distribution
(both normal / both not / mixed, via Shapiro-Wilk at ``alpha_pre``) and
by variance equality (Brown-Forsythe Levene, consulted only on the
normal branch), then maps the classification to the comparison tests:

    normal, equal      -> paired t-test
    normal, unequal    -> Welch's t-test
    not normal, any    -> Wilcoxon signed-rank test
    mixed, any         -> Mann-Whitney U (decision) + KS (advisory)

The full path taken -- pre-test p-values, classification, chosen tests
and any substitutions -- is recorded in a ``SelectionTrace`` so a
reader can re-derive every verdict.

Conventions baked in here (also surfaced in each trace):

* The normal/unequal row applies an unpaired Welch test even to paired
  hypotheses; variance-equality is ill-defined for paired data and the
  convention is recorded in the trace whenever that row fires.
* Paired-only tests degrade to their unpaired analogues (Welch, U) for
  unpaired hypotheses, with a trace note.
* Group samples are aggregated before testing: records sharing a pair
  key (all independent bindings except the hypothesis factors, plus
  the seed index) are averaged over folds and replications, so
  repeated measurements never inflate the sample size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    AlignmentError,
    DegenerateSampleError,
    InsufficientDataError,
    UnsupportedSizeError,
)
from .model import ExperimentDesign, Hypothesis, Value
from .records import RunRecord
from .stats import (
    MODE_EXACT,
    ConfidenceInterval,
    EffectSize,
    TestResult,
    cohens_d,
    confidence_interval,
    ks_two_sample,
    mann_whitney_u,
    matched_rank_biserial,
    paired_t,
    shapiro_wilk,
    welch_t,
    wilcoxon_signed_rank,
)
from .stats.pretests import levene

DEFAULT_ALPHA_PRE = 0.05

DIST_NORMAL = "normal"
DIST_NOT_NORMAL = "not-normal"
DIST_MIXED = "mixed"
VAR_EQUAL = "equal"
VAR_UNEQUAL = "unequal"
VAR_ANY = "any"

MIN_GROUP_N = 3  # Shapiro-Wilk floor; below this no classification is possible

_TEST_TABLE = {
    (DIST_NORMAL, VAR_EQUAL): ["paired-t"],
    (DIST_NORMAL, VAR_UNEQUAL): ["welch-t"],
    (DIST_NOT_NORMAL, VAR_ANY): ["wilcoxon-signed-rank"],
    (DIST_MIXED, VAR_ANY): ["mann-whitney-u", "ks-two-sample"],
}


@dataclass
class Classification:
    distribution: str
    variances: str
    sw_p_a: float | None
    sw_p_b: float | None
    levene_p: float | None
    notes: list[str] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, str]:
        return (self.distribution, self.variances)


@dataclass
class SelectionTrace:
    alpha_pre: float
    sw_p_a: float | None
    sw_p_b: float | None
    levene_p: float | None
    classification: tuple[str, str]
    chosen_tests: list[str]
    rationale: list[str] = field(default_factory=list)


@dataclass
class GroupSummary:
    label: str
    selector: dict[str, Value]
    n: int
    mean: float
    sd: float
    ci: ConfidenceInterval


@dataclass
class Verdict:
    hypothesis_id: str
    decision: str  # "reject-H0" | "fail-to-reject-H0"
    alpha: float
    primary: TestResult
    secondary: TestResult | None
    effect_size: EffectSize | None
    group_a: GroupSummary
    group_b: GroupSummary
    trace: SelectionTrace
    warnings: list[str] = field(default_factory=list)


def classify(
    a: Sequence[float], b: Sequence[float], alpha_pre: float = DEFAULT_ALPHA_PRE
) -> Classification:
    """Classify two samples by distribution and variance equality."""
    if len(a) < MIN_GROUP_N or len(b) < MIN_GROUP_N:
        raise InsufficientDataError(
            f"classification requires n >= {MIN_GROUP_N} per group,"
            f" got {len(a)} and {len(b)}"
        )
    notes: list[str] = []

    def _sw(sample: Sequence[float], label: str) -> float | None:
        try:
            return shapiro_wilk(sample).p_value
        except DegenerateSampleError:
            notes.append(f"group {label} is constant; treated as not normal")
            return None

    sw_a = _sw(a, "A")
    sw_b = _sw(b, "B")
    normal_a = sw_a is not None and sw_a > alpha_pre
    normal_b = sw_b is not None and sw_b > alpha_pre

    try:
        levene_p = levene(a, b).p_value
    except DegenerateSampleError:
        levene_p = None
        notes.append("variance pre-test degenerate (no spread in either group)")

    if normal_a and normal_b:
        distribution = DIST_NORMAL
        if levene_p is None:
            variances = VAR_EQUAL
            notes.append("variance label defaulted to equal (degenerate pre-test)")
        else:
            variances = VAR_EQUAL if levene_p > alpha_pre else VAR_UNEQUAL
    elif not normal_a and not normal_b:
        distribution = DIST_NOT_NORMAL
        variances = VAR_ANY
    else:
        distribution = DIST_MIXED
        variances = VAR_ANY
    return Classification(
        distribution=distribution,
        variances=variances,
        sw_p_a=sw_a,
        sw_p_b=sw_b,
        levene_p=levene_p,
        notes=notes,
    )


def select_test(classification: Classification | tuple[str, str]) -> list[str]:
    """Map a classification to the ordered list of tests to run."""
    key = (
        classification.key
        if isinstance(classification, Classification)
        else tuple(classification)
    )
    if key not in _TEST_TABLE:
        raise InsufficientDataError(f"no test mapping for classification {key!r}")
    return list(_TEST_TABLE[key])


def _matches(record: RunRecord, selector: dict[str, Value]) -> bool:
    bindings = record.trial.bindings()
    return all(bindings.get(k) == v for k, v in selector.items())


def _pair_key(record: RunRecord, excluded: tuple[str, ...]) -> tuple:
    items = tuple(
        (k, v) for k, v in sorted(record.trial.bindings_x.items()) if k not in excluded
    )
    return items + (("seed_index", record.trial.seed_index),)


def _aggregate_group(
    records: Iterable[RunRecord], metric: str, excluded: tuple[str, ...]
) -> dict[tuple, float]:
    sums: dict[tuple, list[float]] = {}
    for rec in records:
        key = _pair_key(rec, excluded)
        sums.setdefault(key, []).append(float(rec.outcomes[metric]))
    return {k: math.fsum(v) / len(v) for k, v in sums.items()}


def extract_group_samples(
    hypothesis: Hypothesis, records: Sequence[RunRecord]
) -> tuple[list[float], list[float], list[tuple]]:
    """Aggregated, key-aligned group samples for a hypothesis.

    Returns (sample_a, sample_b, keys).  For paired hypotheses the two
    samples are index-aligned on the shared pair keys and incomplete
    alignment raises; for unpaired hypotheses each sample is simply
    ordered by its own keys.
    """
    ok = [r for r in records if r.status == "ok"]
    group_a = [r for r in ok if _matches(r, hypothesis.group_a)]
    group_b = [r for r in ok if _matches(r, hypothesis.group_b)]
    if not group_a or not group_b:
        empty = "A" if not group_a else "B"
        raise InsufficientDataError(
            f"hypothesis {hypothesis.id!r}: no successful records in group {empty}"
        )
    excluded = hypothesis.contrast_factors()
    agg_a = _aggregate_group(group_a, hypothesis.metric, excluded)
    agg_b = _aggregate_group(group_b, hypothesis.metric, excluded)

    if hypothesis.pairing == "paired":
        missing = sorted(set(agg_a) ^ set(agg_b))
        if missing:
            raise AlignmentError(
                f"hypothesis {hypothesis.id!r}: {len(missing)} pair key(s) present"
                f" in only one group",
                missing_keys=missing,
            )
        keys = sorted(agg_a)
        return [agg_a[k] for k in keys], [agg_b[k] for k in keys], keys
    keys_a = sorted(agg_a)
    keys_b = sorted(agg_b)
    return [agg_a[k] for k in keys_a], [agg_b[k] for k in keys_b], keys_a + keys_b


def _degenerate_result(method: str, n: tuple[int, ...], message: str) -> TestResult:
    return TestResult(
        method=method,
        statistic=0.0,
        p_value=1.0,
        n=n,
        mode=MODE_EXACT,
        warnings=[f"degenerate sample: {message}"],
    )


def _run_method(
    method: str,
    hypothesis: Hypothesis,
    sample_a: list[float],
    sample_b: list[float],
    mode: str,
    rationale: list[str],
) -> tuple[TestResult, EffectSize | None]:
    """Run one mapped test, substituting the unpaired analogue if needed."""
    paired = hypothesis.pairing == "paired"
    direction = hypothesis.direction
    n_pair = (len(sample_a),)
    n_two = (len(sample_a), len(sample_b))

    if method == "paired-t":
        if not paired:
            rationale.append(
                "paired t-test not applicable to an unpaired hypothesis;"
                " substituted Welch's t-test"
            )
            return _run_method("welch-t", hypothesis, sample_a, sample_b, mode, rationale)
        try:
            result = paired_t(sample_a, sample_b, direction)
        except DegenerateSampleError as exc:
            return _degenerate_result(method, n_pair, str(exc)), None
        try:
            effect = cohens_d(sample_a, sample_b, paired=True)
        except DegenerateSampleError:
            effect = None
        return result, effect

    if method == "welch-t":
        try:
            result = welch_t(sample_a, sample_b, direction)
        except DegenerateSampleError as exc:
            return _degenerate_result(method, n_two, str(exc)), None
        try:
            effect = cohens_d(sample_a, sample_b, paired=False)
        except DegenerateSampleError:
            effect = None
        return result, effect

    if method == "wilcoxon-signed-rank":
        if not paired:
            rationale.append(
                "signed-rank test requires pairing; substituted Mann-Whitney U"
                " for this unpaired hypothesis"
            )
            result, effect = mann_whitney_u(sample_a, sample_b, direction, mode)
            return result, effect
        try:
            result = wilcoxon_signed_rank(sample_a, sample_b, direction, mode)
        except DegenerateSampleError as exc:
            return _degenerate_result(method, n_pair, str(exc)), None
        try:
            effect = matched_rank_biserial(sample_a, sample_b)
        except DegenerateSampleError:
            effect = None
        return result, effect

    if method == "mann-whitney-u":
        result, effect = mann_whitney_u(sample_a, sample_b, direction, mode)
        return result, effect

    if method == "ks-two-sample":
        if direction != "two-sided":
            rationale.append("KS test is always two-sided; hypothesis direction ignored")
        result = ks_two_sample(sample_a, sample_b, mode)
        return result, None

    raise UnsupportedSizeError(f"unknown test method {method!r}")


def evaluate_hypothesis(
    hypothesis: Hypothesis,
    design: ExperimentDesign,
    records: Sequence[RunRecord],
    alpha_pre: float = DEFAULT_ALPHA_PRE,
    ci_level: float = 0.95,
    mode: str = "auto",
    alpha_override: float | None = None,
) -> Verdict:
    """Evaluate one hypothesis against an archive of run records."""
    sample_a, sample_b, _ = extract_group_samples(hypothesis, records)
    if len(sample_a) < MIN_GROUP_N or len(sample_b) < MIN_GROUP_N:
        raise InsufficientDataError(
            f"hypothesis {hypothesis.id!r}: aggregated group sizes"
            f" {len(sample_a)}/{len(sample_b)} below the floor of {MIN_GROUP_N}"
        )

    classification = classify(sample_a, sample_b, alpha_pre)
    chosen = select_test(classification)
    rationale = list(classification.notes)
    if classification.key == (DIST_NORMAL, VAR_UNEQUAL):
        rationale.append(
            "normal/unequal row applies the unpaired Welch test even when the"
            " hypothesis is paired; variance equality is ill-defined for paired"
            " data, so this convention is recorded rather than reinterpreted"
        )
    trace = SelectionTrace(
        alpha_pre=alpha_pre,
        sw_p_a=classification.sw_p_a,
        sw_p_b=classification.sw_p_b,
        levene_p=classification.levene_p,
        classification=classification.key,
        chosen_tests=chosen,
        rationale=rationale,
    )

    primary, effect = _run_method(
        chosen[0], hypothesis, sample_a, sample_b, mode, rationale
    )
    secondary = None
    if len(chosen) > 1:
        secondary, _ = _run_method(
            chosen[1], hypothesis, sample_a, sample_b, mode, rationale
        )
        rationale.append(
            "mixed-distribution row: Mann-Whitney U decides, KS result is advisory"
        )

    alpha = alpha_override if alpha_override is not None else hypothesis.alpha
    decision = "reject-H0" if primary.p_value < alpha else "fail-to-reject-H0"

    warnings = list(primary.warnings)
    if secondary is not None:
        warnings.extend(f"ks: {w}" for w in secondary.warnings)

    return Verdict(
        hypothesis_id=hypothesis.id,
        decision=decision,
        alpha=alpha,
        primary=primary,
        secondary=secondary,
        effect_size=effect,
        group_a=_summarize(
            "A", hypothesis.group_a, sample_a, ci_level
        ),
        group_b=_summarize(
            "B", hypothesis.group_b, sample_b, ci_level
        ),
        trace=trace,
        warnings=warnings,
    )


def _summarize(
    label: str, selector: dict[str, Value], sample: list[float], ci_level: float
) -> GroupSummary:
    ci = confidence_interval(sample, ci_level)
    n = len(sample)
    mean_v = ci.center
    var = math.fsum((x - mean_v) ** 2 for x in sample) / (n - 1)
    return GroupSummary(
        label=label,
        selector=dict(selector),
        n=n,
        mean=mean_v,
        sd=math.sqrt(var),
        ci=ci,
    )


def apply_holm_bonferroni(verdicts: Sequence[Verdict]) -> None:
    """Holm-Bonferroni step-down correction across a design's verdicts.

    Re-derives each verdict's decision in place from the ordered
    p-values; a note is appended to every touched trace.
    """
    m = len(verdicts)
    if m <= 1:
        return
    order = sorted(range(m), key=lambda i: verdicts[i].primary.p_value)
    still_rejecting = True
    for rank, idx in enumerate(order):
        v = verdicts[idx]
        threshold = v.alpha / (m - rank)
        reject = still_rejecting and v.primary.p_value < threshold
        if not reject:
            still_rejecting = False
        v.decision = "reject-H0" if reject else "fail-to-reject-H0"
        v.trace.rationale.append(
            f"holm-bonferroni: rank {rank + 1}/{m}, threshold {threshold:.6g}"
        )
