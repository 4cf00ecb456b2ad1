"""Automated audit of a design/archive/analysis against the 16-item
methodology checklist, plus the FAIR metadata descriptor.

Ten items are machine-checkable from the design and the analysis
outputs; two are checked against the produced verdicts; the four
publication items rest on explicit attestations (status
``manual-attestation`` when attested, ``fail`` otherwise) -- the
harness can record but not verify what was published.

Each item keys on one narrow piece of evidence (named in the entry) so
removing a single practice flips exactly its own item.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .errors import ManifestError
from .model import ExperimentDesign

FAIR_SCHEMA = "veritas_fair_v1"

PASS = "pass"
FAIL = "fail"
MANUAL = "manual-attestation"

DATASET_FACTOR = "dataset"  # naming convention for the dataset factor

CHECKLIST_ITEMS: tuple[tuple[str, str], ...] = (
    ("falsifiable-hypotheses", "Falsifiable hypotheses defined"),
    ("independent-variables", "Independent variables defined"),
    ("control-variables", "Control variables defined"),
    ("dependent-variables", "Dependent variables defined"),
    ("baseline-models", "Baseline models defined"),
    ("multiple-datasets", "Multiple data sets selected"),
    ("replication-runs", "Replication runs (re-runs) performed"),
    ("random-seeds", "All random seeds set and multiple values tested"),
    ("cross-validation", "Cross validations over partial data sets performed"),
    ("hyperparameter-tuning", "Hyperparameter tuning for every model including baselines performed"),
    ("results-averaged", "Results averaged with mean and variance values over cross validations, seeds and replications"),
    ("statistical-testing", "Statistical testing of hypotheses performed"),
    ("code-published", "Code published"),
    ("environment-published", "Software environment published"),
    ("data-published-fair", "Data published (FAIR)"),
    ("model-published", "Trained model (weights) published"),
)


@dataclass(frozen=True)
class DatasetReference:
    name: str
    source: str = ""
    sha256: str = ""


@dataclass
class FairDescriptor:
    identifier: str = ""
    title: str = ""
    creators: list[str] = field(default_factory=list)
    license: str = ""
    datasets: list[DatasetReference] = field(default_factory=list)
    keywords: list[str] = field(default_factory=list)
    harness_version: str = ""
    manifest_checksum: str = ""

    def complete(self) -> bool:
        return bool(
            self.identifier
            and self.license
            and any(d.name for d in self.datasets)
        )


def load_fair(path: str | Path) -> FairDescriptor:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read FAIR descriptor {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema") != FAIR_SCHEMA:
        raise ManifestError(f"{path}: schema must be {FAIR_SCHEMA!r}")
    datasets = [
        DatasetReference(
            name=str(d.get("name", "")),
            source=str(d.get("source", "")),
            sha256=str(d.get("sha256", "")),
        )
        for d in data.get("datasets", [])
        if isinstance(d, dict)
    ]
    return FairDescriptor(
        identifier=str(data.get("identifier", "")),
        title=str(data.get("title", "")),
        creators=[str(c) for c in data.get("creators", [])],
        license=str(data.get("license", "")),
        datasets=datasets,
        keywords=[str(k) for k in data.get("keywords", [])],
        harness_version=str(data.get("harness_version", "")),
        manifest_checksum=str(data.get("manifest_checksum", "")),
    )


def checksum_file(path: str | Path) -> str:
    """Hex sha256 of a file's bytes (dataset/manifest identity)."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class VerdictEvidence:
    """What the audit needs to know about one rendered verdict."""

    hypothesis_id: str
    has_test: bool
    has_group_stats: bool


@dataclass
class ChecklistEntry:
    item_id: str
    title: str
    status: str  # pass | fail | manual-attestation
    evidence: str


@dataclass
class ChecklistReport:
    entries: list[ChecklistEntry]

    @property
    def failed(self) -> list[ChecklistEntry]:
        return [e for e in self.entries if e.status == FAIL]

    @property
    def all_checks_pass(self) -> bool:
        return not self.failed


def _as_evidence(verdicts: Sequence[Any] | None) -> list[VerdictEvidence]:
    out: list[VerdictEvidence] = []
    for v in verdicts or ():
        if isinstance(v, VerdictEvidence):
            out.append(v)
            continue
        # selector.Verdict object
        group_a = getattr(v, "group_a", None)
        group_b = getattr(v, "group_b", None)
        has_stats = all(
            g is not None and g.n >= 1 and g.ci is not None for g in (group_a, group_b)
        )
        out.append(
            VerdictEvidence(
                hypothesis_id=getattr(v, "hypothesis_id", ""),
                has_test=getattr(v, "primary", None) is not None,
                has_group_stats=has_stats,
            )
        )
    return out


def evidence_from_report(report: dict[str, Any]) -> list[VerdictEvidence]:
    """Build audit evidence from a structured report document."""
    stats_by_id: dict[str, int] = {}
    for g in report.get("groups", []):
        if all(k in g for k in ("n", "mean", "sd", "ci_lower", "ci_upper")):
            stats_by_id[g.get("hypothesis", "")] = stats_by_id.get(g.get("hypothesis", ""), 0) + 1
    out = []
    for h in report.get("hypotheses", []):
        primary = h.get("primary") or {}
        out.append(
            VerdictEvidence(
                hypothesis_id=str(h.get("id", "")),
                has_test="p_value" in primary,
                has_group_stats=stats_by_id.get(str(h.get("id", "")), 0) >= 2,
            )
        )
    return out


def _hypothesis_contrasts(design: ExperimentDesign) -> set[str]:
    factors: set[str] = set()
    for h in design.hypotheses:
        factors.update(h.contrast_factors())
    return factors


def audit_checklist(
    design: ExperimentDesign | None,
    records: Sequence[Any] | None,
    verdicts: Sequence[Any] | None,
    fair: FairDescriptor | None,
) -> ChecklistReport:
    """Audit whatever inputs are available; missing evidence fails items."""
    evidence = _as_evidence(verdicts)
    record_count = len(records) if records else 0
    entries: list[ChecklistEntry] = []

    def add(item_id: str, ok: bool, note: str, manual: bool = False) -> None:
        title = dict(CHECKLIST_ITEMS)[item_id]
        status = (MANUAL if ok else FAIL) if manual else (PASS if ok else FAIL)
        entries.append(ChecklistEntry(item_id=item_id, title=title, status=status, evidence=note))

    if design is None:
        grid: dict = {}
        contrasts: set[str] = set()
        attest: dict = {}
    else:
        grid = design.factor_grid
        contrasts = _hypothesis_contrasts(design)
        attest = design.attestations or {}

    # 1. Falsifiable hypotheses: concrete H0/Ha text, metric, groups, alpha.
    if design is None or not design.hypotheses:
        add("falsifiable-hypotheses", False, "no hypotheses declared")
    else:
        bad = [
            h.id or f"#{i}"
            for i, h in enumerate(design.hypotheses)
            if not (
                h.statement_null.strip()
                and h.statement_alt.strip()
                and h.metric
                and h.group_a
                and h.group_b
                and isinstance(h.alpha, float)
                and 0.0 < h.alpha < 1.0
            )
        ]
        add(
            "falsifiable-hypotheses",
            not bad,
            f"{len(design.hypotheses)} hypothesis(es) with H0/Ha, metric, groups, alpha"
            if not bad
            else "incomplete hypothesis(es): " + ", ".join(bad),
        )

    # 2-4. Variable roles declared.
    for item_id, role in (
        ("independent-variables", "independent"),
        ("control-variables", "control"),
        ("dependent-variables", "dependent"),
    ):
        count = len(design.by_role(role)) if design is not None else 0
        add(item_id, count >= 1, f"design declares {count} {role} variable(s)")

    # 5. Baseline: some hypothesis contrasts a swept factor with >= 2 levels.
    baseline_factors = sorted(
        f for f in contrasts if len(grid.get(f, ())) >= 2
    )
    add(
        "baseline-models",
        bool(baseline_factors),
        f"hypothesis contrast over {baseline_factors}" if baseline_factors
        else "no hypothesis contrasts a factor swept with >= 2 levels",
    )

    # 6. Multiple datasets: the 'dataset' factor carries >= 2 levels.
    ds_levels = len(grid.get(DATASET_FACTOR, ()))
    add(
        "multiple-datasets",
        ds_levels >= 2,
        f"factor_grid[{DATASET_FACTOR}] has {ds_levels} level(s)",
    )

    # 7-9. Repetition dimensions.
    reps = design.replications if design is not None else 0
    seeds = design.seed_count if design is not None else 0
    folds = design.cv_folds if design is not None else 0
    suffix = f"; archive holds {record_count} record(s)" if record_count else ""
    add("replication-runs", reps >= 2, f"design.replications={reps}{suffix}")
    add("random-seeds", seeds >= 2, f"design.seed_count={seeds}{suffix}")
    add("cross-validation", folds >= 2, f"design.cv_folds={folds}{suffix}")

    # 10. Hyperparameter sweep crossing the method factor: a further factor
    # with >= 2 levels, fully crossed (no grid subsample).
    hyper = sorted(
        name
        for name, levels in grid.items()
        if name != DATASET_FACTOR and name not in contrasts and len(levels) >= 2
    )
    fully_crossed = design is None or design.grid_sample is None
    add(
        "hyperparameter-tuning",
        bool(hyper) and fully_crossed,
        f"hyperparameter factor(s) {hyper} fully crossed with the contrast"
        if hyper and fully_crossed
        else "no swept hyperparameter factor crossing the contrast factor"
        if not hyper
        else "grid subsampling breaks full crossing",
    )

    # 11. Aggregated mean/variance stats present in the analysis output.
    stats_missing = [e.hypothesis_id for e in evidence if not e.has_group_stats]
    add(
        "results-averaged",
        not stats_missing,
        "every verdict carries per-group n/mean/sd/CI aggregates"
        if evidence and not stats_missing
        else ("no verdicts to carry aggregates (vacuous)" if not evidence
              else "verdicts missing group aggregates: " + ", ".join(stats_missing)),
    )

    # 12. Statistical testing: a tested verdict for every declared hypothesis.
    if design is None or not design.hypotheses:
        add("statistical-testing", False, "no hypotheses to test")
    else:
        tested = {e.hypothesis_id for e in evidence if e.has_test}
        missing = sorted(h.id for h in design.hypotheses if h.id not in tested)
        add(
            "statistical-testing",
            not missing,
            f"verdicts present for all {len(design.hypotheses)} hypothesis(es)"
            if not missing
            else "hypotheses without verdicts: " + ", ".join(missing),
        )

    # 13-16. Publication attestations (manual).
    add(
        "code-published",
        bool(attest.get("code_published")),
        f"attestations.code_published={bool(attest.get('code_published'))}",
        manual=True,
    )
    add(
        "environment-published",
        bool(attest.get("environment_published")),
        f"attestations.environment_published={bool(attest.get('environment_published'))}",
        manual=True,
    )
    fair_ok = bool(attest.get("data_published")) and fair is not None and fair.complete()
    add(
        "data-published-fair",
        fair_ok,
        "attested and FAIR descriptor complete (identifier, license, dataset refs)"
        if fair_ok
        else f"attestations.data_published={bool(attest.get('data_published'))},"
        f" fair descriptor {'complete' if fair is not None and fair.complete() else 'incomplete or missing'}",
        manual=True,
    )
    add(
        "model-published",
        bool(attest.get("model_published")),
        f"attestations.model_published={bool(attest.get('model_published'))}",
        manual=True,
    )

    return ChecklistReport(entries=entries)


def render_checklist_table(report: ChecklistReport) -> str:
    width = max(len(e.title) for e in report.entries)
    lines = [f"{'ITEM'.ljust(width)}  STATUS              EVIDENCE", "-" * (width + 40)]
    for e in report.entries:
        lines.append(f"{e.title.ljust(width)}  {e.status.ljust(18)}  {e.evidence}")
    failed = len(report.failed)
    lines.append("-" * (width + 40))
    lines.append(
        f"{len(report.entries) - failed}/{len(report.entries)} items satisfied"
        + (f"; {failed} FAILED" if failed else "")
    )
    return "\n".join(lines)
