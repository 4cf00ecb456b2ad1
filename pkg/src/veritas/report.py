"""Analysis reports: structured JSON plus a human-readable rendering.

Every number in a report is recomputed from archive records alone, so
a reader holding the archive can verify the report line by line.  The
text rendering prints the same values as the structured document at 6
significant digits; nothing is computed twice.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from .errors import InternalInconsistencyError
from .model import ExperimentDesign
from .records import RunRecord
from .selector import GroupSummary, Verdict

REPORT_SCHEMA = "veritas_report_v1"

_NUM_FMT = "%.6g"


def _group_entry(hypothesis_id: str, summary: GroupSummary) -> dict[str, Any]:
    return {
        "hypothesis": hypothesis_id,
        "group": summary.label,
        "selector": {k: summary.selector[k] for k in sorted(summary.selector)},
        "n": summary.n,
        "mean": summary.mean,
        "sd": summary.sd,
        "ci_level": summary.ci.level,
        "ci_lower": summary.ci.lower,
        "ci_upper": summary.ci.upper,
    }


def _test_entry(result) -> dict[str, Any]:
    return {
        "method": result.method,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "n": list(result.n),
        "mode": result.mode,
        "warnings": list(result.warnings),
    }


def _verdict_entry(verdict: Verdict) -> dict[str, Any]:
    return {
        "id": verdict.hypothesis_id,
        "decision": verdict.decision,
        "alpha": verdict.alpha,
        "primary": _test_entry(verdict.primary),
        "secondary": _test_entry(verdict.secondary) if verdict.secondary else None,
        "effect_size": (
            {"kind": verdict.effect_size.kind, "value": verdict.effect_size.value}
            if verdict.effect_size
            else None
        ),
        "warnings": list(verdict.warnings),
        "trace": {
            "alpha_pre": verdict.trace.alpha_pre,
            "normality_p": {"A": verdict.trace.sw_p_a, "B": verdict.trace.sw_p_b},
            "levene_p": verdict.trace.levene_p,
            "classification": list(verdict.trace.classification),
            "chosen_tests": list(verdict.trace.chosen_tests),
            "rationale": list(verdict.trace.rationale),
        },
    }


def generate_report(
    design: ExperimentDesign,
    records: Sequence[RunRecord],
    verdicts: Sequence[Verdict],
    generated_at: str | None = None,
) -> dict[str, Any]:
    """Assemble the structured analysis report (schema veritas_report_v1)."""
    known_ids = {h.id for h in design.hypotheses}
    for verdict in verdicts:
        if verdict.hypothesis_id not in known_ids:
            raise InternalInconsistencyError(
                f"verdict references unknown hypothesis {verdict.hypothesis_id!r}"
            )

    counts: dict[str, int] = {}
    total_wall = 0.0
    for record in records:
        counts[record.status] = counts.get(record.status, 0) + 1
        total_wall += record.wall_time
    environments: list[dict] = []
    for record in sorted(records, key=lambda r: r.trial.index):
        if record.environment and record.environment not in environments:
            environments.append(record.environment)

    groups = []
    for verdict in verdicts:
        groups.append(_group_entry(verdict.hypothesis_id, verdict.group_a))
        groups.append(_group_entry(verdict.hypothesis_id, verdict.group_b))

    return {
        "schema": REPORT_SCHEMA,
        "generated_at": generated_at
        if generated_at is not None
        else datetime.now(timezone.utc).isoformat(),
        "trial_total": len(records),
        "status_counts": {k: counts[k] for k in sorted(counts)},
        "total_wall_time": total_wall,
        "environments": environments,
        "groups": groups,
        "hypotheses": [_verdict_entry(v) for v in verdicts],
    }


def write_report(report: dict[str, Any], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report, indent=2, sort_keys=False) + "\n", encoding="utf-8"
    )


def read_report(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or data.get("schema") != REPORT_SCHEMA:
        raise InternalInconsistencyError(
            f"{path}: not a {REPORT_SCHEMA!r} document"
        )
    return data


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return _NUM_FMT % value
    return str(value)


def render_report_text(report: dict[str, Any]) -> str:
    """Human-readable rendering with the same numbers as the JSON form."""
    lines: list[str] = []
    add = lines.append
    add("VERITAS ANALYSIS REPORT")
    add("=" * 70)
    add(f"generated_at: {report.get('generated_at', '')}")
    add(f"trials recorded: {report.get('trial_total', 0)}")
    counts = report.get("status_counts", {})
    add("status counts: " + (", ".join(f"{k}={v}" for k, v in counts.items()) or "none"))
    add(f"total wall time: {_fmt(report.get('total_wall_time', 0.0))} s")
    for i, env in enumerate(report.get("environments", [])):
        add(
            f"environment[{i}]: {env.get('os_name', 'unknown')}"
            f" {env.get('os_version', 'unknown')},"
            f" cpu {env.get('cpu_model', 'unknown')},"
            f" cores {env.get('logical_cores', 'unknown')},"
            f" harness {env.get('harness_version', 'unknown')}"
        )
    add("")
    add("GROUPS")
    add("-" * 70)
    for g in report.get("groups", []):
        selector = ", ".join(f"{k}={v}" for k, v in g.get("selector", {}).items())
        add(f"[{g['hypothesis']}] group {g['group']} ({selector})")
        add(
            f"  n={g['n']}  mean={_fmt(g['mean'])}  sd={_fmt(g['sd'])}  "
            f"CI{_fmt(g['ci_level'])}=[{_fmt(g['ci_lower'])}, {_fmt(g['ci_upper'])}]"
        )
    add("")
    add("HYPOTHESES")
    add("-" * 70)
    for h in report.get("hypotheses", []):
        add(f"[{h['id']}] decision: {h['decision']}  (alpha={_fmt(h['alpha'])})")
        p = h["primary"]
        add(
            f"  primary: {p['method']}  statistic={_fmt(p['statistic'])}"
            f"  p={_fmt(p['p_value'])}  mode={p['mode']}  n={p['n']}"
        )
        if h.get("secondary"):
            s = h["secondary"]
            add(
                f"  advisory: {s['method']}  statistic={_fmt(s['statistic'])}"
                f"  p={_fmt(s['p_value'])}  mode={s['mode']}"
            )
        if h.get("effect_size"):
            e = h["effect_size"]
            add(f"  effect size: {e['kind']} = {_fmt(e['value'])}")
        trace = h.get("trace", {})
        np_ = trace.get("normality_p", {})
        add(
            f"  trace: SW(A)={_fmt(np_.get('A'))} SW(B)={_fmt(np_.get('B'))}"
            f" levene={_fmt(trace.get('levene_p'))}"
            f" -> {tuple(trace.get('classification', ()))}"
            f" -> {trace.get('chosen_tests')}"
        )
        for note in trace.get("rationale", []):
            add(f"    note: {note}")
        for warning in h.get("warnings", []):
            add(f"    warning: {warning}")
    add("")
    return "\n".join(lines)
