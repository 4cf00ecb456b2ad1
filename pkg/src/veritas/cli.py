"""Command-line interface: init, validate, run, analyze, audit, report.

Exit codes are a stable contract:

    0   success
    1   invalid manifest
    2   scaffold target not empty
    3   one or more trials failed (archive still written)
    4   insufficient data for analysis
    5   checklist audit has failing items
    >=64 internal/data errors (65 data integrity, 70 unexpected)

stdout carries machine-parseable summaries only; diagnostics go to
stderr.  There are no interactive prompts and the CLI introduces no
randomness of its own: everything flows from the manifest's master
seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

from . import __version__
from .archive import read_archive
from .checklist import (
    FairDescriptor,
    audit_checklist,
    evidence_from_report,
    load_fair,
    render_checklist_table,
)
from .errors import (
    AlignmentError,
    ArchiveCorruptError,
    InsufficientDataError,
    ManifestError,
    VeritasError,
)
from .manifest import LoadedManifest, load_manifest
from .model import validate_design
from .orchestrator import ExecutorConfig, run_experiment
from .report import generate_report, read_report, render_report_text, write_report
from .selector import apply_holm_bonferroni, evaluate_hypothesis

EXIT_OK = 0
EXIT_INVALID_MANIFEST = 1
EXIT_SCAFFOLD_CONFLICT = 2
EXIT_TRIAL_FAILURES = 3
EXIT_INSUFFICIENT_DATA = 4
EXIT_AUDIT_FAILED = 5
EXIT_DATA_ERROR = 65
EXIT_INTERNAL = 70

_SCAFFOLD_MANIFEST = """\
# veritas experiment manifest (schema veritas_manifest_v1)
#
# Edit freely: `veritas validate --manifest experiment.yaml` reports
# every violated invariant with its field path.
schema: veritas_manifest_v1

variables:
  - name: method
    role: independent
    domain: {kind: categorical, levels: [candidate, baseline]}
    description: the approach under test vs. the reference approach
  - name: dataset
    role: independent
    domain: {kind: categorical, levels: [mnist-like, cifar-like]}
    description: evaluation corpora; keep >= 2 for external validity
  - name: learning_rate
    role: independent
    domain: {kind: real, lower: 0.0001, upper: 1.0}
    description: swept hyperparameter, crossed with method and dataset
  - name: epochs
    role: control
    domain: {kind: integer, lower: 1, upper: 1000}
    description: held fixed across every trial
  - name: accuracy
    role: dependent
    domain: {kind: real, lower: 0.0, upper: 1.0}
    description: observed outcome written by the experiment program

# Every independent variable sweeps these levels (full crossing).
factor_grid:
  method: [candidate, baseline]
  dataset: [mnist-like, cifar-like]
  learning_rate: [0.01, 0.1]

control_bindings:
  epochs: 10

replications: 2      # identical re-runs per configuration
master_seed: 20240613
seed_count: 3        # distinct derived seeds per configuration
cv_folds: 5          # k-fold cross-validation (0 disables)

hypotheses:
  - id: candidate-beats-baseline
    metric: accuracy
    group_a: {method: candidate}
    group_b: {method: baseline}
    pairing: paired
    direction: greater
    alpha: 0.05
    statement_null: candidate accuracy does not exceed baseline accuracy
    statement_alt: candidate accuracy exceeds baseline accuracy

# Publication attestations consumed by `veritas audit`.
attestations:
  code_published: false
  environment_published: false
  data_published: false
  model_published: false

# How to invoke the experiment program. {input} is replaced by the
# per-trial manifest path (schema veritas_trial_v1); the program must
# write its outcomes to the manifest's output_path.
executor:
  command: [python3, executor.py, "{input}"]
  timeout: 60
  parallelism: 2
"""

_SCAFFOLD_EXECUTOR = '''\
#!/usr/bin/env python3
"""Example experiment program for the veritas harness.

Reads the per-trial input manifest (path in argv[1]), derives a
deterministic pseudo-metric from the provided seed and bindings, and
writes the outcome file.  Replace the body of run_trial with a real
experiment; keep all randomness keyed on spec["seed"].
"""
import json
import random
import sys


def run_trial(spec):
    x = spec["independent"]
    rng = random.Random(spec["seed"])
    base = {"mnist-like": 0.90, "cifar-like": 0.72}.get(x["dataset"], 0.80)
    bump = 0.030 if x["method"] == "candidate" else 0.0
    lr_penalty = 0.020 if x["learning_rate"] > 0.05 else 0.0
    accuracy = base + bump - lr_penalty + rng.gauss(0.0, 0.01)
    return {"accuracy": min(max(accuracy, 0.0), 1.0)}


def main():
    with open(sys.argv[1], encoding="utf-8") as fh:
        spec = json.load(fh)
    outcomes = run_trial(spec)
    with open(spec["output_path"], "w", encoding="utf-8") as fh:
        json.dump({"schema": "veritas_trial_v1", "outcomes": outcomes}, fh)


if __name__ == "__main__":
    main()
'''

_SCAFFOLD_FAIR = {
    "schema": "veritas_fair_v1",
    "identifier": "",
    "title": "",
    "creators": [],
    "license": "",
    "datasets": [{"name": "", "source": "", "sha256": ""}],
    "keywords": [],
    "harness_version": __version__,
    "manifest_checksum": "",
}


def _err(message: str) -> None:
    print(f"veritas: {message}", file=sys.stderr)


def _load(manifest_path: str) -> LoadedManifest:
    loaded = load_manifest(manifest_path)
    violations = validate_design(loaded.design)
    if violations:
        for v in violations:
            _err(str(v))
        raise ManifestError(f"{manifest_path}: {len(violations)} violation(s)")
    return loaded


def cmd_init(args: argparse.Namespace) -> int:
    target = Path(args.directory)
    if target.exists() and any(target.iterdir()):
        _err(f"{target}: directory exists and is not empty; refusing to scaffold")
        return EXIT_SCAFFOLD_CONFLICT
    target.mkdir(parents=True, exist_ok=True)
    (target / "experiment.yaml").write_text(_SCAFFOLD_MANIFEST, encoding="utf-8")
    executor = target / "executor.py"
    executor.write_text(_SCAFFOLD_EXECUTOR, encoding="utf-8")
    executor.chmod(0o755)
    (target / "fair.json").write_text(
        json.dumps(_SCAFFOLD_FAIR, indent=2) + "\n", encoding="utf-8"
    )
    print(json.dumps({"created": [str(target / n) for n in
                                  ("experiment.yaml", "executor.py", "fair.json")]}))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    loaded = load_manifest(args.manifest)
    violations = validate_design(loaded.design)
    if violations:
        for v in violations:
            _err(str(v))
        print(json.dumps({"valid": False, "violations": len(violations)}))
        return EXIT_INVALID_MANIFEST
    print(json.dumps({"valid": True, "trials": loaded.design.trial_count()}))
    return EXIT_OK


def _executor_config(loaded: LoadedManifest, args: argparse.Namespace,
                     manifest_path: str) -> ExecutorConfig:
    cfg = loaded.executor
    if cfg is None:
        raise ManifestError(
            f"{manifest_path}: manifest has no executor section; `veritas run`"
            " needs one to know what program to launch"
        )
    if cfg.working_dir is None:
        cfg.working_dir = str(Path(manifest_path).resolve().parent)
    if getattr(args, "parallelism", None) is not None:
        cfg.parallelism = args.parallelism
    elif os.environ.get("VERITAS_PARALLELISM"):
        cfg.parallelism = int(os.environ["VERITAS_PARALLELISM"])
    if getattr(args, "timeout", None) is not None:
        cfg.timeout = args.timeout
    return cfg


def cmd_run(args: argparse.Namespace) -> int:
    loaded = _load(args.manifest)
    cfg = _executor_config(loaded, args, args.manifest)
    summary = run_experiment(loaded.design, cfg, args.archive)
    print(
        json.dumps(
            {
                "archive": str(args.archive),
                "total": summary.total,
                "executed": summary.executed,
                "counts": summary.counts,
            }
        )
    )
    return EXIT_OK if summary.all_ok else EXIT_TRIAL_FAILURES


def cmd_analyze(args: argparse.Namespace) -> int:
    loaded = _load(args.manifest)
    records = read_archive(args.archive)
    verdicts = [
        evaluate_hypothesis(
            h,
            loaded.design,
            records,
            ci_level=args.ci_level,
            mode=args.mode,
            alpha_override=args.alpha,
        )
        for h in loaded.design.hypotheses
    ]
    if args.holm:
        apply_holm_bonferroni(verdicts)
    report = generate_report(loaded.design, records, verdicts)
    out_dir = Path(args.out) if args.out else Path(args.archive).resolve().parent
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    text_path = out_dir / "report.txt"
    write_report(report, report_path)
    text_path.write_text(render_report_text(report), encoding="utf-8")
    print(
        json.dumps(
            {
                "report": str(report_path),
                "rendering": str(text_path),
                "verdicts": [
                    {
                        "id": v.hypothesis_id,
                        "decision": v.decision,
                        "method": v.primary.method,
                        "p_value": v.primary.p_value,
                        "alpha": v.alpha,
                    }
                    for v in verdicts
                ],
            }
        )
    )
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    design = None
    records = None
    evidence = None
    fair: FairDescriptor | None = None
    try:
        loaded = load_manifest(args.manifest)
        design = loaded.design
    except ManifestError as exc:
        _err(f"audit continues without a design: {exc}")
    if args.archive and Path(args.archive).exists():
        try:
            records = read_archive(args.archive)
        except ArchiveCorruptError as exc:
            _err(f"audit continues without an archive: {exc}")
    report_path = args.report
    if report_path is None and args.archive:
        candidate = Path(args.archive).resolve().parent / "report.json"
        report_path = str(candidate) if candidate.exists() else None
    if report_path:
        try:
            evidence = evidence_from_report(read_report(report_path))
        except (OSError, VeritasError, json.JSONDecodeError) as exc:
            _err(f"audit continues without a report: {exc}")
    if args.fair:
        try:
            fair = load_fair(args.fair)
        except ManifestError as exc:
            _err(f"audit continues without a FAIR descriptor: {exc}")

    result = audit_checklist(design, records, evidence, fair)
    print(render_checklist_table(result))
    return EXIT_OK if result.all_checks_pass else EXIT_AUDIT_FAILED


def cmd_report(args: argparse.Namespace) -> int:
    report = read_report(args.report)
    text = render_report_text(report)
    out = (
        Path(args.out) / "report.txt"
        if args.out
        else Path(args.report).with_suffix(".txt")
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    print(json.dumps({"rendering": str(out)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veritas",
        description="Falsifiable, replicable experiment harness",
    )
    parser.add_argument("--version", action="version", version=f"veritas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="scaffold a manifest and a stub executor")
    p.add_argument("directory")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("validate", help="check a manifest against every invariant")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute all pending trials into the archive")
    p.add_argument("--manifest", required=True)
    p.add_argument("--archive", required=True)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="evaluate hypotheses and emit the report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--archive", required=True)
    p.add_argument("--alpha", type=float, default=None, help="override every hypothesis alpha")
    p.add_argument("--ci-level", type=float, default=0.95, dest="ci_level")
    p.add_argument("--mode", choices=("auto", "exact", "approx"), default="auto")
    p.add_argument("--holm", action="store_true", help="Holm-Bonferroni across hypotheses")
    p.add_argument("--out", default=None, help="output directory (default: archive's)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("audit", help="checklist audit of design, archive and report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--archive", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--fair", default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("report", help="re-render the human-readable report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        _err(str(exc))
        return EXIT_INVALID_MANIFEST
    except (InsufficientDataError, AlignmentError) as exc:
        _err(str(exc))
        return EXIT_INSUFFICIENT_DATA
    except ArchiveCorruptError as exc:
        _err(str(exc))
        return EXIT_DATA_ERROR
    except VeritasError as exc:
        _err(str(exc))
        return EXIT_DATA_ERROR
    except Exception:  # pragma: no cover - last-resort diagnostics
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
