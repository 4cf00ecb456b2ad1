"""Trial execution against an external experiment program.

The experiment is an opaque program: the harness writes a per-trial
input manifest (schema ``veritas_trial_v1``) holding every independent
and control binding, the derived seed and the fold assignment, invokes
the configured command with ``{input}`` / ``{output}`` / ``{artifacts}``
placeholders substituted, and reads back a JSON file mapping each
dependent variable to its value.  Shuffling and fold membership are
computed by the harness (see ``seeding``) so the program itself has no
source of irreproducibility beyond its own use of the provided seed.

Failures are recorded, never retried: a nonzero exit is ``failed``, a
blown deadline is ``timeout`` and a missing/extra/ill-typed outcome is
``invalid-output``.
"""

from __future__ import annotations

import json
import math
import subprocess
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .archive import load_completed, record_to_line, write_archive
from .errors import ArchiveCorruptError, InvalidArgumentError
from .model import ExperimentDesign, Trial, Value, enumerate_trials
from .records import (
    STATUS_FAILED,
    STATUS_INVALID_OUTPUT,
    STATUS_OK,
    STATUS_TIMEOUT,
    RunRecord,
    capture_environment,
)

TRIAL_SCHEMA = "veritas_trial_v1"


@dataclass
class ExecutorConfig:
    """How to invoke the external experiment program."""

    command: list[str]
    timeout: float = 60.0
    working_dir: str | None = None
    env_overrides: dict[str, str] = field(default_factory=dict)
    parallelism: int = 1
    artifact_root: str | None = None

    def validate(self) -> None:
        if not self.command:
            raise InvalidArgumentError("executor command is empty")
        if not self.timeout > 0:
            raise InvalidArgumentError(f"timeout must be positive, got {self.timeout}")
        if self.parallelism < 1:
            raise InvalidArgumentError(
                f"parallelism must be >= 1, got {self.parallelism}"
            )


@dataclass
class RunSummary:
    total: int
    executed: int
    counts: dict[str, int]

    @property
    def all_ok(self) -> bool:
        return self.counts.get(STATUS_OK, 0) == self.total


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def trial_input_manifest(
    trial: Trial, design: ExperimentDesign, output_path: str, artifact_dir: str | None
) -> dict:
    manifest = {
        "schema": TRIAL_SCHEMA,
        "trial_index": trial.index,
        "coords": {
            "grid_point": trial.grid_point,
            "seed_index": trial.seed_index,
            "fold_index": trial.fold_index,
            "replication": trial.replication,
        },
        "independent": {k: trial.bindings_x[k] for k in sorted(trial.bindings_x)},
        "control": {k: trial.bindings_c[k] for k in sorted(trial.bindings_c)},
        "seed": trial.derived_seed,
        "fold": {"index": trial.fold_index, "count": design.cv_folds},
        "output_path": output_path,
    }
    if artifact_dir is not None:
        manifest["artifact_dir"] = artifact_dir
    return manifest


def _substitute(template: list[str], paths: dict[str, str]) -> list[str]:
    out = []
    for arg in template:
        for key, value in paths.items():
            arg = arg.replace("{" + key + "}", value)
        out.append(arg)
    return out


def _parse_outcomes(
    output_path: Path, design: ExperimentDesign
) -> tuple[dict[str, Value] | None, str]:
    """Validate the executor's output file; returns (outcomes, error)."""
    try:
        with open(output_path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        return None, "output file not written"
    except (OSError, json.JSONDecodeError) as exc:
        return None, f"output file unreadable: {exc}"
    if not isinstance(data, dict) or data.get("schema") != TRIAL_SCHEMA:
        return None, f"output schema must be {TRIAL_SCHEMA!r}"
    raw = data.get("outcomes")
    if not isinstance(raw, dict):
        return None, "output is missing the outcomes object"

    dependents = design.by_role("dependent")
    expected = {v.name: v for v in dependents}
    missing = sorted(set(expected) - set(raw))
    extra = sorted(set(raw) - set(expected))
    if missing:
        return None, f"missing outcome(s): {', '.join(missing)}"
    if extra:
        return None, f"unexpected outcome(s): {', '.join(extra)}"
    outcomes: dict[str, Value] = {}
    for name, spec in expected.items():
        value = raw[name]
        if spec.domain.kind == "real" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, float) and not math.isfinite(value):
            return None, f"outcome {name!r} is not finite"
        if not spec.domain.contains(value):
            return None, f"outcome {name!r} = {value!r} outside its domain"
        outcomes[name] = value
    return outcomes, ""


def execute_trial(
    trial: Trial,
    design: ExperimentDesign,
    cfg: ExecutorConfig,
    environment: dict | None = None,
) -> RunRecord:
    """Run one trial through the external program and record the result."""
    cfg.validate()
    if environment is None:
        environment = capture_environment(" ".join(cfg.command))
    started = _utc_now()
    t0 = time.monotonic()
    status = STATUS_OK
    outcomes: dict[str, Value] | None = None
    detail = ""

    with tempfile.TemporaryDirectory(prefix=f"veritas-trial-{trial.index}-") as tmp:
        tmp_path = Path(tmp)
        input_path = tmp_path / "trial_input.json"
        output_path = tmp_path / "trial_output.json"
        artifact_dir = None
        if cfg.artifact_root is not None:
            artifact_dir = str(Path(cfg.artifact_root) / f"trial_{trial.index:06d}")
            Path(artifact_dir).mkdir(parents=True, exist_ok=True)
        manifest = trial_input_manifest(trial, design, str(output_path), artifact_dir)
        input_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")

        argv = _substitute(
            cfg.command,
            {
                "input": str(input_path),
                "output": str(output_path),
                "artifacts": artifact_dir or "",
            },
        )
        try:
            proc = subprocess.run(
                argv,
                cwd=cfg.working_dir,
                env=_merged_env(cfg.env_overrides),
                capture_output=True,
                text=True,
                timeout=cfg.timeout,
            )
            if proc.returncode != 0:
                status = STATUS_FAILED
                detail = f"exit code {proc.returncode}: {proc.stderr.strip()[:500]}"
        except subprocess.TimeoutExpired:
            status = STATUS_TIMEOUT
            detail = f"deadline of {cfg.timeout}s exceeded"
        except OSError as exc:
            status = STATUS_FAILED
            detail = f"could not launch executor: {exc}"

        if status == STATUS_OK:
            outcomes, error = _parse_outcomes(output_path, design)
            if outcomes is None:
                status = STATUS_INVALID_OUTPUT
                detail = error

    return RunRecord(
        trial=trial,
        status=status,
        outcomes=outcomes,
        wall_time=time.monotonic() - t0,
        started_at=started,
        finished_at=_utc_now(),
        environment=environment,
        detail=detail,
    )


def _merged_env(overrides: dict[str, str]) -> dict[str, str] | None:
    if not overrides:
        return None
    import os

    env = dict(os.environ)
    env.update(overrides)
    return env


def run_experiment(
    design: ExperimentDesign, cfg: ExecutorConfig, archive_path: str | Path
) -> RunSummary:
    """Execute every trial not already completed in the archive.

    Records are appended as trials finish; on completion the archive is
    rewritten in trial-index order (same record bytes, stable order) so
    the file content is independent of scheduling and parallelism.
    """
    cfg.validate()
    trials = enumerate_trials(design)
    archive_path = Path(archive_path)
    archive_path.parent.mkdir(parents=True, exist_ok=True)

    completed = load_completed(archive_path)
    for index, record in completed.items():
        if index >= len(trials):
            raise ArchiveCorruptError(
                f"archive holds trial index {index} but the design has only"
                f" {len(trials)} trials"
            )
        if record.trial.derived_seed != trials[index].derived_seed:
            raise ArchiveCorruptError(
                f"archive trial {index} does not match this design"
                " (different derived seed); refusing to resume"
            )

    pending = [t for t in trials if t.index not in completed]
    environment = capture_environment(" ".join(cfg.command))
    new_records: list[RunRecord] = []

    if pending:
        lock = threading.Lock()
        with open(archive_path, "a", encoding="utf-8") as fh:
            def _run(trial: Trial) -> RunRecord:
                return execute_trial(trial, design, cfg, environment)

            if cfg.parallelism == 1:
                for trial in pending:
                    record = _run(trial)
                    new_records.append(record)
                    fh.write(record_to_line(record) + "\n")
                    fh.flush()
            else:
                with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
                    futures = [pool.submit(_run, t) for t in pending]
                    for future in as_completed(futures):
                        record = future.result()
                        with lock:
                            new_records.append(record)
                            fh.write(record_to_line(record) + "\n")
                            fh.flush()
        # Finalize: same records, deterministic order.
        write_archive(archive_path, list(completed.values()) + new_records)

    counts: dict[str, int] = {}
    for record in list(completed.values()) + new_records:
        counts[record.status] = counts.get(record.status, 0) + 1
    return RunSummary(total=len(trials), executed=len(pending), counts=counts)
