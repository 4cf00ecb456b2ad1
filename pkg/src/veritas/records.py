"""Run records: one executed trial with outcomes, status and environment.

Serialization is canonical: fixed field order, sorted binding keys and
round-trip float formatting, so two runs of the same design produce
byte-identical archives once the non-reproducible fields (wall time,
timestamps) are masked.
"""

from __future__ import annotations

import os
import platform
from dataclasses import dataclass, field
from typing import Any

from .errors import ArchiveCorruptError
from .model import Trial, Value

ARCHIVE_SCHEMA = "veritas_archive_v1"

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_TIMEOUT = "timeout"
STATUS_INVALID_OUTPUT = "invalid-output"
STATUSES = (STATUS_OK, STATUS_FAILED, STATUS_TIMEOUT, STATUS_INVALID_OUTPUT)

# Fields that cannot be reproduced across runs; masked before any
# determinism comparison.
NONCANONICAL_FIELDS = ("wall_time", "started_at", "finished_at")

_ENV_KEYS = (
    "os_name",
    "os_version",
    "cpu_model",
    "logical_cores",
    "total_memory_bytes",
    "harness_version",
    "executor_command",
)


@dataclass
class RunRecord:
    trial: Trial
    status: str
    outcomes: dict[str, Value] | None
    wall_time: float
    started_at: str
    finished_at: str
    environment: dict[str, Any] = field(default_factory=dict)
    detail: str = ""  # short diagnostic for non-ok statuses


def _cpu_model() -> str:
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or "unknown"


def _total_memory_bytes() -> int | str:
    try:
        with open("/proc/meminfo", encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("MemTotal"):
                    return int(line.split()[1]) * 1024
    except (OSError, ValueError, IndexError):
        pass
    return "unknown"


def capture_environment(executor_command: str) -> dict[str, Any]:
    """Best-effort descriptor of the machine running the trials."""
    from . import __version__

    return {
        "os_name": platform.system() or "unknown",
        "os_version": platform.release() or "unknown",
        "cpu_model": _cpu_model(),
        "logical_cores": os.cpu_count() or "unknown",
        "total_memory_bytes": _total_memory_bytes(),
        "harness_version": __version__,
        "executor_command": executor_command,
    }


def _sorted_bindings(bindings: dict[str, Value]) -> dict[str, Value]:
    return {k: bindings[k] for k in sorted(bindings)}


def record_to_dict(record: RunRecord) -> dict[str, Any]:
    """Canonical dict form of a record (fixed field order)."""
    trial = record.trial
    env = record.environment or {}
    return {
        "schema": ARCHIVE_SCHEMA,
        "trial": {
            "index": trial.index,
            "grid_point": trial.grid_point,
            "seed_index": trial.seed_index,
            "fold_index": trial.fold_index,
            "replication": trial.replication,
            "bindings_x": _sorted_bindings(trial.bindings_x),
            "bindings_c": _sorted_bindings(trial.bindings_c),
            "derived_seed": trial.derived_seed,
        },
        "status": record.status,
        "outcomes": (
            _sorted_bindings(record.outcomes) if record.outcomes is not None else None
        ),
        "detail": record.detail,
        "wall_time": record.wall_time,
        "started_at": record.started_at,
        "finished_at": record.finished_at,
        "environment": {k: env.get(k, "unknown") for k in _ENV_KEYS},
    }


def record_from_dict(data: dict[str, Any], line_number: int | None = None) -> RunRecord:
    def fail(message: str) -> ArchiveCorruptError:
        return ArchiveCorruptError(message, line_number=line_number)

    if not isinstance(data, dict):
        raise fail("record is not an object")
    if data.get("schema") != ARCHIVE_SCHEMA:
        raise fail(
            f"schema mismatch: expected {ARCHIVE_SCHEMA!r}, got {data.get('schema')!r}"
        )
    trial_data = data.get("trial")
    if not isinstance(trial_data, dict):
        raise fail("missing trial object")
    try:
        trial = Trial(
            index=int(trial_data["index"]),
            grid_point=int(trial_data["grid_point"]),
            seed_index=int(trial_data["seed_index"]),
            fold_index=int(trial_data["fold_index"]),
            replication=int(trial_data["replication"]),
            bindings_x=dict(trial_data["bindings_x"]),
            bindings_c=dict(trial_data["bindings_c"]),
            derived_seed=int(trial_data["derived_seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise fail(f"malformed trial object: {exc}") from exc
    status = data.get("status")
    if status not in STATUSES:
        raise fail(f"unknown status {status!r}")
    outcomes = data.get("outcomes")
    if status == STATUS_OK and not isinstance(outcomes, dict):
        raise fail("ok record without outcomes")
    if status != STATUS_OK and outcomes is not None:
        raise fail(f"{status} record must not carry outcomes")
    return RunRecord(
        trial=trial,
        status=status,
        outcomes=outcomes,
        wall_time=float(data.get("wall_time", 0.0)),
        started_at=str(data.get("started_at", "")),
        finished_at=str(data.get("finished_at", "")),
        environment=dict(data.get("environment", {})),
        detail=str(data.get("detail", "")),
    )
