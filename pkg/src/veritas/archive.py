"""Append-only run archive: one JSON record per line.

The archive is the single source of truth for analysis.  Lines are
appended as trials complete (resume-safe) and the finalized file is
ordered by trial index so its bytes are independent of scheduling.
Completed records are never modified.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ArchiveCorruptError
from .records import NONCANONICAL_FIELDS, RunRecord, record_from_dict, record_to_dict

_SEPARATORS = (",", ":")


def record_to_line(record: RunRecord) -> str:
    return json.dumps(record_to_dict(record), separators=_SEPARATORS)


def write_archive(path: str | Path, records: Sequence[RunRecord]) -> None:
    """Atomically write a full archive, ordered by trial index."""
    ordered = sorted(records, key=lambda r: r.trial.index)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=".archive-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for record in ordered:
                fh.write(record_to_line(record))
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_lines(
    lines: Iterable[str], tolerate_partial_tail: bool
) -> list[RunRecord]:
    records: list[RunRecord] = []
    seen: dict[int, int] = {}
    raw = list(lines)
    for i, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            if tolerate_partial_tail and i == len(raw):
                break  # crash-truncated final line: that trial simply never finished
            raise ArchiveCorruptError(
                f"line {i}: truncated or malformed record ({exc.msg})", line_number=i
            ) from exc
        record = record_from_dict(data, line_number=i)
        index = record.trial.index
        if index in seen:
            raise ArchiveCorruptError(
                f"line {i}: duplicate trial index {index} (first at line {seen[index]})",
                line_number=i,
            )
        seen[index] = i
        records.append(record)
    return records


def read_archive(path: str | Path) -> list[RunRecord]:
    """Strict archive read; raises ArchiveCorruptError with line numbers."""
    with open(path, encoding="utf-8") as fh:
        return _parse_lines(fh, tolerate_partial_tail=False)


def load_completed(path: str | Path) -> dict[int, RunRecord]:
    """Lenient read for resume: a crash-truncated final line is dropped."""
    if not Path(path).exists():
        return {}
    with open(path, encoding="utf-8") as fh:
        records = _parse_lines(fh, tolerate_partial_tail=True)
    return {r.trial.index: r for r in records}


def canonical_bytes(records: Sequence[RunRecord]) -> bytes:
    """Archive bytes with the non-reproducible fields masked.

    Two runs of the same design are replicable iff their canonical
    bytes are identical.
    """
    lines = []
    for record in sorted(records, key=lambda r: r.trial.index):
        data = record_to_dict(record)
        for field in NONCANONICAL_FIELDS:
            data[field] = None
        lines.append(json.dumps(data, separators=_SEPARATORS))
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
