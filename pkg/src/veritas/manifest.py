"""Experiment manifest: the single human-editable design document.

Schema ``veritas_manifest_v1`` (YAML).  Field names match the design
types exactly; an optional ``executor`` section configures how the
external experiment program is invoked, since the command line never
carries the command itself.  Structural problems raise
``ManifestError``; semantic problems are reported by
``validate_design``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ManifestError
from .model import (
    DIRECTIONS,
    DOMAIN_KINDS,
    MANIFEST_SCHEMA,
    PAIRINGS,
    ExperimentDesign,
    Hypothesis,
    VariableDomain,
    VariableSpec,
)
from .orchestrator import ExecutorConfig

ATTESTATION_KEYS = (
    "code_published",
    "environment_published",
    "data_published",
    "model_published",
)

_TOP_LEVEL_KEYS = {
    "schema",
    "variables",
    "factor_grid",
    "control_bindings",
    "replications",
    "master_seed",
    "seed_count",
    "cv_folds",
    "grid_sample",
    "hypotheses",
    "attestations",
    "executor",
}


@dataclass
class LoadedManifest:
    design: ExperimentDesign
    executor: ExecutorConfig | None


def _require(data: dict, key: str, kind, path: str):
    if key not in data:
        raise ManifestError(f"{path}: missing required field {key!r}")
    value = data[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise ManifestError(
            f"{path}.{key}: expected {getattr(kind, '__name__', kind)},"
            f" got {type(value).__name__}"
        )
    return value


def _parse_domain(data, path: str) -> VariableDomain:
    if not isinstance(data, dict):
        raise ManifestError(f"{path}: domain must be a mapping")
    kind = data.get("kind")
    if kind not in DOMAIN_KINDS:
        raise ManifestError(f"{path}.kind: expected one of {DOMAIN_KINDS}, got {kind!r}")
    unknown = set(data) - {"kind", "lower", "upper", "levels"}
    if unknown:
        raise ManifestError(f"{path}: unknown domain field(s) {sorted(unknown)}")
    levels = data.get("levels") or ()
    if levels and not isinstance(levels, list):
        raise ManifestError(f"{path}.levels: expected a list")
    return VariableDomain(
        kind=kind,
        lower=data.get("lower"),
        upper=data.get("upper"),
        levels=tuple(levels),
    )


def _parse_variables(raw, path: str) -> tuple[VariableSpec, ...]:
    if not isinstance(raw, list):
        raise ManifestError(f"{path}: expected a list of variables")
    out = []
    for i, item in enumerate(raw):
        vpath = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise ManifestError(f"{vpath}: variable must be a mapping")
        name = _require(item, "name", str, vpath)
        role = _require(item, "role", str, vpath)
        domain = _parse_domain(item.get("domain"), f"{vpath}.domain")
        out.append(
            VariableSpec(
                name=name,
                role=role,
                domain=domain,
                description=str(item.get("description", "")),
            )
        )
    return tuple(out)


def _parse_hypotheses(raw, path: str) -> tuple[Hypothesis, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ManifestError(f"{path}: expected a list of hypotheses")
    out = []
    for i, item in enumerate(raw):
        hpath = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise ManifestError(f"{hpath}: hypothesis must be a mapping")
        alpha = item.get("alpha", 0.05)
        if isinstance(alpha, int) and not isinstance(alpha, bool):
            alpha = float(alpha)
        pairing = item.get("pairing", "paired")
        direction = item.get("direction", "two-sided")
        if pairing not in PAIRINGS:
            raise ManifestError(f"{hpath}.pairing: expected one of {PAIRINGS}")
        if direction not in DIRECTIONS:
            raise ManifestError(f"{hpath}.direction: expected one of {DIRECTIONS}")
        for group_key in ("group_a", "group_b"):
            if not isinstance(item.get(group_key), dict):
                raise ManifestError(f"{hpath}.{group_key}: expected a mapping of bindings")
        out.append(
            Hypothesis(
                id=str(_require(item, "id", str, hpath)),
                metric=str(_require(item, "metric", str, hpath)),
                group_a=dict(item["group_a"]),
                group_b=dict(item["group_b"]),
                pairing=pairing,
                direction=direction,
                alpha=alpha,
                statement_null=str(item.get("statement_null", "")),
                statement_alt=str(item.get("statement_alt", "")),
            )
        )
    return tuple(out)


def _parse_executor(raw, path: str) -> ExecutorConfig | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ManifestError(f"{path}: executor must be a mapping")
    command = raw.get("command")
    if not isinstance(command, list) or not all(isinstance(c, str) for c in command):
        raise ManifestError(f"{path}.command: expected a list of strings")
    timeout = raw.get("timeout", 60.0)
    if isinstance(timeout, int) and not isinstance(timeout, bool):
        timeout = float(timeout)
    if not isinstance(timeout, float):
        raise ManifestError(f"{path}.timeout: expected a number")
    parallelism = raw.get("parallelism", 1)
    if not isinstance(parallelism, int) or isinstance(parallelism, bool):
        raise ManifestError(f"{path}.parallelism: expected an integer")
    env = raw.get("env_overrides") or {}
    if not isinstance(env, dict):
        raise ManifestError(f"{path}.env_overrides: expected a mapping")
    return ExecutorConfig(
        command=list(command),
        timeout=timeout,
        working_dir=raw.get("working_dir"),
        env_overrides={str(k): str(v) for k, v in env.items()},
        parallelism=parallelism,
        artifact_root=raw.get("artifact_root"),
    )


def parse_manifest(data: dict, source: str = "manifest") -> LoadedManifest:
    if not isinstance(data, dict):
        raise ManifestError(f"{source}: top level must be a mapping")
    schema = data.get("schema")
    if schema != MANIFEST_SCHEMA:
        raise ManifestError(
            f"{source}: schema must be {MANIFEST_SCHEMA!r}, got {schema!r}"
        )
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ManifestError(f"{source}: unknown field(s) {sorted(unknown)}")

    variables = _parse_variables(data.get("variables"), f"{source}.variables")
    factor_grid_raw = data.get("factor_grid") or {}
    if not isinstance(factor_grid_raw, dict):
        raise ManifestError(f"{source}.factor_grid: expected a mapping")
    factor_grid = {
        str(k): tuple(v) if isinstance(v, list) else (v,)
        for k, v in factor_grid_raw.items()
    }
    control_raw = data.get("control_bindings") or {}
    if not isinstance(control_raw, dict):
        raise ManifestError(f"{source}.control_bindings: expected a mapping")

    attest_raw = data.get("attestations") or {}
    if not isinstance(attest_raw, dict):
        raise ManifestError(f"{source}.attestations: expected a mapping")
    attestations = {k: bool(attest_raw.get(k, False)) for k in ATTESTATION_KEYS}

    grid_sample = data.get("grid_sample")
    if grid_sample is not None and (
        not isinstance(grid_sample, int) or isinstance(grid_sample, bool)
    ):
        raise ManifestError(f"{source}.grid_sample: expected an integer or null")

    design = ExperimentDesign(
        variables=variables,
        factor_grid=factor_grid,
        control_bindings=dict(control_raw),
        replications=_require(data, "replications", int, source),
        master_seed=_require(data, "master_seed", int, source),
        seed_count=_require(data, "seed_count", int, source),
        cv_folds=_require(data, "cv_folds", int, source),
        hypotheses=_parse_hypotheses(data.get("hypotheses"), f"{source}.hypotheses"),
        attestations=attestations,
        grid_sample=grid_sample,
    )
    executor = _parse_executor(data.get("executor"), f"{source}.executor")
    return LoadedManifest(design=design, executor=executor)


def load_manifest(path: str | Path) -> LoadedManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ManifestError(f"{path}: not valid YAML: {exc}") from exc
    return parse_manifest(data, source=str(path))
