"""Core experiment objects: variables, domains, hypotheses, designs, trials.

A design declares typed independent (swept), control (fixed) and
dependent (observed) variables, a factor grid, seed/fold/replication
counts and the hypotheses to be tested over the outcomes.  Designs are
plain data: ``validate_design`` reports every violated invariant as a
value rather than raising, and ``enumerate_trials`` expands a valid
design into its full, canonically ordered trial list.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import InvalidArgumentError, TrialCapExceededError
from .seeding import GRID_SAMPLE_TAG, SplitMix64, _fisher_yates, derive_seed

Value = str | int | float

ROLES = ("independent", "control", "dependent")
DOMAIN_KINDS = ("real", "integer", "categorical")
PAIRINGS = ("paired", "unpaired")
DIRECTIONS = ("two-sided", "greater", "less")

DEFAULT_TRIAL_CAP = 1_000_000

MANIFEST_SCHEMA = "veritas_manifest_v1"


@dataclass(frozen=True)
class VariableDomain:
    """Value domain of one variable: real/integer interval or categorical set."""

    kind: str
    lower: float | int | None = None
    upper: float | int | None = None
    levels: tuple[str, ...] = ()

    def contains(self, value: Value) -> bool:
        if self.kind == "categorical":
            return isinstance(value, str) and value in self.levels
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        if not math.isfinite(value):
            return False
        if self.kind == "integer" and not isinstance(value, int):
            return False
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True


@dataclass(frozen=True)
class VariableSpec:
    name: str
    role: str
    domain: VariableDomain
    description: str = ""


@dataclass(frozen=True)
class Hypothesis:
    """A falsifiable H0/Ha pair over one dependent variable.

    ``group_a`` and ``group_b`` select trials by exact bindings, e.g.
    ``{"method": "candidate"}`` vs ``{"method": "baseline"}``.  The two
    selectors must be provably disjoint (they pin some shared variable
    to different values).
    """

    id: str
    metric: str
    group_a: dict[str, Value]
    group_b: dict[str, Value]
    pairing: str = "paired"
    direction: str = "two-sided"
    alpha: float = 0.05
    statement_null: str = ""
    statement_alt: str = ""

    def contrast_factors(self) -> tuple[str, ...]:
        """Variables the two group selectors pin to different values."""
        names = sorted(set(self.group_a) | set(self.group_b))
        return tuple(
            n for n in names if self.group_a.get(n) != self.group_b.get(n)
        )


@dataclass(frozen=True)
class ExperimentDesign:
    variables: tuple[VariableSpec, ...]
    factor_grid: dict[str, tuple[Value, ...]]
    control_bindings: dict[str, Value]
    replications: int = 1
    master_seed: int = 0
    seed_count: int = 1
    cv_folds: int = 0
    hypotheses: tuple[Hypothesis, ...] = ()
    attestations: dict[str, bool] = field(default_factory=dict)
    # When set, only this many grid points (seeded draw) are executed:
    # grid search becomes random search over the same factor algebra.
    grid_sample: int | None = None

    def by_role(self, role: str) -> tuple[VariableSpec, ...]:
        return tuple(v for v in self.variables if v.role == role)

    def variable(self, name: str) -> VariableSpec | None:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def grid_point_count(self) -> int:
        count = 1
        for spec in self.by_role("independent"):
            count *= len(self.factor_grid.get(spec.name, ()))
        return count

    def trial_count(self) -> int:
        points = self.grid_point_count()
        if self.grid_sample is not None:
            points = min(points, self.grid_sample)
        return points * self.seed_count * max(self.cv_folds, 1) * self.replications


@dataclass(frozen=True)
class Trial:
    """One evaluation point of the experiment function.

    ``index`` is the dense ordinal; ``coords`` is (grid point, seed
    index, fold index, replication), grid point outermost in the
    canonical order.  ``derived_seed`` is a pure function of the master
    seed and the coordinates.
    """

    index: int
    grid_point: int
    seed_index: int
    fold_index: int
    replication: int
    bindings_x: dict[str, Value]
    bindings_c: dict[str, Value]
    derived_seed: int

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.grid_point, self.seed_index, self.fold_index, self.replication)

    def bindings(self) -> dict[str, Value]:
        merged = dict(self.bindings_x)
        merged.update(self.bindings_c)
        return merged


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_domain(domain: VariableDomain, path: str, out: list[Violation]) -> None:
    if domain.kind not in DOMAIN_KINDS:
        out.append(Violation(f"{path}.kind", f"unknown domain kind {domain.kind!r}"))
        return
    if domain.kind == "categorical":
        if not domain.levels:
            out.append(Violation(f"{path}.levels", "categorical domain has no levels"))
        if len(set(domain.levels)) != len(domain.levels):
            out.append(Violation(f"{path}.levels", "categorical levels are not unique"))
        if any(not isinstance(lv, str) or not lv for lv in domain.levels):
            out.append(Violation(f"{path}.levels", "categorical levels must be non-empty strings"))
        if domain.lower is not None or domain.upper is not None:
            out.append(Violation(f"{path}", "categorical domain cannot carry bounds"))
    else:
        if domain.levels:
            out.append(Violation(f"{path}.levels", f"{domain.kind} domain cannot carry levels"))
        for bound_name in ("lower", "upper"):
            bound = getattr(domain, bound_name)
            if bound is not None and not _is_number(bound):
                out.append(Violation(f"{path}.{bound_name}", "bound must be a finite number"))
        if (
            _is_number(domain.lower)
            and _is_number(domain.upper)
            and domain.lower > domain.upper
        ):
            out.append(Violation(f"{path}", "lower bound exceeds upper bound"))


def validate_design(design: ExperimentDesign) -> list[Violation]:
    """Return every violated invariant (empty list = valid design)."""
    out: list[Violation] = []
    names: dict[str, VariableSpec] = {}

    for i, spec in enumerate(design.variables):
        path = f"variables[{i}]({spec.name or '?'})"
        if not spec.name or not isinstance(spec.name, str):
            out.append(Violation(f"{path}.name", "variable name must be a non-empty string"))
        elif spec.name in names:
            out.append(Violation(f"{path}.name", f"duplicate variable name {spec.name!r}"))
        else:
            names[spec.name] = spec
        if spec.role not in ROLES:
            out.append(Violation(f"{path}.role", f"unknown role {spec.role!r}"))
        _check_domain(spec.domain, f"{path}.domain", out)

    independents = {v.name for v in design.variables if v.role == "independent"}
    controls = {v.name for v in design.variables if v.role == "control"}
    dependents = {v.name for v in design.variables if v.role == "dependent"}

    for name in design.factor_grid:
        if name not in independents:
            out.append(
                Violation(
                    f"factor_grid[{name}]",
                    "grid entry does not name an independent variable",
                )
            )
    for name in independents:
        levels = design.factor_grid.get(name)
        if not levels:
            out.append(
                Violation(f"factor_grid[{name}]", "independent variable has no grid levels")
            )
            continue
        spec = names.get(name)
        if spec is None:
            continue
        if len(set(levels)) != len(levels):
            out.append(Violation(f"factor_grid[{name}]", "grid levels are not distinct"))
        for j, level in enumerate(levels):
            if not spec.domain.contains(level):
                out.append(
                    Violation(
                        f"factor_grid[{name}][{j}]",
                        f"level {level!r} outside the domain of {name!r}",
                    )
                )

    for name in design.control_bindings:
        if name not in controls:
            out.append(
                Violation(
                    f"control_bindings[{name}]",
                    "binding does not name a control variable",
                )
            )
    for name in controls:
        if name not in design.control_bindings:
            out.append(Violation(f"control_bindings[{name}]", "control variable has no binding"))
        else:
            spec = names[name]
            value = design.control_bindings[name]
            if not spec.domain.contains(value):
                out.append(
                    Violation(
                        f"control_bindings[{name}]",
                        f"value {value!r} outside the domain of {name!r}",
                    )
                )

    if design.replications < 1:
        out.append(Violation("replications", "replication count must be >= 1"))
    if design.seed_count < 1:
        out.append(Violation("seed_count", "seed count must be >= 1"))
    if design.cv_folds < 0:
        out.append(Violation("cv_folds", "fold count must be >= 0"))
    if design.master_seed < 0 or design.master_seed >= (1 << 64):
        out.append(Violation("master_seed", "master seed must be an unsigned 64-bit integer"))
    if design.grid_sample is not None:
        points = design.grid_point_count()
        if design.grid_sample < 1 or design.grid_sample > points:
            out.append(
                Violation(
                    "grid_sample",
                    f"grid sample must be in [1, {points}], got {design.grid_sample}",
                )
            )

    seen_ids: set[str] = set()
    for i, h in enumerate(design.hypotheses):
        path = f"hypotheses[{i}]({h.id or '?'})"
        if not h.id:
            out.append(Violation(f"{path}.id", "hypothesis id must be non-empty"))
        elif h.id in seen_ids:
            out.append(Violation(f"{path}.id", f"duplicate hypothesis id {h.id!r}"))
        else:
            seen_ids.add(h.id)
        if h.metric not in dependents:
            out.append(
                Violation(f"{path}.metric", f"metric {h.metric!r} is not a dependent variable")
            )
        else:
            metric_kind = names[h.metric].domain.kind
            if metric_kind == "categorical":
                out.append(
                    Violation(
                        f"{path}.metric",
                        "hypotheses require a numeric (real or integer) metric",
                    )
                )
        if h.pairing not in PAIRINGS:
            out.append(Violation(f"{path}.pairing", f"unknown pairing {h.pairing!r}"))
        if h.direction not in DIRECTIONS:
            out.append(Violation(f"{path}.direction", f"unknown direction {h.direction!r}"))
        if not (isinstance(h.alpha, float) and 0.0 < h.alpha < 1.0):
            out.append(Violation(f"{path}.alpha", "alpha out of (0,1)"))
        for label, selector in (("group_a", h.group_a), ("group_b", h.group_b)):
            if not selector:
                out.append(Violation(f"{path}.{label}", "group selector is empty"))
            for name, value in selector.items():
                spec = names.get(name)
                if spec is None or spec.role == "dependent":
                    out.append(
                        Violation(
                            f"{path}.{label}[{name}]",
                            "selector must reference an independent or control variable",
                        )
                    )
                elif not spec.domain.contains(value):
                    out.append(
                        Violation(
                            f"{path}.{label}[{name}]",
                            f"value {value!r} outside the domain of {name!r}",
                        )
                    )
        if h.group_a and h.group_b and not h.contrast_factors():
            out.append(
                Violation(
                    f"{path}",
                    "group selectors do not disagree on any variable; groups overlap",
                )
            )

    return out


def _grid_points(design: ExperimentDesign) -> tuple[tuple[str, ...], list[tuple[Value, ...]]]:
    specs = design.by_role("independent")
    names = tuple(s.name for s in specs)
    if not names:
        return names, [()]
    axes = [design.factor_grid[n] for n in names]
    return names, list(itertools.product(*axes))


def _selected_point_ids(design: ExperimentDesign, total_points: int) -> list[int]:
    if design.grid_sample is None or design.grid_sample >= total_points:
        return list(range(total_points))
    rng = SplitMix64(derive_seed(design.master_seed, (GRID_SAMPLE_TAG,)))
    perm = _fisher_yates(total_points, rng)
    return sorted(perm[: design.grid_sample])


def enumerate_trials(
    design: ExperimentDesign, cap: int = DEFAULT_TRIAL_CAP
) -> list[Trial]:
    """Expand a valid design into its trial list, canonically ordered.

    Order is lexicographic over (grid point, seed index, fold index,
    replication), grid point outermost.  Deterministic: the same design
    always yields element-wise identical lists.
    """
    violations = validate_design(design)
    if violations:
        raise InvalidArgumentError(
            "design is invalid: " + "; ".join(str(v) for v in violations[:5])
        )
    total = design.trial_count()
    if total > cap:
        raise TrialCapExceededError(
            f"design expands to {total} trials, above the cap of {cap}"
        )

    x_names, points = _grid_points(design)
    selected = _selected_point_ids(design, len(points))
    fold_count = max(design.cv_folds, 1)
    control = dict(design.control_bindings)

    trials: list[Trial] = []
    index = 0
    for point_id in selected:
        bindings_x = dict(zip(x_names, points[point_id]))
        for seed_index in range(design.seed_count):
            for fold_index in range(fold_count):
                for replication in range(design.replications):
                    coords = (point_id, seed_index, fold_index, replication)
                    trials.append(
                        Trial(
                            index=index,
                            grid_point=point_id,
                            seed_index=seed_index,
                            fold_index=fold_index,
                            replication=replication,
                            bindings_x=bindings_x,
                            bindings_c=control,
                            derived_seed=derive_seed(design.master_seed, coords),
                        )
                    )
                    index += 1
    return trials
