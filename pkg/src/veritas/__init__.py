"""veritas: a harness for falsifiable, replicable empirical experiments.

Declare hypotheses over typed experiment variables, expand a
deterministic trial grid, drive an external experiment program, test
the hypotheses with the appropriate statistical procedure, and emit
traceable provenance plus an automated checklist audit.
"""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    ArchiveCorruptError,
    DegenerateSampleError,
    InsufficientDataError,
    InternalInconsistencyError,
    InvalidArgumentError,
    ManifestError,
    TrialCapExceededError,
    UndefinedStatisticError,
    UnsupportedSizeError,
    VeritasError,
)
from .model import (
    ExperimentDesign,
    Hypothesis,
    Trial,
    VariableDomain,
    VariableSpec,
    Violation,
    enumerate_trials,
    validate_design,
)
from .seeding import derive_seed, partition_folds, shuffle_indices

__all__ = [
    "__version__",
    "VeritasError",
    "InvalidArgumentError",
    "UndefinedStatisticError",
    "UnsupportedSizeError",
    "DegenerateSampleError",
    "InsufficientDataError",
    "AlignmentError",
    "TrialCapExceededError",
    "ManifestError",
    "ArchiveCorruptError",
    "InternalInconsistencyError",
    "VariableDomain",
    "VariableSpec",
    "Hypothesis",
    "ExperimentDesign",
    "Trial",
    "Violation",
    "validate_design",
    "enumerate_trials",
    "derive_seed",
    "shuffle_indices",
    "partition_folds",
]
