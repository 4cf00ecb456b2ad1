"""Exception hierarchy shared by all veritas modules.

Every error veritas raises deliberately derives from ``VeritasError`` so
callers (including the CLI) can distinguish harness errors from bugs.
"""


class VeritasError(Exception):
    """Base class for all errors raised by veritas."""


class InvalidArgumentError(VeritasError):
    """A caller-supplied argument violates a documented precondition."""


class UndefinedStatisticError(VeritasError):
    """The requested statistic is undefined for the given sample size."""


class UnsupportedSizeError(VeritasError):
    """Sample size lies outside the documented limits of a procedure."""


class DegenerateSampleError(VeritasError):
    """The data has no variation where the procedure requires some."""


class InsufficientDataError(VeritasError):
    """Too few usable observations to evaluate a hypothesis."""


class AlignmentError(VeritasError):
    """Paired analysis requested but the groups do not align.

    ``missing_keys`` lists the pair keys present in one group only.
    """

    def __init__(self, message: str, missing_keys: list | None = None):
        super().__init__(message)
        self.missing_keys = missing_keys or []


class TrialCapExceededError(VeritasError):
    """The design expands to more trials than the configured cap allows."""


class ManifestError(VeritasError):
    """An experiment manifest file cannot be parsed into a design."""


class ArchiveCorruptError(VeritasError):
    """A run archive violates its schema.  Carries the offending line."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class InternalInconsistencyError(VeritasError):
    """Cross-referenced harness artifacts disagree with each other."""
