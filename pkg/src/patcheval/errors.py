"""Exception hierarchy shared across the evaluation harness."""

from __future__ import annotations


class PatchEvalError(Exception):
    """Base class for all harness errors."""


# --- dataset / span errors -------------------------------------------------

class DatasetError(PatchEvalError):
    """A single dataset-validation violation, tagged with sample and field."""

    def __init__(self, message: str, sample_id: str = "?", field: str = "?"):
        super().__init__(f"[{sample_id}.{field}] {message}")
        self.sample_id = sample_id
        self.field = field


class MissingFile(DatasetError):
    pass


class SpanOutOfRange(DatasetError):
    pass


class BlockOutsideFunction(DatasetError):
    pass


class EmptyDescription(DatasetError):
    pass


class FocusOutsideBlock(DatasetError):
    pass


class DatasetValidationError(PatchEvalError):
    """Aggregates every violation found while loading a dataset."""

    def __init__(self, violations: list[DatasetError]):
        self.violations = violations
        super().__init__(
            "dataset validation failed:\n" + "\n".join(str(v) for v in violations)
        )


# --- prompt errors ---------------------------------------------------------

class MissingAuxInput(PatchEvalError):
    def __init__(self, field: str):
        super().__init__(f"sample lacks required auxiliary input: {field}")
        self.field = field


class MissingFewShotExample(PatchEvalError):
    pass


class EmptyPatch(PatchEvalError):
    pass


# --- gateway errors --------------------------------------------------------

class ProviderUnavailable(PatchEvalError):
    """Retryable transport failure."""


class RateLimited(ProviderUnavailable):
    """Retryable 429-style failure."""


class AuthFailure(PatchEvalError):
    """Fatal credential failure; never retried."""


class NoEligibleJudge(PatchEvalError):
    pass


class TranscriptMiss(PatchEvalError):
    """Replay mode was requested but no recorded response exists."""


# --- grafting errors -------------------------------------------------------

class MissingRepairTags(PatchEvalError):
    pass


class EmptyRepairBody(PatchEvalError):
    pass


class CopyFailure(PatchEvalError):
    pass


# --- build errors ----------------------------------------------------------

class SandboxSetupFailure(PatchEvalError):
    pass


class InconsistentInputs(PatchEvalError):
    pass


# --- scoring errors --------------------------------------------------------

class DimensionMismatch(PatchEvalError):
    pass


class ZeroVector(PatchEvalError):
    pass


class EmptyReference(PatchEvalError):
    pass


class EmptyInput(PatchEvalError):
    pass


class UnlabeledRecord(PatchEvalError):
    pass


# --- stats / orchestration errors ------------------------------------------

class UnmatchedRecords(PatchEvalError):
    pass


class GenerationIncomplete(PatchEvalError):
    def __init__(self, attempts: int, logs: list[str]):
        super().__init__(f"synthetic sample never compiled after {attempts} attempts")
        self.attempts = attempts
        self.logs = logs


class MalformedExport(PatchEvalError):
    pass
