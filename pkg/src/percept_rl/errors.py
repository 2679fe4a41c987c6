"""Exception types shared across the package."""

from __future__ import annotations


class TagError(ValueError):
    """Think/answer tag structure is malformed.

    ``reason`` is one of: no_think, no_answer, wrong_order, duplicate_tags,
    interleaved.
    """

    def __init__(self, reason: str, message: str | None = None):
        self.reason = reason
        super().__init__(message or reason)


class SchemaError(ValueError):
    """Answer text violates the instance-list schema.

    ``reason`` is one of: not_json, not_array, extra_key, missing_key,
    wrong_arity, non_numeric.
    """

    def __init__(self, reason: str, message: str | None = None):
        self.reason = reason
        super().__init__(message or reason)


class InputError(ValueError):
    """Caller supplied values outside an operation's domain."""


class EmptyMaskError(ValueError):
    """Mask has no foreground pixel, so no box or point can be derived."""


class UndefinedMetricError(ValueError):
    """Metric is undefined for the given inputs (e.g. AP with zero ground truths)."""


class DataFileError(ValueError):
    """A JSONL input file failed schema validation.

    Collects every offending line so the whole file can be reported in one
    pass. ``problems`` is a list of (line_number, message) pairs; line
    numbers are 1-based.
    """

    def __init__(self, path: str, problems: list[tuple[int, str]]):
        self.path = path
        self.problems = problems
        lines = "; ".join(f"line {n}: {msg}" for n, msg in problems)
        super().__init__(f"{path}: {lines}")
