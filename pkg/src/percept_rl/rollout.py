"""Parsing of raw model rollouts into a reasoning block and structured instances.

Expected rollout grammar::

    <think> free-form reasoning </think>
    <answer>[{"bbox_2d": [x1, y1, x2, y2], "point_2d": [px, py]}, ...]</answer>

Tags are literal and case-sensitive, exactly one pair of each, think before
answer, with only whitespace between the two blocks. Text before ``<think>``
or after ``</answer>`` is ignored. The answer must be a strict JSON array of
objects carrying exactly the two keys above, with 4 / 2 finite numbers.

Parsing is total: any input string yields either a value or a typed error
(:class:`~percept_rl.errors.TagError` / :class:`~percept_rl.errors.SchemaError`),
never an unhandled exception. :func:`parse_rollout` folds both stages into a
:class:`ParsedRollout` with a :class:`ParseStatus`, which is what the reward
stack consumes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import SchemaError, TagError

THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"
ANSWER_OPEN = "<answer>"
ANSWER_CLOSE = "</answer>"

_BBOX_KEY = "bbox_2d"
_POINT_KEY = "point_2d"


class ParseStatus(enum.Enum):
    OK = "ok"
    MISSING_TAGS = "missing_tags"
    BAD_JSON = "bad_json"
    BAD_SCHEMA = "bad_schema"


@dataclass(frozen=True)
class Instance:
    """One object hypothesis or annotation: a box plus a representative point.

    Coordinates are continuous pixels. ``bbox`` is (x1, y1, x2, y2); use
    :func:`canonicalize` to enforce x1 <= x2, y1 <= y2 before any geometry.
    """

    bbox: tuple[float, float, float, float]
    point: tuple[float, float]

    @classmethod
    def of(cls, bbox: Sequence[float], point: Sequence[float]) -> "Instance":
        coords = tuple(float(v) for v in bbox), tuple(float(v) for v in point)
        if any(not math.isfinite(v) for pair in coords for v in pair):
            raise ValueError(f"instance coordinates must be finite: {bbox!r}, {point!r}")
        return cls(*coords)


@dataclass(frozen=True)
class ParsedRollout:
    """Outcome of parsing one rollout string.

    ``instances`` is populated only when ``parse_status`` is OK; ``think``
    and ``answer_raw`` are the extracted blocks when tags were found, empty
    strings otherwise.
    """

    think: str
    answer_raw: str
    instances: tuple[Instance, ...] | None
    parse_status: ParseStatus

    @property
    def ok(self) -> bool:
        return self.parse_status is ParseStatus.OK


def _find_single(text: str, token: str) -> int | None:
    """Position of ``token`` in ``text``; None if absent, -1 if repeated."""
    first = text.find(token)
    if first == -1:
        return None
    if text.find(token, first + len(token)) != -1:
        return -1
    return first


def extract_blocks(text: str) -> tuple[str, str]:
    """Extract the (think, answer) inner contents from a rollout string.

    Requires exactly one think block followed by exactly one answer block,
    separated by whitespace only. Inner contents are stripped of leading and
    trailing whitespace. Raises :class:`TagError` otherwise.
    """
    positions = {}
    counts_bad = False
    for token in (THINK_OPEN, THINK_CLOSE, ANSWER_OPEN, ANSWER_CLOSE):
        pos = _find_single(text, token)
        if pos == -1:
            counts_bad = True
        positions[token] = pos

    if positions[THINK_OPEN] is None or positions[THINK_CLOSE] is None:
        raise TagError("no_think")
    if positions[ANSWER_OPEN] is None or positions[ANSWER_CLOSE] is None:
        raise TagError("no_answer")
    if counts_bad:
        raise TagError("duplicate_tags")

    t_open, t_close = positions[THINK_OPEN], positions[THINK_CLOSE]
    a_open, a_close = positions[ANSWER_OPEN], positions[ANSWER_CLOSE]
    if t_close < t_open:
        raise TagError("no_think", "</think> precedes <think>")
    if a_close < a_open:
        raise TagError("no_answer", "</answer> precedes <answer>")
    if a_close < t_open:
        raise TagError("wrong_order", "answer block precedes think block")
    if not (t_open < t_close < a_open < a_close):
        raise TagError("interleaved", "tag blocks overlap")

    between = text[t_close + len(THINK_CLOSE):a_open]
    if between.strip():
        raise TagError("interleaved", "non-whitespace between </think> and <answer>")

    think = text[t_open + len(THINK_OPEN):t_close].strip()
    answer_raw = text[a_open + len(ANSWER_OPEN):a_close].strip()
    return think, answer_raw


def _require_numbers(values: object, arity: int, key: str) -> tuple[float, ...]:
    if not isinstance(values, list) or len(values) != arity:
        raise SchemaError("wrong_arity", f"{key} must be an array of {arity} numbers")
    out = []
    for v in values:
        # bool is an int subclass; JSON true/false are not numbers here.
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SchemaError("non_numeric", f"{key} element {v!r} is not a finite number")
        out.append(float(v))
    return tuple(out)


class _NotJson(Exception):
    pass


def _reject_constant(name: str) -> None:
    # Stock json.loads admits NaN/Infinity literals; strict JSON does not.
    raise _NotJson(name)


def parse_answer(answer_raw: str) -> list[Instance]:
    """Parse answer text into instances, enforcing the strict schema.

    Accepts a JSON array whose elements are objects with exactly the keys
    ``bbox_2d`` (4 numbers) and ``point_2d`` (2 numbers). The empty array is
    valid. Raises :class:`SchemaError` on any violation. Does not
    canonicalize: the literal coordinates are returned as emitted.
    """
    try:
        data = json.loads(answer_raw, parse_constant=_reject_constant)
    except (_NotJson, ValueError, RecursionError):
        raise SchemaError("not_json") from None

    if not isinstance(data, list):
        raise SchemaError("not_array", "answer must be a JSON array")

    instances = []
    for idx, item in enumerate(data):
        if not isinstance(item, dict):
            raise SchemaError("missing_key", f"element {idx} is not an object")
        extra = set(item) - {_BBOX_KEY, _POINT_KEY}
        if extra:
            raise SchemaError("extra_key", f"element {idx} has extra key(s) {sorted(extra)}")
        if _BBOX_KEY not in item or _POINT_KEY not in item:
            missing = {_BBOX_KEY, _POINT_KEY} - set(item)
            raise SchemaError("missing_key", f"element {idx} missing {sorted(missing)}")
        bbox = _require_numbers(item[_BBOX_KEY], 4, _BBOX_KEY)
        point = _require_numbers(item[_POINT_KEY], 2, _POINT_KEY)
        instances.append(Instance(bbox, point))
    return instances


def canonicalize(instance: Instance) -> Instance:
    """Swap inverted box corners so x1 <= x2 and y1 <= y2. Idempotent."""
    x1, y1, x2, y2 = instance.bbox
    if x1 <= x2 and y1 <= y2:
        return instance
    return Instance(
        (min(x1, x2), min(y1, y2), max(x1, x2), max(y1, y2)),
        instance.point,
    )


def parse_rollout(text: str) -> ParsedRollout:
    """Total parse of a rollout string into blocks + instances + status."""
    try:
        think, answer_raw = extract_blocks(text)
    except TagError:
        return ParsedRollout("", "", None, ParseStatus.MISSING_TAGS)
    try:
        instances = parse_answer(answer_raw)
    except SchemaError as err:
        status = ParseStatus.BAD_JSON if err.reason == "not_json" else ParseStatus.BAD_SCHEMA
        return ParsedRollout(think, answer_raw, None, status)
    return ParsedRollout(think, answer_raw, tuple(instances), ParseStatus.OK)


def format_number(x: float) -> str:
    """Canonical wire form of a number: <= 6 significant digits, no NaN/Inf.

    Idempotent under reparsing, which is what makes serialize -> parse ->
    serialize byte-stable.
    """
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x!r} cannot be serialized")
    if x == 0.0:
        x = 0.0  # never emit -0; JSON reparses it as the integer 0
    return f"{x:.6g}"


def instances_to_answer_json(instances: Sequence[Instance]) -> str:
    """Serialize instances to the canonical answer JSON array."""
    parts = []
    for inst in instances:
        bbox = ",".join(format_number(v) for v in inst.bbox)
        point = ",".join(format_number(v) for v in inst.point)
        parts.append(f'{{"{_BBOX_KEY}":[{bbox}],"{_POINT_KEY}":[{point}]}}')
    return "[" + ",".join(parts) + "]"
