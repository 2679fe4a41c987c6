"""Deriving boxes and points from binary masks, and merging multi-object samples.

A box is the closed span of extreme foreground pixel indices (leftmost,
topmost, rightmost, bottommost); a point is the foreground centroid rounded
to the nearest pixel with half-ties toward the smaller coordinate. Multiple
annotated objects on one image merge into a single sample whose query joins
the object texts with " and " and whose instances concatenate in input order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyMaskError, InputError
from .rollout import Instance

TASK_TYPES = ("detection", "segmentation", "counting")

_NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
    "twenty": 20,
}

_NUMERAL_RE = re.compile(r"\b(\d+|" + "|".join(_NUMBER_WORDS) + r")\b", re.IGNORECASE)


@dataclass(frozen=True)
class MaskGrid:
    """Row-major binary grid; foreground pixels are nonzero."""

    width: int
    height: int
    bits: np.ndarray  # shape (height, width), dtype bool

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InputError("mask dimensions must be at least 1x1")
        if self.bits.shape != (self.height, self.width):
            raise InputError(
                f"mask bits shape {self.bits.shape} does not match "
                f"{self.height}x{self.width}"
            )

    @classmethod
    def from_array(cls, array: np.ndarray) -> "MaskGrid":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise InputError(f"mask array must be 2-D, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], bits=arr.astype(bool))

    @classmethod
    def from_bitstring(cls, width: int, height: int, bits: str) -> "MaskGrid":
        if len(bits) != width * height:
            raise InputError(f"bit string length {len(bits)} != {width}x{height}")
        if set(bits) - {"0", "1"}:
            raise InputError("bit string may contain only '0' and '1'")
        arr = (np.frombuffer(bits.encode("ascii"), dtype=np.uint8) == ord("1"))
        return cls(width=width, height=height, bits=arr.reshape(height, width))

    def to_bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits.ravel())

    def foreground_count(self) -> int:
        return int(self.bits.sum())


@dataclass
class Sample:
    """One unified task record: image dims, query, task type, and ground truth."""

    sample_id: str
    image_width: int
    image_height: int
    query: str
    task_type: str
    gt_instances: list[Instance] = field(default_factory=list)

    def __post_init__(self):
        if self.task_type not in TASK_TYPES:
            raise InputError(f"unknown task_type {self.task_type!r}")
        for inst in self.gt_instances:
            x1, y1, x2, y2 = inst.bbox
            px, py = inst.point
            for x in (x1, x2, px):
                if not 0 <= x <= self.image_width:
                    raise InputError(
                        f"sample {self.sample_id!r}: x coordinate {x} outside "
                        f"[0, {self.image_width}]"
                    )
            for y in (y1, y2, py):
                if not 0 <= y <= self.image_height:
                    raise InputError(
                        f"sample {self.sample_id!r}: y coordinate {y} outside "
                        f"[0, {self.image_height}]"
                    )

    @property
    def gt_count(self) -> int:
        return len(self.gt_instances)


@dataclass(frozen=True)
class AnnotatedObject:
    """One object annotation prior to merging: text + derived geometry."""

    text: str
    bbox: tuple[float, float, float, float]
    point: tuple[float, float]


@dataclass(frozen=True)
class MergedObjects:
    """Query and instance list produced by merging per-object annotations."""

    query: str
    instances: tuple[Instance, ...]


def mask_to_bbox(mask: MaskGrid) -> tuple[int, int, int, int]:
    """Extreme foreground pixel indices as a closed box [min_x, min_y, max_x, max_y]."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMaskError("mask has no foreground pixel")
    return int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max())


def _round_half_down(value: float) -> int:
    return int(math.ceil(value - 0.5))


def mask_to_point(mask: MaskGrid) -> tuple[int, int]:
    """Foreground centroid, rounded to the nearest pixel (ties go down)."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMaskError("mask has no foreground pixel")
    return _round_half_down(float(xs.mean())), _round_half_down(float(ys.mean()))


def merge_objects(objects: Sequence[AnnotatedObject]) -> MergedObjects:
    """Join object texts with " and " and concatenate instances, in input order."""
    if len(objects) == 0:
        raise InputError("merge_objects requires at least one object")
    query = " and ".join(obj.text for obj in objects)
    instances = tuple(Instance.of(obj.bbox, obj.point) for obj in objects)
    return MergedObjects(query=query, instances=instances)


def strip_count_leakage(query: str, count: int) -> str:
    """Remove standalone numerals equal to ``count`` from a query string.

    Both digit tokens ("7") and number words ("seven") are removed, other
    numerals are kept, and whitespace is re-collapsed. Idempotent.
    """
    def _replace(match: re.Match) -> str:
        token = match.group(0)
        value = int(token) if token.isdigit() else _NUMBER_WORDS[token.lower()]
        return "" if value == count else token

    return " ".join(_NUMERAL_RE.sub(_replace, query).split())


def sanitize_annotation(
    sample: Sample,
    class_names: Mapping[int, str] | None = None,
) -> Sample:
    """Normalize a sample's query for evaluation/training fairness.

    Counting samples get count-matching numerals removed from the query so
    the answer does not leak. Detection samples whose query is a bare numeric
    class id are rewritten to the textual class name when a mapping is
    supplied. Idempotent.
    """
    query = sample.query
    if sample.task_type == "counting":
        query = strip_count_leakage(query, sample.gt_count)
    elif sample.task_type == "detection" and class_names is not None:
        stripped = query.strip()
        if stripped.isdigit() and int(stripped) in class_names:
            query = class_names[int(stripped)]
    if query == sample.query:
        return sample
    return replace(sample, query=query)


def route_task(query: str) -> str:
    """Keyword-rule stand-in for a learned task router. Crude by design.

    Maps a free-form instruction to a task type: counting phrases win, then
    segmentation phrases, otherwise detection.
    """
    lowered = query.lower()
    if any(kw in lowered for kw in ("how many", "count", "number of")):
        return "counting"
    if any(kw in lowered for kw in ("segment", "mask", "outline", "region of")):
        return "segmentation"
    return "detection"
