"""JSONL wire formats: canonical serialization and validated readers.

All numbers on the wire carry at most 6 significant decimal digits, records
are one UTF-8 JSON object per line, and readers report every schema
violation with its 1-based line number. Readers canonicalize ground-truth
boxes on load so downstream geometry always sees x1 <= x2, y1 <= y2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .data_prep import TASK_TYPES, MaskGrid, Sample
from .errors import DataFileError, InputError
from .rollout import Instance, canonicalize, format_number


def canonical_json(value: object) -> str:
    """Serialize to compact JSON with 6-significant-digit floats, recursively."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(k, ensure_ascii=False)}:{canonical_json(v)}" for k, v in value.items())
        return "{" + ",".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_jsonl(records: Iterable[Mapping], stream) -> None:
    for record in records:
        stream.write(canonical_json(record) + "\n")


def _instance_from_obj(obj: object, where: str) -> Instance:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: instance must be an object")
    if set(obj) != {"bbox_2d", "point_2d"}:
        raise ValueError(f"{where}: instance keys must be exactly bbox_2d and point_2d")
    bbox, point = obj["bbox_2d"], obj["point_2d"]
    if not (isinstance(bbox, list) and len(bbox) == 4 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bbox)):
        raise ValueError(f"{where}: bbox_2d must be an array of 4 numbers")
    if not (isinstance(point, list) and len(point) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in point)):
        raise ValueError(f"{where}: point_2d must be an array of 2 numbers")
    return Instance.of(bbox, point)


def _require(record: dict, key: str, kind: type, where: str):
    if key not in record:
        raise ValueError(f"{where}: missing key {key!r}")
    value = record[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{where}: {key!r} must be a number")
        return float(value)
    if kind is int and isinstance(value, bool):
        raise ValueError(f"{where}: {key!r} must be an integer")
    if not isinstance(value, kind):
        raise ValueError(f"{where}: {key!r} must be {kind.__name__}")
    return value


def _iter_jsonl(path: str | Path):
    """Yield (line_number, record) pairs; collect malformed lines lazily."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield lineno, line


def read_samples(path: str | Path) -> list[Sample]:
    """Read and validate a samples JSONL file. Ordered by sample_id."""
    samples: list[Sample] = []
    seen: set[str] = set()
    problems: list[tuple[int, str]] = []
    for lineno, line in _iter_jsonl(path):
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record must be a JSON object")
            allowed = {"sample_id", "image_width", "image_height", "query", "task_type", "gt"}
            unknown = set(record) - allowed
            if unknown:
                raise ValueError(f"unknown key(s) {sorted(unknown)}")
            sample_id = _require(record, "sample_id", str, "sample")
            width = _require(record, "image_width", int, "sample")
            height = _require(record, "image_height", int, "sample")
            query = _require(record, "query", str, "sample")
            task_type = _require(record, "task_type", str, "sample")
            if task_type not in TASK_TYPES:
                raise ValueError(f"task_type must be one of {TASK_TYPES}")
            gt_raw = _require(record, "gt", list, "sample")
            instances = [
                canonicalize(_instance_from_obj(obj, f"gt[{i}]"))
                for i, obj in enumerate(gt_raw)
            ]
            if sample_id in seen:
                raise ValueError(f"duplicate sample_id {sample_id!r}")
            seen.add(sample_id)
            samples.append(
                Sample(
                    sample_id=sample_id,
                    image_width=width,
                    image_height=height,
                    query=query,
                    task_type=task_type,
                    gt_instances=instances,
                )
            )
        except (ValueError, InputError) as err:
            problems.append((lineno, str(err)))
    if problems:
        raise DataFileError(str(path), problems)
    samples.sort(key=lambda s: s.sample_id)
    return samples


def sample_to_record(sample: Sample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "image_width": sample.image_width,
        "image_height": sample.image_height,
        "query": sample.query,
        "task_type": sample.task_type,
        "gt": [
            {"bbox_2d": list(inst.bbox), "point_2d": list(inst.point)}
            for inst in sample.gt_instances
        ],
    }


def read_rollout_groups(path: str | Path) -> dict[str, list[str]]:
    """Read a rollouts JSONL file: one group of rollout strings per sample."""
    groups: dict[str, list[str]] = {}
    problems: list[tuple[int, str]] = []
    for lineno, line in _iter_jsonl(path):
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record must be a JSON object")
            unknown = set(record) - {"sample_id", "group"}
            if unknown:
                raise ValueError(f"unknown key(s) {sorted(unknown)}")
            sample_id = _require(record, "sample_id", str, "rollouts")
            group = _require(record, "group", list, "rollouts")
            if not group or not all(isinstance(t, str) for t in group):
                raise ValueError("group must be a non-empty array of strings")
            if sample_id in groups:
                raise ValueError(f"duplicate rollout group for sample {sample_id!r}")
            groups[sample_id] = group
        except ValueError as err:
            problems.append((lineno, str(err)))
    if problems:
        raise DataFileError(str(path), problems)
    return groups


@dataclass(frozen=True)
class PredictionRecord:
    """One prediction line: instance list and/or an explicit count."""

    sample_id: str
    instances: tuple[Instance, ...]
    count: int | None = None
    mask: MaskGrid | None = None


def read_predictions(path: str | Path, task_type: str) -> list[PredictionRecord]:
    """Read a predictions JSONL file for the given task family.

    Detection and counting records carry ``pred`` (instance list); counting
    may instead give a bare ``count``. Segmentation records carry ``mask``
    with width/height/bits.
    """
    records: list[PredictionRecord] = []
    seen: set[str] = set()
    problems: list[tuple[int, str]] = []
    for lineno, line in _iter_jsonl(path):
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record must be a JSON object")
            sample_id = _require(record, "sample_id", str, "pred")
            if sample_id in seen:
                raise ValueError(f"duplicate prediction for sample {sample_id!r}")
            seen.add(sample_id)
            if task_type == "segmentation":
                unknown = set(record) - {"sample_id", "mask"}
                if unknown:
                    raise ValueError(f"unknown key(s) {sorted(unknown)}")
                records.append(
                    PredictionRecord(sample_id, (), mask=_mask_from_obj(record.get("mask")))
                )
                continue
            allowed = {"sample_id", "pred"} | ({"count"} if task_type == "counting" else set())
            unknown = set(record) - allowed
            if unknown:
                raise ValueError(f"unknown key(s) {sorted(unknown)}")
            count = None
            if "count" in record:
                count = _require(record, "count", int, "pred")
                if count < 0:
                    raise ValueError("count must be non-negative")
            instances: tuple[Instance, ...] = ()
            if "pred" in record:
                pred_raw = _require(record, "pred", list, "pred")
                instances = tuple(
                    canonicalize(_instance_from_obj(obj, f"pred[{i}]"))
                    for i, obj in enumerate(pred_raw)
                )
            elif count is None:
                raise ValueError("record needs 'pred' (or 'count' for counting)")
            records.append(PredictionRecord(sample_id, instances, count=count))
        except (ValueError, InputError) as err:
            problems.append((lineno, str(err)))
    if problems:
        raise DataFileError(str(path), problems)
    records.sort(key=lambda r: r.sample_id)
    return records


def _mask_from_obj(obj: object) -> MaskGrid:
    if not isinstance(obj, dict):
        raise ValueError("mask must be an object")
    if set(obj) != {"width", "height", "bits"}:
        raise ValueError("mask keys must be exactly width, height, bits")
    width, height, bits = obj["width"], obj["height"], obj["bits"]
    if not isinstance(width, int) or not isinstance(height, int) or isinstance(width, bool) or isinstance(height, bool):
        raise ValueError("mask width/height must be integers")
    if not isinstance(bits, str):
        raise ValueError("mask bits must be a string of 0/1")
    return MaskGrid.from_bitstring(width, height, bits)


def read_masks(path: str | Path) -> dict[str, MaskGrid]:
    """Read a mask JSONL file ({"sample_id", "mask": {...}} records)."""
    masks: dict[str, MaskGrid] = {}
    problems: list[tuple[int, str]] = []
    for lineno, line in _iter_jsonl(path):
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record must be a JSON object")
            unknown = set(record) - {"sample_id", "mask"}
            if unknown:
                raise ValueError(f"unknown key(s) {sorted(unknown)}")
            sample_id = _require(record, "sample_id", str, "mask")
            if sample_id in masks:
                raise ValueError(f"duplicate mask for sample {sample_id!r}")
            masks[sample_id] = _mask_from_obj(record.get("mask"))
        except (ValueError, InputError) as err:
            problems.append((lineno, str(err)))
    if problems:
        raise DataFileError(str(path), problems)
    return masks


def mask_to_record(sample_id: str, mask: MaskGrid) -> dict:
    return {
        "sample_id": sample_id,
        "mask": {"width": mask.width, "height": mask.height, "bits": mask.to_bitstring()},
    }
