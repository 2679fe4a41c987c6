"""In-process bindings exposing the reward kernel to RL training frameworks.

The API is value-level by design: plain strings, numbers, lists, and dicts
cross the boundary, never engine objects, so host frameworks stay insulated
from engine refactors. Results are numerically identical to the engine's
command-line ``score`` output for the same inputs.

Malformed rollout text is not an error: it scores zero on the affected
components, exactly as during training. The only input-driven exception is
``UnicodeDecodeError`` for byte strings that are not valid UTF-8.

Long ``batch_score`` calls do not starve other host threads: the heavy
kernels (vectorized geometry, the assignment solver) release the
interpreter's global lock inside their native code, and the surrounding glue
yields at the interpreter's normal switch interval. The bindings hold no
state, so results never depend on call history.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from percept_rl import (
    InputError,
    Instance,
    Thresholds,
    canonicalize,
    group_advantages as _engine_group_advantages,
    score_rollout as _engine_score_rollout,
)

API_VERSION = "1.0.0"

__all__ = ["api_version", "score_rollout", "group_advantages", "batch_score"]


def api_version() -> str:
    """Semantic version of the binding API and its wire-value schemas."""
    return API_VERSION


def _decode_text(rollout_text: str | bytes) -> str:
    if isinstance(rollout_text, bytes):
        return rollout_text.decode("utf-8")  # raises UnicodeDecodeError, by contract
    if not isinstance(rollout_text, str):
        raise InputError(f"rollout text must be str or bytes, got {type(rollout_text).__name__}")
    return rollout_text


def _instance_from_value(obj: Mapping, where: str) -> Instance:
    if not isinstance(obj, Mapping) or set(obj) != {"bbox_2d", "point_2d"}:
        raise InputError(f"{where}: expected an object with exactly bbox_2d and point_2d")
    bbox, point = obj["bbox_2d"], obj["point_2d"]
    if not isinstance(bbox, Sequence) or len(bbox) != 4:
        raise InputError(f"{where}: bbox_2d must be 4 numbers")
    if not isinstance(point, Sequence) or len(point) != 2:
        raise InputError(f"{where}: point_2d must be 2 numbers")
    try:
        return canonicalize(Instance.of(bbox, point))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _thresholds(iou_min: float, box_l1_max: float, point_l1_max: float) -> Thresholds:
    try:
        return Thresholds(iou_min=iou_min, box_l1_max=box_l1_max, point_l1_max=point_l1_max)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def score_rollout(
    rollout_text: str | bytes,
    gt: Sequence[Mapping],
    iou_min: float = 0.5,
    box_l1_max: float = 10.0,
    point_l1_max: float = 30.0,
) -> dict:
    """Score one rollout string against ground-truth instance dicts.

    ``gt`` is a list of ``{"bbox_2d": [x1, y1, x2, y2], "point_2d": [px, py]}``
    objects. Returns a dict with the reward components, their total, and the
    matched (prediction_index, ground_truth_index) pairs.
    """
    text = _decode_text(rollout_text)
    instances = [_instance_from_value(obj, f"gt[{i}]") for i, obj in enumerate(gt)]
    thr = _thresholds(iou_min, box_l1_max, point_l1_max)
    scored = _engine_score_rollout(text, instances, thr)
    return {
        "thinking": scored.scores.thinking,
        "answer_format": scored.scores.answer_format,
        "non_repeat": scored.scores.non_repeat,
        "accuracy": scored.scores.accuracy,
        "total": scored.scores.total,
        "pairs": [[int(i), int(j)] for i, j in scored.match.pairs],
    }


def group_advantages(rewards: Sequence[float]) -> list[float]:
    """Standardize a group of rewards (population std; all-equal maps to zeros)."""
    return _engine_group_advantages(list(rewards))


def batch_score(
    rollout_groups: Sequence[Sequence[str | bytes]],
    gts: Sequence[Sequence[Mapping]],
    iou_min: float = 0.5,
    box_l1_max: float = 10.0,
    point_l1_max: float = 30.0,
) -> list[dict]:
    """Score aligned groups of rollouts against per-group ground truths.

    Output entry i is ``{"results": [per-rollout dicts]}`` for group i, or
    ``{"error": message}`` when that group's inputs were invalid; groups are
    never silently dropped or reordered.
    """
    if len(rollout_groups) != len(gts):
        raise InputError(
            f"group/ground-truth lengths differ: {len(rollout_groups)} vs {len(gts)}"
        )
    out: list[dict] = []
    for index, (group, gt) in enumerate(zip(rollout_groups, gts)):
        try:
            results = [
                score_rollout(text, gt, iou_min, box_l1_max, point_l1_max)
                for text in group
            ]
            out.append({"results": results})
        except (InputError, UnicodeDecodeError) as exc:
            out.append({"error": f"group {index}: {exc}"})
    return out
