"""Pairwise box/point geometry, optimal assignment, and the accuracy reward.

Given K predicted and N ground-truth instances, the accuracy reward is
computed in four steps:

1. batch pairwise IoU, box L1, and point L1 matrices (K x N),
2. per-pair indicator passes against thresholds (strict comparisons:
   ``iou > iou_min``, ``l1 < l1_max``),
3. integer cost per pair, ``3 - passes``, and a minimum-cost assignment of
   size min(K, N) via the Hungarian method,
4. reward ``(3 * |pairs| - total_cost) / max(K, N)``.

The max(K, N) normalizer penalizes cardinality mismatch: spurious or missing
objects dilute the reward even when every matched pair is perfect.

L1 distances are the mean absolute coordinate difference (4 coordinates for
boxes, 2 for points), which keeps the 10 px / 30 px thresholds in
per-coordinate pixel units. Box areas are continuous, (x2-x1)*(y2-y1), with
no +1 pixel convention; degenerate zero-area boxes have IoU 0 against
everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError
from .rollout import Instance

Box = Sequence[float]
Point = Sequence[float]


@dataclass(frozen=True)
class Thresholds:
    """Indicator thresholds for the three matching criteria."""

    iou_min: float = 0.5
    box_l1_max: float = 10.0
    point_l1_max: float = 30.0

    def __post_init__(self):
        for name in ("iou_min", "box_l1_max", "point_l1_max"):
            value = getattr(self, name)
            if not (value > 0 and np.isfinite(value)):
                raise InputError(f"{name} must be positive and finite, got {value!r}")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class PairwiseMatrices:
    """All K x N pairwise geometry values between predictions and ground truths."""

    iou: np.ndarray
    box_l1: np.ndarray
    point_l1: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.iou.shape


@dataclass(frozen=True)
class MatchResult:
    """Optimal assignment plus the derived accuracy reward.

    ``pairs`` holds (pred_index, gt_index) tuples, min(K, N) of them;
    ``total_cost`` is the minimum assignment cost; ``criterion_passes``
    counts, over the matched pairs, how many passed (iou, box_l1, point_l1)
    individually. Ties in the assignment may be broken arbitrarily, so only
    ``total_cost`` and ``accuracy_reward`` are tie-invariant.
    """

    pairs: tuple[tuple[int, int], ...]
    total_cost: int
    accuracy_reward: float
    criterion_passes: tuple[int, int, int] = (0, 0, 0)


def iou(a: Box, b: Box) -> float:
    """Intersection-over-union of two canonical boxes; 0 when the union is empty."""
    ix = min(a[2], b[2]) - max(a[0], b[0])
    iy = min(a[3], b[3]) - max(a[1], b[1])
    inter = max(ix, 0.0) * max(iy, 0.0)
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def box_l1(a: Box, b: Box) -> float:
    """Mean absolute difference of the four box coordinates, in pixels."""
    return (abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2]) + abs(a[3] - b[3])) / 4.0


def point_l1(p: Point, q: Point) -> float:
    """Mean absolute difference of the two point coordinates, in pixels."""
    return (abs(p[0] - q[0]) + abs(p[1] - q[1])) / 2.0


def instances_to_arrays(instances: Sequence[Instance]) -> tuple[np.ndarray, np.ndarray]:
    """Stack instances into (K, 4) box and (K, 2) point float arrays."""
    k = len(instances)
    boxes = np.empty((k, 4), dtype=np.float64)
    points = np.empty((k, 2), dtype=np.float64)
    for i, inst in enumerate(instances):
        boxes[i] = inst.bbox
        points[i] = inst.point
    return boxes, points


def batch_iou(pred_boxes: np.ndarray, gt_boxes: np.ndarray) -> np.ndarray:
    """Pairwise IoU matrix (K x N) via broadcasting."""
    lt = np.maximum(pred_boxes[:, None, :2], gt_boxes[None, :, :2])
    rb = np.minimum(pred_boxes[:, None, 2:], gt_boxes[None, :, 2:])
    wh = np.clip(rb - lt, 0.0, None)
    inter = wh[..., 0] * wh[..., 1]
    area_p = (pred_boxes[:, 2] - pred_boxes[:, 0]) * (pred_boxes[:, 3] - pred_boxes[:, 1])
    area_g = (gt_boxes[:, 2] - gt_boxes[:, 0]) * (gt_boxes[:, 3] - gt_boxes[:, 1])
    union = area_p[:, None] + area_g[None, :] - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0)
    return out


def batch_box_l1(pred_boxes: np.ndarray, gt_boxes: np.ndarray) -> np.ndarray:
    """Pairwise mean-absolute box coordinate distance matrix (K x N)."""
    return np.abs(pred_boxes[:, None, :] - gt_boxes[None, :, :]).sum(axis=-1) / 4.0


def batch_point_l1(pred_points: np.ndarray, gt_points: np.ndarray) -> np.ndarray:
    """Pairwise mean-absolute point coordinate distance matrix (K x N)."""
    return np.abs(pred_points[:, None, :] - gt_points[None, :, :]).sum(axis=-1) / 2.0


def batch_pairwise(preds: Sequence[Instance], gts: Sequence[Instance]) -> PairwiseMatrices:
    """All three K x N pairwise matrices for prediction/ground-truth instances."""
    pred_boxes, pred_points = instances_to_arrays(preds)
    gt_boxes, gt_points = instances_to_arrays(gts)
    return PairwiseMatrices(
        iou=batch_iou(pred_boxes, gt_boxes),
        box_l1=batch_box_l1(pred_boxes, gt_boxes),
        point_l1=batch_point_l1(pred_points, gt_points),
    )


def indicator_passes(matrices: PairwiseMatrices, thr: Thresholds) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boolean pass matrices for the three criteria (strict comparisons)."""
    return (
        matrices.iou > thr.iou_min,
        matrices.box_l1 < thr.box_l1_max,
        matrices.point_l1 < thr.point_l1_max,
    )


def build_cost(matrices: PairwiseMatrices, thr: Thresholds = DEFAULT_THRESHOLDS) -> np.ndarray:
    """Integer cost matrix: 3 minus the number of passing criteria per pair."""
    r_iou, r_bl1, r_pl1 = indicator_passes(matrices, thr)
    passes = r_iou.astype(np.int64) + r_bl1.astype(np.int64) + r_pl1.astype(np.int64)
    return 3 - passes


def hungarian(cost: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-cost injective assignment of size min(K, N).

    Rectangular matrices are supported directly; with several optimal
    assignments an arbitrary one is returned.
    """
    cost = np.asarray(cost)
    if cost.size == 0:
        return []
    rows, cols = linear_sum_assignment(cost)
    return list(zip(rows.tolist(), cols.tolist()))


def accuracy_reward(
    preds: Sequence[Instance],
    gts: Sequence[Instance],
    thr: Thresholds = DEFAULT_THRESHOLDS,
) -> MatchResult:
    """Optimal-matching accuracy reward over canonical instances.

    Composes the batch pairwise matrices, the indicator cost, and the
    Hungarian assignment. Returns reward 0 with no pairs when either side
    is empty.
    """
    k, n = len(preds), len(gts)
    if k == 0 or n == 0:
        return MatchResult(pairs=(), total_cost=0, accuracy_reward=0.0)

    matrices = batch_pairwise(preds, gts)
    cost = build_cost(matrices, thr)
    pairs = hungarian(cost)

    rows = np.fromiter((i for i, _ in pairs), dtype=np.int64, count=len(pairs))
    cols = np.fromiter((j for _, j in pairs), dtype=np.int64, count=len(pairs))
    total_cost = int(cost[rows, cols].sum())

    r_iou, r_bl1, r_pl1 = indicator_passes(matrices, thr)
    passes = (
        int(r_iou[rows, cols].sum()),
        int(r_bl1[rows, cols].sum()),
        int(r_pl1[rows, cols].sum()),
    )

    reward = (3 * len(pairs) - total_cost) / max(k, n)
    return MatchResult(
        pairs=tuple(pairs),
        total_cost=total_cost,
        accuracy_reward=reward,
        criterion_passes=passes,
    )
