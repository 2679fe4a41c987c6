"""Independent reference implementations used to cross-check the fast paths.

Everything here is deliberately naive: scalar arithmetic, exhaustive
enumeration, and from-scratch recomputation. None of it shares code with the
vectorized/incremental implementations it validates (beyond the scalar
geometry primitives, which are themselves hand-checkable).
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from percept_rl.matching import Thresholds, box_l1, iou, point_l1
from percept_rl.rollout import Instance


def pair_cost(pred: Instance, gt: Instance, thr: Thresholds) -> int:
    passes = (
        (iou(pred.bbox, gt.bbox) > thr.iou_min)
        + (box_l1(pred.bbox, gt.bbox) < thr.box_l1_max)
        + (point_l1(pred.point, gt.point) < thr.point_l1_max)
    )
    return 3 - passes


def brute_force_accuracy(
    preds: Sequence[Instance], gts: Sequence[Instance], thr: Thresholds
) -> float:
    """Maximize 3*|pairs| - cost over every injective assignment of size min(K, N)."""
    k, n = len(preds), len(gts)
    if k == 0 or n == 0:
        return 0.0
    m = min(k, n)
    cost = [[pair_cost(p, g, thr) for g in gts] for p in preds]

    best_total = None
    if k <= n:
        for cols in itertools.permutations(range(n), m):
            total = 3 * m - sum(cost[i][j] for i, j in enumerate(cols))
            if best_total is None or total > best_total:
                best_total = total
    else:
        for rows in itertools.permutations(range(k), m):
            total = 3 * m - sum(cost[i][j] for j, i in enumerate(rows))
            if best_total is None or total > best_total:
                best_total = total
    return best_total / max(k, n)


def _greedy_tp_count(
    preds: Sequence[tuple[str, tuple, float]],
    gts: Mapping[str, Sequence[tuple]],
    iou_thr: float,
) -> int:
    """Greedy matching of (sample_id, bbox, score) preds, from scratch."""
    consumed: dict[str, set[int]] = {sid: set() for sid in gts}
    tp = 0
    for sample_id, bbox, _score in preds:
        best_iou, best_j = 0.0, -1
        for j, gt_box in enumerate(gts.get(sample_id, ())):
            if j in consumed.get(sample_id, set()):
                continue
            value = iou(bbox, gt_box)
            if value > best_iou:
                best_iou, best_j = value, j
        if best_j >= 0 and best_iou >= iou_thr:
            consumed[sample_id].add(best_j)
            tp += 1
    return tp


def threshold_sweep_ap(
    preds: Sequence[tuple[str, tuple, float]],
    gts: Mapping[str, Sequence[tuple]],
    iou_thr: float,
) -> float:
    """AP from first principles: one PR point per score cut, re-matched each time.

    For every distinct score threshold t, the detector consisting of all
    predictions with score >= t is evaluated from scratch; the 101-point
    interpolation is then applied to those PR points.
    """
    total_gt = sum(len(v) for v in gts.values())
    assert total_gt > 0, "oracle requires ground truths"
    ordered = sorted(preds, key=lambda p: -p[2])
    points = []
    for cut in sorted({p[2] for p in ordered}, reverse=True):
        subset = [p for p in ordered if p[2] >= cut]
        tp = _greedy_tp_count(subset, gts, iou_thr)
        points.append((tp / total_gt, tp / len(subset)))

    ap_values = []
    for r in np.linspace(0.0, 1.0, 101):
        candidates = [prec for rec, prec in points if rec >= r]
        ap_values.append(max(candidates) if candidates else 0.0)
    return float(np.mean(ap_values))


def random_instances(rng: np.random.Generator, count: int, frame: float = 1000.0) -> list[Instance]:
    """Canonical random instances inside a square frame."""
    out = []
    for _ in range(count):
        xs = np.sort(rng.uniform(0, frame, size=2))
        ys = np.sort(rng.uniform(0, frame, size=2))
        px, py = rng.uniform(0, frame, size=2)
        out.append(Instance((float(xs[0]), float(ys[0]), float(xs[1]), float(ys[1])), (float(px), float(py))))
    return out
