"""Detection, segmentation, and counting evaluation metrics.

Detection AP follows the standard protocol: detections ranked by descending
score, greedy one-to-one matching against unconsumed ground truths per sample
(TP iff best remaining IoU >= threshold), and a 101-point interpolated
precision-recall area. The averaged variant uses the 0.50:0.05:0.95 threshold
grid. Because the models being scored emit no confidence, the box-area /
image-area ratio stands in as the ranking score; it is a crude proxy and
tends to underestimate AP.

Segmentation quality is the mean of per-pair pixel IoU between aligned mask
lists; counting is exact-match accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data_prep import MaskGrid
from .errors import InputError, UndefinedMetricError
from .matching import Box, iou

# MATLAB-style 0.50:0.05:0.95 grid. Accumulated floats are intentional: a
# pair with IoU exactly 60/100 passes 0.5 and 0.55 but not the drifted 0.60.
COCO_IOU_THRESHOLDS = np.arange(0.5, 1.0, 0.05)

_RECALL_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ScoredPrediction:
    """One ranked detection: sample, canonical box, and a score in [0, 1]."""

    sample_id: str
    bbox: tuple[float, float, float, float]
    score: float


@dataclass(frozen=True)
class PRCurve:
    """Per-detection precision/recall points (descending score) and their AP."""

    recalls: np.ndarray
    precisions: np.ndarray
    ap: float


def area_ratio_score(bbox: Box, image_width: float, image_height: float) -> float:
    """Confidence proxy: box area over image area, clamped to [0, 1]."""
    if image_width <= 0 or image_height <= 0:
        raise InputError("image dimensions must be positive")
    area = (bbox[2] - bbox[0]) * (bbox[3] - bbox[1])
    ratio = area / (image_width * image_height)
    return min(max(ratio, 0.0), 1.0)


def _match_tp_flags(
    preds: Sequence[ScoredPrediction],
    gts: Mapping[str, Sequence[Box]],
    iou_thr: float,
) -> tuple[list[bool], int]:
    """Greedy TP/FP flags in descending-score order, plus the total gt count."""
    total_gt = sum(len(boxes) for boxes in gts.values())
    order = sorted(range(len(preds)), key=lambda i: -preds[i].score)
    consumed: dict[str, set[int]] = {sid: set() for sid in gts}
    flags = []
    for idx in order:
        pred = preds[idx]
        best_iou, best_j = 0.0, -1
        for j, gt_box in enumerate(gts.get(pred.sample_id, ())):
            if j in consumed[pred.sample_id]:
                continue
            value = iou(pred.bbox, gt_box)
            if value > best_iou:
                best_iou, best_j = value, j
        if best_j >= 0 and best_iou >= iou_thr:
            consumed[pred.sample_id].add(best_j)
            flags.append(True)
        else:
            flags.append(False)
    return flags, total_gt


def _interpolated_ap(recalls: np.ndarray, precisions: np.ndarray) -> float:
    """101-point interpolation: mean of max-precision-at-recall>=r values."""
    if recalls.size == 0:
        return 0.0
    envelope = np.maximum.accumulate(precisions[::-1])[::-1]
    indices = np.searchsorted(recalls, _RECALL_GRID, side="left")
    values = np.where(indices < recalls.size, envelope[np.minimum(indices, recalls.size - 1)], 0.0)
    return float(values.mean())


def pr_curve(
    preds: Sequence[ScoredPrediction],
    gts: Mapping[str, Sequence[Box]],
    iou_thr: float,
) -> PRCurve:
    """Precision-recall curve and AP at one IoU threshold."""
    flags, total_gt = _match_tp_flags(preds, gts, iou_thr)
    if total_gt == 0:
        raise UndefinedMetricError("AP undefined with zero ground-truth boxes")
    tp = np.cumsum(np.asarray(flags, dtype=np.float64))
    fp = np.cumsum(~np.asarray(flags, dtype=bool))
    recalls = tp / total_gt
    precisions = tp / np.maximum(tp + fp, 1.0)
    return PRCurve(recalls=recalls, precisions=precisions, ap=_interpolated_ap(recalls, precisions))


def ap_at_iou(
    preds: Sequence[ScoredPrediction],
    gts: Mapping[str, Sequence[Box]],
    iou_thr: float,
) -> float:
    """101-point interpolated average precision at a single IoU threshold."""
    if not 0.0 < iou_thr < 1.0:
        raise InputError(f"iou threshold must be in (0, 1), got {iou_thr!r}")
    return pr_curve(preds, gts, iou_thr).ap


def coco_ap(
    preds: Sequence[ScoredPrediction],
    gts: Mapping[str, Sequence[Box]],
) -> float:
    """Mean AP over the 0.50:0.05:0.95 IoU threshold grid."""
    values = [pr_curve(preds, gts, float(thr)).ap for thr in COCO_IOU_THRESHOLDS]
    return float(np.mean(values))


def mask_iou(a: MaskGrid, b: MaskGrid) -> float:
    """Pixel IoU of two equal-size masks; both-empty pairs score 1.0."""
    if (a.width, a.height) != (b.width, b.height):
        raise InputError(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    inter = int(np.logical_and(a.bits, b.bits).sum())
    union = int(np.logical_or(a.bits, b.bits).sum())
    if union == 0:
        return 1.0
    return inter / union


def g_iou(pred_masks: Sequence[MaskGrid], gt_masks: Sequence[MaskGrid]) -> float:
    """Mean per-pair pixel IoU over aligned prediction/ground-truth masks."""
    if len(pred_masks) != len(gt_masks):
        raise InputError(
            f"mask list lengths differ: {len(pred_masks)} vs {len(gt_masks)}"
        )
    if len(pred_masks) == 0:
        raise InputError("gIoU undefined for empty mask lists")
    return float(np.mean([mask_iou(p, g) for p, g in zip(pred_masks, gt_masks)]))


def count_accuracy(pred_counts: Sequence[int], gt_counts: Sequence[int]) -> float:
    """Fraction of samples with an exactly correct count."""
    if len(pred_counts) != len(gt_counts):
        raise InputError(
            f"count list lengths differ: {len(pred_counts)} vs {len(gt_counts)}"
        )
    if len(pred_counts) == 0:
        raise InputError("count accuracy undefined for empty inputs")
    hits = sum(1 for p, g in zip(pred_counts, gt_counts) if p == g)
    return hits / len(pred_counts)
