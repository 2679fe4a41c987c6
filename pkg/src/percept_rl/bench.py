"""Timing comparison: batch pairwise matching vs a naive per-pair scalar loop.

Both paths end in the same Hungarian solve; the difference under test is the
pairwise geometry computation (vectorized vs Python scalar loops), which is
where the batching speedup lives.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .matching import (
    DEFAULT_THRESHOLDS,
    MatchResult,
    Thresholds,
    accuracy_reward,
    box_l1,
    hungarian,
    iou,
    point_l1,
)
from .rollout import Instance


@dataclass(frozen=True)
class BenchReport:
    object_count: int
    repetitions: int
    batch_seconds: float
    naive_seconds: float

    @property
    def speedup(self) -> float:
        return self.naive_seconds / self.batch_seconds if self.batch_seconds > 0 else float("inf")


def naive_accuracy_reward(
    preds: Sequence[Instance],
    gts: Sequence[Instance],
    thr: Thresholds = DEFAULT_THRESHOLDS,
) -> MatchResult:
    """Reference path: scalar per-pair loops, then the same Hungarian solve."""
    k, n = len(preds), len(gts)
    if k == 0 or n == 0:
        return MatchResult(pairs=(), total_cost=0, accuracy_reward=0.0)

    cost = [[0] * n for _ in range(k)]
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            passes = (
                (iou(p.bbox, g.bbox) > thr.iou_min)
                + (box_l1(p.bbox, g.bbox) < thr.box_l1_max)
                + (point_l1(p.point, g.point) < thr.point_l1_max)
            )
            cost[i][j] = 3 - passes

    pairs = hungarian(np.asarray(cost))
    total_cost = sum(cost[i][j] for i, j in pairs)
    reward = (3 * len(pairs) - total_cost) / max(k, n)
    return MatchResult(pairs=tuple(pairs), total_cost=total_cost, accuracy_reward=reward)


def _random_instances(count: int, rng: np.random.Generator, frame: float = 1000.0) -> list[Instance]:
    instances = []
    for _ in range(count):
        x1, y1 = rng.uniform(0, frame * 0.8, size=2)
        w, h = rng.uniform(1, frame * 0.2, size=2)
        px, py = rng.uniform(0, frame, size=2)
        instances.append(Instance((float(x1), float(y1), float(x1 + w), float(y1 + h)), (float(px), float(py))))
    return instances


def bench_matching(object_count: int, repetitions: int, seed: int = 0) -> BenchReport:
    """Time both matching paths at K = N = object_count over many repetitions."""
    if object_count < 1:
        raise InputError("object_count must be at least 1")
    if repetitions < 1:
        raise InputError("repetitions must be at least 1")

    rng = np.random.default_rng(seed)
    preds = _random_instances(object_count, rng)
    gts = _random_instances(object_count, rng)

    # One warm-up call each so imports and allocator effects stay out of the timing.
    accuracy_reward(preds, gts)
    naive_accuracy_reward(preds, gts)

    start = time.perf_counter()
    for _ in range(repetitions):
        accuracy_reward(preds, gts)
    batch_seconds = (time.perf_counter() - start) / repetitions

    start = time.perf_counter()
    for _ in range(repetitions):
        naive_accuracy_reward(preds, gts)
    naive_seconds = (time.perf_counter() - start) / repetitions

    return BenchReport(
        object_count=object_count,
        repetitions=repetitions,
        batch_seconds=batch_seconds,
        naive_seconds=naive_seconds,
    )
