"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred to calibration.
"""

import math
import random
import time

import numpy as np

from oracles import brute_force_accuracy, random_instances, threshold_sweep_ap
from percept_rl.bench import bench_matching
from percept_rl.grpo import RatioSample, group_advantages, kl_estimate
from percept_rl.matching import (
    DEFAULT_THRESHOLDS,
    PairwiseMatrices,
    accuracy_reward,
    build_cost,
    iou,
)
from percept_rl.metrics import ScoredPrediction, ap_at_iou, coco_ap
from percept_rl.rollout import Instance, instances_to_answer_json, parse_answer
from percept_rl.scoring import score_rollout
from percept_rl.simulate import SimConfig, noise_ladder


def _report(name: str) -> None:
    print(f"PASS  {name}")


def test_matching_oracle_exact_agreement():
    """accuracy_reward equals exhaustive assignment enumeration, K,N <= 6."""
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    for case in range(500):
        k = int(rng.integers(0, 7))
        n = int(rng.integers(0, 7))
        preds = random_instances(rng, k, frame=1000.0)
        gts = random_instances(rng, n, frame=1000.0)
        fast = accuracy_reward(preds, gts, DEFAULT_THRESHOLDS).accuracy_reward
        slow = brute_force_accuracy(preds, gts, DEFAULT_THRESHOLDS)
        assert abs(fast - slow) <= 1e-12, f"case {case}: {fast} != {slow} (K={k}, N={n})"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"matching oracle suite took {elapsed:.1f}s"
    _report(f"matching oracle: 500 random cases exact to 1e-12 in {elapsed:.2f}s")


def test_batch_matching_speedup():
    """Batch pairwise path is at least 2x faster than the scalar loop at 30 objects."""
    report = bench_matching(object_count=30, repetitions=1000)
    assert report.speedup >= 2.0, (
        f"batch path only {report.speedup:.2f}x faster "
        f"({report.batch_seconds:.2e}s vs {report.naive_seconds:.2e}s per call)"
    )
    _report(
        "batch speedup at 30 objects: "
        f"{report.speedup:.1f}x ({report.batch_seconds:.2e}s vs {report.naive_seconds:.2e}s)"
    )


def test_advantage_normalization():
    """Random groups standardize to mean 0 / std 1; equal groups map to zeros."""
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 1000:
        g = int(rng.integers(2, 17))
        rewards = rng.uniform(0.0, 6.0, size=g).tolist()
        if len(set(rewards)) == 1:
            continue
        advantages = group_advantages(rewards)
        assert abs(float(np.mean(advantages))) < 1e-9
        assert abs(float(np.std(advantages)) - 1.0) < 1e-9
        checked += 1
    for g in range(1, 17):
        assert group_advantages([3.25] * g) == [0.0] * g
    _report("advantage normalization: 1000 groups within 1e-9; equal groups exactly zero")


def _fuzz_strings(count: int, seed: int) -> list[str]:
    rnd = random.Random(seed)
    fragments = [
        "<think>", "</think>", "<answer>", "</answer>",
        "[]", "[", "]", "{", "}", '"bbox_2d"', '"point_2d"', ":",
        '[{"bbox_2d":[1,2,3,4],"point_2d":[2,3]}]',
        '[{"bbox_2d":[1,2,3,4],"point_2d":[2,3],"x":1}]',
        '[{"bbox_2d":[1e999,2,3,4],"point_2d":[2,3]}]',
        "Find the red car. ", "find the red car. ", "Yes. ",
        "NaN", "Infinity", "-", "0", "1.5e3", ",",
        "\x00", "￿", "日本語テキスト", "🚗", "\n", "\t", " ",
        "<think><think>", "</answer><answer>",
    ]
    out = [
        "",
        "[" * 2000,
        "<think>" + "a. " * 500 + "</think><answer>" + "[" * 500 + "</answer>",
    ]
    while len(out) < count:
        n = rnd.randint(0, 12)
        out.append("".join(rnd.choice(fragments) for _ in range(n)))
    return out


def test_reward_bounds_fuzz():
    """10,000 fuzzed rollouts score within declared ranges without crashing."""
    rng = np.random.default_rng(99)
    texts = _fuzz_strings(10_000, seed=1234)
    for i, text in enumerate(texts):
        gts = random_instances(rng, int(rng.integers(0, 5)))
        scored = score_rollout(text, gts)
        s = scored.scores
        assert s.thinking in (0.0, 1.0)
        assert s.answer_format in (0.0, 1.0)
        assert s.non_repeat in (0.0, 1.0)
        assert 0.0 <= s.accuracy <= 3.0, f"fuzz case {i}: accuracy {s.accuracy}"
        assert 0.0 <= s.total <= 6.0, f"fuzz case {i}: total {s.total}"
    _report(f"reward bounds fuzz: {len(texts)} rollouts in range, zero crashes")


def test_threshold_boundary_is_strict():
    """IoU exactly 0.5 fails the indicator; 0.5 + 1e-9 passes."""
    # geometric construction: intersection 50, union 100
    gt = Instance((0.0, 0.0, 10.0, 10.0), (0.0, 0.0))
    pred_at = Instance((0.0, 0.0, 10.0, 5.0), (0.0, 0.0))
    assert iou(pred_at.bbox, gt.bbox) == 0.5
    result = accuracy_reward([pred_at], [gt], DEFAULT_THRESHOLDS)
    assert result.criterion_passes[0] == 0, "IoU == threshold must not pass"

    # direct matrix construction at 0.5 and 0.5 + 1e-9
    def cost_for(iou_value: float) -> int:
        matrices = PairwiseMatrices(
            iou=np.array([[iou_value]]),
            box_l1=np.array([[0.0]]),
            point_l1=np.array([[0.0]]),
        )
        return int(build_cost(matrices, DEFAULT_THRESHOLDS)[0, 0])

    assert cost_for(0.5) == 1
    assert cost_for(0.5 + 1e-9) == 0
    _report("threshold boundary: IoU 0.5 fails, 0.5 + 1e-9 passes")


def test_parser_round_trip_bytes():
    """1000 random valid answers survive serialize -> parse -> serialize unchanged."""
    rng = np.random.default_rng(31337)
    for _ in range(1000):
        k = int(rng.integers(0, 6))
        instances = []
        for _ in range(k):
            coords = rng.uniform(-1e4, 1e4, size=6) * (10.0 ** rng.integers(-3, 3))
            instances.append(Instance(tuple(coords[:4]), tuple(coords[4:])))
        first = instances_to_answer_json(instances)
        second = instances_to_answer_json(parse_answer(first))
        assert second == first, f"round-trip changed bytes:\n{first}\n{second}"
    _report("parser round-trip: 1000 answers byte-identical after reparse")


def test_simulator_monotonic_under_noise():
    """Mean accuracy is 3.0 noiseless and strictly drops along the sigma ladder."""
    sample_boxes = [
        ((100.0, 100.0, 124.0, 120.0), (112.0, 110.0)),
        ((400.0, 420.0, 430.0, 456.0), (415.0, 438.0)),
    ]
    from percept_rl.data_prep import Sample

    sample = Sample(
        sample_id="ladder",
        image_width=1000,
        image_height=1000,
        query="two markers",
        task_type="detection",
        gt_instances=[Instance.of(b, p) for b, p in sample_boxes],
    )
    cfg = SimConfig(group_size=8, groups=200, drop_prob=0.0, seed=42)
    results = noise_ladder(sample, [0.0, 5.0, 20.0, 60.0], cfg)
    means = [r.mean_accuracy for r in results]
    assert means[0] == 3.0, f"noiseless mean accuracy {means[0]} != 3.0"
    for a, b, sa, sb in zip(means, means[1:], (0, 5, 20), (5, 20, 60)):
        assert a > b, f"mean accuracy not strictly decreasing: sigma {sa} -> {sb}: {a} vs {b}"

    degenerate = 0
    for result in results:
        for group in result.groups:
            if len(set(group.totals)) == 1:
                degenerate += 1
                continue
            assert int(np.argmax(group.advantages)) == int(np.argmax(group.totals))
    _report(
        "simulator monotonicity: means "
        + " > ".join(f"{m:.3f}" for m in means)
        + f"; advantage argmax matches reward argmax ({degenerate} degenerate groups skipped)"
    )


def test_ap_matches_threshold_sweep_oracle():
    """ap_at_iou equals the exhaustive score-cut reference on small instances."""
    rng = np.random.default_rng(555)
    cases = 0
    while cases < 200:
        n_gt = int(rng.integers(0, 6))
        n_pred = int(rng.integers(0, 6))
        if n_gt == 0:
            continue
        gts = {"img": [tuple(b.bbox) for b in random_instances(rng, n_gt, frame=500.0)]}
        preds = []
        for _ in range(n_pred):
            if gts["img"] and rng.random() < 0.6:
                base = gts["img"][int(rng.integers(0, n_gt))]
                jit = rng.normal(0, 20, size=4)
                bbox = (base[0] + jit[0], base[1] + jit[1], base[2] + jit[2], base[3] + jit[3])
                bbox = (min(bbox[0], bbox[2]), min(bbox[1], bbox[3]), max(bbox[0], bbox[2]), max(bbox[1], bbox[3]))
            else:
                bbox = tuple(random_instances(rng, 1, frame=500.0)[0].bbox)
            preds.append(ScoredPrediction("img", bbox, float(rng.random())))
        tuples = [(p.sample_id, p.bbox, p.score) for p in preds]
        for thr in (0.25, 0.5, 0.75):
            fast = ap_at_iou(preds, gts, thr)
            slow = threshold_sweep_ap(tuples, gts, thr)
            assert abs(fast - slow) <= 1e-9, f"case {cases}: AP {fast} vs oracle {slow} @ {thr}"
        assert coco_ap(preds, gts) <= ap_at_iou(preds, gts, 0.5) + 1e-12
        cases += 1
    _report("AP oracle: 200 cases match threshold sweep to 1e-9; averaged AP <= AP@0.5")


def test_kl_estimator_non_negative_definite():
    """kl >= 0 always, and == 0 (to 1e-12) exactly when the log-probs agree."""
    rng = np.random.default_rng(8080)
    for i in range(10_000):
        if i % 5 == 0:
            logp_theta = logp_ref = float(rng.uniform(-8.0, 0.0))
        else:
            logp_theta = float(rng.uniform(-8.0, 0.0))
            logp_ref = float(rng.uniform(-8.0, 0.0))
        value = kl_estimate(RatioSample(1.0, logp_theta=logp_theta, logp_ref=logp_ref))
        assert value >= 0.0
        if logp_theta == logp_ref:
            assert value <= 1e-12
        else:
            assert value > 1e-12, (
                f"kl {value} suspiciously small for gap {logp_ref - logp_theta}"
            )
    _report("KL estimator: 10,000 pairs non-negative, zero iff log-probs equal")
