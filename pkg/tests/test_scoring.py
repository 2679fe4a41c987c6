import pytest

from percept_rl.matching import Thresholds
from percept_rl.rollout import Instance, instances_to_answer_json
from percept_rl.scoring import score_rollout

GT = [
    Instance((100.0, 100.0, 200.0, 220.0), (150.0, 160.0)),
    Instance((400.0, 300.0, 520.0, 390.0), (460.0, 345.0)),
]


def rollout_text(instances, think="Checking each candidate region once."):
    return f"<think>{think}</think><answer>{instances_to_answer_json(instances)}</answer>"


class TestScoreRollout:
    def test_perfect(self):
        scored = score_rollout(rollout_text(GT), GT)
        assert scored.scores.total == 6.0
        assert scored.scores.accuracy == 3.0
        assert scored.match.total_cost == 0

    def test_empty_string(self):
        scored = score_rollout("", GT)
        assert scored.scores.total == 0.0

    def test_tags_with_bad_json(self):
        scored = score_rollout("<think>a b c</think><answer>{{oops</answer>", GT)
        assert scored.scores.thinking == 1.0
        assert scored.scores.answer_format == 0.0
        assert scored.scores.accuracy == 0.0

    def test_inverted_boxes_judged_literal_then_canonicalized(self):
        flipped = [Instance((inst.bbox[2], inst.bbox[3], inst.bbox[0], inst.bbox[1]), inst.point) for inst in GT]
        scored = score_rollout(rollout_text(flipped), GT)
        # schema reward judges the literal parse; geometry sees canonical boxes
        assert scored.scores.answer_format == 1.0
        assert scored.scores.accuracy == 3.0

    def test_breakdown_components_sum_to_accuracy(self):
        drifted = [
            Instance((102.0, 101.0, 203.0, 222.0), (151.0, 161.0)),
            Instance((800.0, 700.0, 900.0, 800.0), (850.0, 750.0)),
        ]
        scored = score_rollout(rollout_text(drifted), GT)
        s = scored.scores
        assert s.box_iou + s.box_l1 + s.point_l1 == pytest.approx(s.accuracy, abs=1e-12)
        assert 0.0 < s.accuracy < 3.0

    def test_repeated_reasoning_costs_one_point(self):
        think = "Find the red car. Find the red car. Find the red car."
        scored = score_rollout(rollout_text(GT, think=think), GT)
        assert scored.scores.non_repeat == 0.0
        assert scored.scores.total == 5.0

    def test_extra_prediction_dilutes(self):
        padded = list(GT) + [Instance((0.0, 0.0, 10.0, 10.0), (5.0, 5.0))]
        scored = score_rollout(rollout_text(padded), GT)
        assert scored.scores.accuracy == 2.0

    def test_thresholds_are_honored(self):
        drifted = [Instance(tuple(b + 4.0 for b in inst.bbox), inst.point) for inst in GT]
        loose = score_rollout(rollout_text(drifted), GT, Thresholds(0.5, 10, 30))
        tight = score_rollout(rollout_text(drifted), GT, Thresholds(0.5, 2, 30))
        assert loose.scores.accuracy > tight.scores.accuracy
