import numpy as np
import pytest

from percept_rl.data_prep import Sample
from percept_rl.errors import InputError
from percept_rl.rollout import Instance
from percept_rl.simulate import SimConfig, noise_ladder, simulate


def demo_sample(n_objects=2) -> Sample:
    # smallish boxes so 5 px jitter already dents the IoU indicator
    boxes = [
        ((100, 100, 124, 120), (112, 110)),
        ((400, 420, 430, 456), (415, 438)),
        ((700, 80, 726, 108), (713, 94)),
    ]
    return Sample(
        sample_id="demo",
        image_width=1000,
        image_height=1000,
        query="the scattered markers",
        task_type="detection",
        gt_instances=[Instance.of(b, p) for b, p in boxes[:n_objects]],
    )


class TestSimulate:
    def test_zero_noise_is_a_point_mass_at_the_maximum(self):
        result = simulate(demo_sample(), SimConfig(noise_sigma=0.0, group_size=4, groups=3, seed=7))
        for group in result.groups:
            assert group.totals == (6.0, 6.0, 6.0, 6.0)
            assert all(b.accuracy == 3.0 for b in group.breakdowns)
            assert group.advantages == (0.0, 0.0, 0.0, 0.0)

    def test_rollouts_are_well_formed(self):
        result = simulate(demo_sample(), SimConfig(noise_sigma=12.0, group_size=3, groups=2, seed=1))
        for group in result.groups:
            for text in group.rollouts:
                assert text.startswith("<think>")
                assert "</think>" in text and "<answer>" in text and text.endswith("</answer>")

    def test_huge_noise_kills_accuracy(self):
        result = simulate(demo_sample(), SimConfig(noise_sigma=1000.0, group_size=8, groups=200, seed=3))
        assert result.mean_accuracy < 0.25

    def test_deterministic_given_seed(self):
        cfg = SimConfig(noise_sigma=9.0, group_size=4, groups=3, drop_prob=0.3, seed=11)
        a = simulate(demo_sample(), cfg)
        b = simulate(demo_sample(), cfg)
        assert a == b

    def test_seed_changes_rollouts(self):
        base = SimConfig(noise_sigma=9.0, group_size=4, groups=1, seed=0)
        other = SimConfig(noise_sigma=9.0, group_size=4, groups=1, seed=1)
        assert simulate(demo_sample(), base) != simulate(demo_sample(), other)

    def test_drop_prob_shrinks_answers(self):
        cfg = SimConfig(noise_sigma=0.0, group_size=8, groups=10, drop_prob=0.9, seed=5)
        result = simulate(demo_sample(), cfg)
        assert result.mean_accuracy < 3.0

    def test_requires_ground_truth(self):
        sample = demo_sample()
        sample.gt_instances.clear()
        with pytest.raises(InputError):
            simulate(sample, SimConfig())

    def test_noise_ladder_strictly_decreasing(self):
        results = noise_ladder(
            demo_sample(),
            [0.0, 5.0, 20.0, 60.0],
            SimConfig(group_size=8, groups=40, seed=123),
        )
        means = [r.mean_accuracy for r in results]
        assert means[0] == 3.0
        assert all(a > b for a, b in zip(means, means[1:]))

    def test_argmax_advantage_tracks_argmax_total(self):
        result = simulate(demo_sample(), SimConfig(noise_sigma=15.0, group_size=8, groups=30, seed=21))
        for group in result.groups:
            if len(set(group.totals)) == 1:
                continue
            best = int(np.argmax(group.totals))
            assert group.advantages[best] == max(group.advantages)


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            SimConfig(noise_sigma=-1.0)
        with pytest.raises(InputError):
            SimConfig(group_size=1)
        with pytest.raises(InputError):
            SimConfig(groups=0)
        with pytest.raises(InputError):
            SimConfig(drop_prob=1.5)
