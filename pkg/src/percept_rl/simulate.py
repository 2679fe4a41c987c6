"""Synthetic-policy simulator: a desk-scale stand-in for rollout sampling.

Each simulated rollout copies the sample's ground-truth instances, drops each
object independently with probability ``drop_prob``, and jitters every
coordinate with independent zero-mean Gaussian noise of scale ``noise_sigma``.
The rollout is rendered as well-formed think/answer text, scored through the
full reward stack, and standardized into group advantages.

The RNG is seeded per group by (seed, group_index), so runs are bit-identical
regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data_prep import Sample
from .errors import InputError
from .grpo import group_advantages
from .matching import DEFAULT_THRESHOLDS, Thresholds
from .rollout import Instance, instances_to_answer_json
from .scoring import RewardBreakdown, score_rollout


@dataclass(frozen=True)
class SimConfig:
    """Noise scale, group shape, drop probability, and the base seed."""

    noise_sigma: float = 0.0
    group_size: int = 8
    groups: int = 1
    drop_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.noise_sigma >= 0 and np.isfinite(self.noise_sigma)):
            raise InputError("noise_sigma must be non-negative and finite")
        if self.group_size < 2:
            raise InputError("group_size must be at least 2")
        if self.groups < 1:
            raise InputError("groups must be at least 1")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise InputError("drop_prob must be a probability")


@dataclass(frozen=True)
class SimulatedGroup:
    """One group of rollouts with their scores and advantages."""

    rollouts: tuple[str, ...]
    breakdowns: tuple[RewardBreakdown, ...]
    totals: tuple[float, ...]
    advantages: tuple[float, ...]


@dataclass(frozen=True)
class SimulationResult:
    """All simulated groups for one sample at one noise level."""

    noise_sigma: float
    groups: tuple[SimulatedGroup, ...] = field(default_factory=tuple)

    @property
    def mean_total(self) -> float:
        return float(np.mean([t for g in self.groups for t in g.totals]))

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([b.accuracy for g in self.groups for b in g.breakdowns]))


def _render_rollout(query: str, instances: list[Instance]) -> str:
    think = (
        f"The request asks for {query}. "
        f"I can identify {len(instances)} matching object(s) in the image."
    )
    return f"<think>{think}</think><answer>{instances_to_answer_json(instances)}</answer>"


def _jitter_instances(
    gts: list[Instance], rng: np.random.Generator, sigma: float, drop_prob: float
) -> list[Instance]:
    kept = []
    for inst in gts:
        if rng.random() < drop_prob:
            continue
        # scale=0 yields exact zeros while keeping the draw sequence aligned
        # across noise levels for a fixed seed.
        noise = rng.normal(0.0, sigma, size=6)
        bbox = tuple(float(c + n) for c, n in zip(inst.bbox, noise[:4]))
        point = tuple(float(c + n) for c, n in zip(inst.point, noise[4:]))
        kept.append(Instance(bbox, point))
    return kept


def simulate(
    sample: Sample,
    cfg: SimConfig,
    thr: Thresholds = DEFAULT_THRESHOLDS,
) -> SimulationResult:
    """Generate and score rollout groups for one sample at one noise level."""
    if sample.gt_count == 0:
        raise InputError("simulation requires at least one ground-truth instance")

    groups = []
    for group_index in range(cfg.groups):
        rng = np.random.default_rng([cfg.seed, group_index])
        rollouts, breakdowns, totals = [], [], []
        for _ in range(cfg.group_size):
            jittered = _jitter_instances(
                sample.gt_instances, rng, cfg.noise_sigma, cfg.drop_prob
            )
            text = _render_rollout(sample.query, jittered)
            scored = score_rollout(text, sample.gt_instances, thr)
            rollouts.append(text)
            breakdowns.append(scored.scores)
            totals.append(scored.scores.total)
        advantages = group_advantages(totals)
        groups.append(
            SimulatedGroup(
                rollouts=tuple(rollouts),
                breakdowns=tuple(breakdowns),
                totals=tuple(totals),
                advantages=tuple(advantages),
            )
        )
    return SimulationResult(noise_sigma=cfg.noise_sigma, groups=tuple(groups))


def noise_ladder(
    sample: Sample,
    sigmas: list[float],
    cfg: SimConfig,
    thr: Thresholds = DEFAULT_THRESHOLDS,
) -> list[SimulationResult]:
    """Run the simulator at each noise level with otherwise identical config."""
    results = []
    for sigma in sigmas:
        level_cfg = SimConfig(
            noise_sigma=sigma,
            group_size=cfg.group_size,
            groups=cfg.groups,
            drop_prob=cfg.drop_prob,
            seed=cfg.seed,
        )
        results.append(simulate(sample, level_cfg, thr))
    return results
