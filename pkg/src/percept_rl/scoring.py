"""End-to-end scoring of one rollout string against ground-truth instances.

Glues the parser, the format rewards, and the matching reward together.
Malformed rollouts are not errors here: they parse to a failed status and
earn zero on the affected components, mirroring training where a bad
generation must receive a low reward rather than crash the loop.

The answer-format judgment happens on the literal parse; canonicalization of
inverted boxes is applied only afterwards, for the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .format_rewards import FormatScores, format_scores
from .matching import DEFAULT_THRESHOLDS, MatchResult, Thresholds, accuracy_reward
from .rollout import Instance, ParsedRollout, canonicalize, parse_rollout


@dataclass(frozen=True)
class RewardBreakdown:
    """All six reward components of one rollout plus their sum.

    ``box_iou`` / ``box_l1`` / ``point_l1`` decompose the matching reward by
    criterion over the matched pairs; their sum equals ``accuracy`` up to
    float rounding, but only ``accuracy`` is tie-invariant.
    """

    thinking: float
    answer_format: float
    non_repeat: float
    box_iou: float
    box_l1: float
    point_l1: float
    accuracy: float

    @property
    def total(self) -> float:
        return self.thinking + self.answer_format + self.non_repeat + self.accuracy


@dataclass(frozen=True)
class ScoredRollout:
    """Parse outcome, reward breakdown, and the underlying match."""

    parsed: ParsedRollout
    scores: RewardBreakdown
    match: MatchResult


def score_rollout(
    text: str,
    gts: Sequence[Instance],
    thr: Thresholds = DEFAULT_THRESHOLDS,
) -> ScoredRollout:
    """Score one raw rollout string against canonical ground-truth instances."""
    parsed = parse_rollout(text)
    fmt = format_scores(parsed)
    preds = [canonicalize(inst) for inst in parsed.instances] if parsed.ok else []
    match = accuracy_reward(preds, gts, thr)

    l_max = max(len(preds), len(gts))
    iou_passes, bl1_passes, pl1_passes = match.criterion_passes
    breakdown = RewardBreakdown(
        thinking=fmt.thinking,
        answer_format=fmt.answer_format,
        non_repeat=fmt.non_repeat,
        box_iou=iou_passes / l_max if l_max else 0.0,
        box_l1=bl1_passes / l_max if l_max else 0.0,
        point_l1=pl1_passes / l_max if l_max else 0.0,
        accuracy=match.accuracy_reward,
    )
    return ScoredRollout(parsed=parsed, scores=breakdown, match=match)


def format_scores_of(scored: ScoredRollout) -> FormatScores:
    return FormatScores(
        thinking=scored.scores.thinking,
        answer_format=scored.scores.answer_format,
        non_repeat=scored.scores.non_repeat,
    )
