"""Group-relative advantage normalization and the per-rollout objective terms.

Advantages standardize each rollout's total reward within its group:
``A_i = (r_i - mean(r)) / popstd(r)``, with the zero-variance case mapped to
all-zero advantages so a training loop never divides by zero. The objective
combines the clipped importance-ratio term with a non-negative KL estimate:

    (1/G) * sum_i [ min(rho_i * A_i, clip(rho_i, 1-eps, 1+eps) * A_i)
                    - beta * kl_i ]

where ``kl_i = exp(logp_ref - logp_theta) - (logp_ref - logp_theta) - 1``.
Ratios and log-probs are sequence-level scalars supplied by the caller; no
token bookkeeping happens here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .format_rewards import FormatScores
from .matching import MatchResult


@dataclass(frozen=True)
class GrpoConfig:
    """Clip range and KL coefficient. The defaults are overridable config,
    not claims about any particular training run."""

    epsilon: float = 0.2
    beta: float = 0.0

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise InputError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise InputError(f"beta must be non-negative and finite, got {self.beta!r}")


@dataclass(frozen=True)
class RatioSample:
    """Per-rollout policy ratio and log-probs under current/reference policies."""

    ratio: float
    logp_theta: float = 0.0
    logp_ref: float = 0.0

    def __post_init__(self):
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise InputError(f"ratio must be positive and finite, got {self.ratio!r}")
        for name in ("logp_theta", "logp_ref"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"{name} must be finite")


def group_advantages(rewards: Sequence[float]) -> list[float]:
    """Standardize rewards within one group using the population std.

    All-equal groups (including G=1) yield all-zero advantages.
    """
    if len(rewards) == 0:
        raise InputError("reward group must contain at least one rollout")
    for r in rewards:
        if not math.isfinite(r):
            raise InputError(f"non-finite reward {r!r}")
    g = len(rewards)
    # Test equality directly: the float mean of G equal values can be off by
    # an ulp, which would turn a zero-signal group into huge noise advantages.
    if all(r == rewards[0] for r in rewards):
        return [0.0] * g
    # Corrected two-pass centering: fold the mean's rounding residual back in
    # so near-equal groups are not dominated by cancellation error.
    mean = sum(rewards) / g
    centered = [r - mean for r in rewards]
    residual = sum(centered) / g
    centered = [c - residual for c in centered]
    std = math.sqrt(sum(c * c for c in centered) / g)
    if std == 0.0:
        return [0.0] * g
    return [c / std for c in centered]


def clipped_term(ratio: float, advantage: float, epsilon: float) -> float:
    """min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)."""
    clipped = min(max(ratio, 1.0 - epsilon), 1.0 + epsilon)
    return min(ratio * advantage, clipped * advantage)


def kl_estimate(sample: RatioSample) -> float:
    """Non-negative KL estimate: exp(d) - d - 1 with d = logp_ref - logp_theta."""
    d = sample.logp_ref - sample.logp_theta
    try:
        e = math.exp(d)
    except OverflowError:
        return math.inf
    return e - d - 1.0


def grpo_objective(
    samples: Sequence[tuple[RatioSample, float]],
    cfg: GrpoConfig = GrpoConfig(),
) -> float:
    """Mean over the group of clipped terms minus the KL penalty."""
    if len(samples) == 0:
        raise InputError("objective requires at least one sample")
    total = 0.0
    for sample, advantage in samples:
        total += clipped_term(sample.ratio, advantage, cfg.epsilon)
        if cfg.beta != 0.0:  # 0 * inf would poison the sum with nan
            total -= cfg.beta * kl_estimate(sample)
    return total / len(samples)


def total_reward(fmt: FormatScores, acc: MatchResult) -> float:
    """Sum of the format components and the matching accuracy reward; in [0, 6]."""
    return fmt.thinking + fmt.answer_format + fmt.non_repeat + acc.accuracy_reward
