"""Reward computation, optimal matching, and evaluation for multi-object
visual perception rollouts trained with group-relative RL."""

from .bench import BenchReport, bench_matching, naive_accuracy_reward
from .data_prep import (
    AnnotatedObject,
    MaskGrid,
    MergedObjects,
    Sample,
    mask_to_bbox,
    mask_to_point,
    merge_objects,
    route_task,
    sanitize_annotation,
    strip_count_leakage,
)
from .errors import (
    DataFileError,
    EmptyMaskError,
    InputError,
    SchemaError,
    TagError,
    UndefinedMetricError,
)
from .format_rewards import (
    FormatScores,
    answer_format_reward,
    format_scores,
    non_repeat_reward,
    thinking_reward,
)
from .grpo import (
    GrpoConfig,
    RatioSample,
    clipped_term,
    group_advantages,
    grpo_objective,
    kl_estimate,
    total_reward,
)
from .matching import (
    DEFAULT_THRESHOLDS,
    MatchResult,
    PairwiseMatrices,
    Thresholds,
    accuracy_reward,
    batch_pairwise,
    box_l1,
    build_cost,
    hungarian,
    iou,
    point_l1,
)
from .metrics import (
    PRCurve,
    ScoredPrediction,
    ap_at_iou,
    area_ratio_score,
    coco_ap,
    count_accuracy,
    g_iou,
    mask_iou,
)
from .rollout import (
    Instance,
    ParsedRollout,
    ParseStatus,
    canonicalize,
    extract_blocks,
    format_number,
    instances_to_answer_json,
    parse_answer,
    parse_rollout,
)
from .scoring import RewardBreakdown, ScoredRollout, score_rollout
from .simulate import SimConfig, SimulationResult, noise_ladder, simulate

__version__ = "0.1.0"

__all__ = [
    "AnnotatedObject",
    "BenchReport",
    "DataFileError",
    "DEFAULT_THRESHOLDS",
    "EmptyMaskError",
    "FormatScores",
    "GrpoConfig",
    "InputError",
    "Instance",
    "MaskGrid",
    "MatchResult",
    "MergedObjects",
    "PRCurve",
    "PairwiseMatrices",
    "ParseStatus",
    "ParsedRollout",
    "RatioSample",
    "RewardBreakdown",
    "Sample",
    "SchemaError",
    "ScoredPrediction",
    "ScoredRollout",
    "SimConfig",
    "SimulationResult",
    "TagError",
    "Thresholds",
    "UndefinedMetricError",
    "accuracy_reward",
    "answer_format_reward",
    "ap_at_iou",
    "area_ratio_score",
    "batch_pairwise",
    "bench_matching",
    "box_l1",
    "build_cost",
    "canonicalize",
    "clipped_term",
    "coco_ap",
    "count_accuracy",
    "extract_blocks",
    "format_number",
    "format_scores",
    "g_iou",
    "group_advantages",
    "grpo_objective",
    "hungarian",
    "instances_to_answer_json",
    "iou",
    "kl_estimate",
    "mask_iou",
    "mask_to_bbox",
    "mask_to_point",
    "merge_objects",
    "naive_accuracy_reward",
    "non_repeat_reward",
    "parse_answer",
    "parse_rollout",
    "point_l1",
    "route_task",
    "sanitize_annotation",
    "score_rollout",
    "simulate",
    "noise_ladder",
    "strip_count_leakage",
    "thinking_reward",
    "total_reward",
]
