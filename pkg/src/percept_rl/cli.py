"""Command-line front end.

Subcommands: ``score`` (reward + advantage records for rollout groups),
``eval`` (task-family metrics), ``prep`` (mask annotations -> samples),
``simulate`` (noisy synthetic rollouts through the reward stack), and
``bench`` (batch vs scalar matching timings). Records go to stdout, one JSON
object per line; diagnostics go to stderr. Exit codes: 0 success, 1 data
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import jsonio
from .bench import bench_matching
from .data_prep import AnnotatedObject, Sample, mask_to_bbox, mask_to_point, merge_objects, route_task, sanitize_annotation
from .errors import DataFileError, EmptyMaskError, InputError, UndefinedMetricError
from .grpo import group_advantages
from .masks import decode_mask
from .matching import Thresholds
from .metrics import ScoredPrediction, ap_at_iou, area_ratio_score, coco_ap, count_accuracy, g_iou
from .scoring import score_rollout
from .simulate import SimConfig, simulate

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2


def _thresholds_from_args(args: argparse.Namespace) -> Thresholds:
    return Thresholds(
        iou_min=args.iou_min,
        box_l1_max=args.box_l1_max,
        point_l1_max=args.point_l1_max,
    )


def cmd_score(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    thr = _thresholds_from_args(args)
    samples = {s.sample_id: s for s in jsonio.read_samples(args.samples)}
    groups = jsonio.read_rollout_groups(args.rollouts)

    orphans = sorted(set(groups) - set(samples))
    if orphans:
        raise InputError(f"rollout groups reference unknown sample_id(s): {orphans}")

    records = []
    for sample_id in sorted(groups):
        sample = samples[sample_id]
        scored = [score_rollout(text, sample.gt_instances, thr) for text in groups[sample_id]]
        advantages = group_advantages([s.scores.total for s in scored])
        for index, (s, adv) in enumerate(zip(scored, advantages)):
            records.append(
                {
                    "sample_id": sample_id,
                    "rollout_index": index,
                    "thinking": s.scores.thinking,
                    "answer_format": s.scores.answer_format,
                    "non_repeat": s.scores.non_repeat,
                    "accuracy": s.scores.accuracy,
                    "total": s.scores.total,
                    "advantage": adv,
                }
            )
    jsonio.write_jsonl(records, out)
    return EXIT_OK


def _eval_detection(preds, samples, out) -> None:
    gts = {s.sample_id: [inst.bbox for inst in s.gt_instances] for s in samples}
    dims = {s.sample_id: (s.image_width, s.image_height) for s in samples}
    scored = []
    for record in preds:
        width, height = dims[record.sample_id]
        for inst in record.instances:
            scored.append(
                ScoredPrediction(
                    sample_id=record.sample_id,
                    bbox=inst.bbox,
                    score=area_ratio_score(inst.bbox, width, height),
                )
            )
    report = {
        "task": "detection",
        "metrics": {"ap@0.5": ap_at_iou(scored, gts, 0.5), "coco_ap": coco_ap(scored, gts)},
        "num_samples": len(samples),
        "num_predictions": len(scored),
    }
    out.write(jsonio.canonical_json(report) + "\n")


def _eval_segmentation(pred_masks, gt_masks, out) -> None:
    ordered_ids = sorted(gt_masks)
    value = g_iou([pred_masks[sid] for sid in ordered_ids], [gt_masks[sid] for sid in ordered_ids])
    report = {
        "task": "segmentation",
        "metrics": {"giou": value},
        "num_samples": len(ordered_ids),
    }
    out.write(jsonio.canonical_json(report) + "\n")


def _eval_counting(preds, samples, out) -> None:
    gt_by_id = {s.sample_id: s.gt_count for s in samples}
    pred_by_id = {r.sample_id: (r.count if r.count is not None else len(r.instances)) for r in preds}
    ordered_ids = sorted(gt_by_id)
    value = count_accuracy(
        [pred_by_id[sid] for sid in ordered_ids],
        [gt_by_id[sid] for sid in ordered_ids],
    )
    report = {
        "task": "counting",
        "metrics": {"count_accuracy": value},
        "num_samples": len(ordered_ids),
    }
    out.write(jsonio.canonical_json(report) + "\n")


def cmd_eval(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    task = args.task
    if task == "segmentation":
        pred_masks = jsonio.read_masks(args.preds)
        gt_masks = jsonio.read_masks(args.gts)
        missing = sorted(set(gt_masks) - set(pred_masks))
        orphans = sorted(set(pred_masks) - set(gt_masks))
        if missing or orphans:
            raise InputError(
                f"mismatched sample_ids; missing predictions: {missing}, orphan predictions: {orphans}"
            )
        _eval_segmentation(pred_masks, gt_masks, out)
        return EXIT_OK

    samples = jsonio.read_samples(args.gts)
    preds = jsonio.read_predictions(args.preds, task)
    known = {s.sample_id for s in samples}
    orphans = sorted({r.sample_id for r in preds} - known)
    if orphans:
        raise InputError(f"predictions reference unknown sample_id(s): {orphans}")

    if task == "detection":
        _eval_detection(preds, samples, out)
    else:
        missing = sorted(known - {r.sample_id for r in preds})
        if missing:
            raise InputError(f"counting requires a prediction per sample; missing: {missing}")
        _eval_counting(preds, samples, out)
    return EXIT_OK


def cmd_prep(args: argparse.Namespace, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    masks_dir = Path(args.masks)
    annotations = _read_annotations(args.annotations)

    failures = 0
    outputs = []
    for annotation in sorted(annotations, key=lambda a: a["sample_id"]):
        try:
            objects = []
            for obj in annotation["objects"]:
                mask = decode_mask(masks_dir / obj["mask"])
                objects.append(
                    AnnotatedObject(text=obj["text"], bbox=mask_to_bbox(mask), point=mask_to_point(mask))
                )
            merged = merge_objects(objects)
            task_type = annotation.get("task_type") or route_task(merged.query)
            sample = Sample(
                sample_id=annotation["sample_id"],
                image_width=annotation["image_width"],
                image_height=annotation["image_height"],
                query=merged.query,
                task_type=task_type,
                gt_instances=list(merged.instances),
            )
            outputs.append(jsonio.sample_to_record(sanitize_annotation(sample)))
        except (OSError, EmptyMaskError, InputError, ValueError) as exc:
            failures += 1
            err.write(
                jsonio.canonical_json({"sample_id": annotation["sample_id"], "error": str(exc)}) + "\n"
            )
    jsonio.write_jsonl(outputs, out)
    if failures and args.strict:
        return EXIT_DATA_ERROR
    return EXIT_OK


def _read_annotations(path: str) -> list[dict]:
    problems = []
    annotations = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record must be a JSON object")
                for key, kind in (("sample_id", str), ("image_width", int), ("image_height", int), ("objects", list)):
                    if key not in record or not isinstance(record[key], kind) or isinstance(record[key], bool):
                        raise ValueError(f"{key!r} missing or not {kind.__name__}")
                if record["sample_id"] in seen:
                    raise ValueError(f"duplicate sample_id {record['sample_id']!r}")
                seen.add(record["sample_id"])
                if not record["objects"]:
                    raise ValueError("objects must be non-empty")
                for obj in record["objects"]:
                    if not isinstance(obj, dict) or not isinstance(obj.get("text"), str) or not isinstance(obj.get("mask"), str):
                        raise ValueError("each object needs string 'text' and 'mask'")
                annotations.append(record)
            except ValueError as exc:
                problems.append((lineno, str(exc)))
    if problems:
        raise DataFileError(path, problems)
    return annotations


def cmd_simulate(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    samples = jsonio.read_samples(args.samples)
    if not samples:
        raise InputError("samples file contains no samples to simulate")
    try:
        sigmas = [float(s) for s in args.sigma.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"--sigma must be a comma-separated list of numbers, got {args.sigma!r}") from None
    if not sigmas:
        raise InputError("--sigma must list at least one noise level")

    rows = []
    for sigma in sigmas:
        totals, accuracies = [], []
        for sample in samples:
            cfg = SimConfig(
                noise_sigma=sigma,
                group_size=args.group_size,
                groups=args.groups,
                drop_prob=args.drop_prob,
                seed=args.seed,
            )
            result = simulate(sample, cfg)
            totals.extend(t for g in result.groups for t in g.totals)
            accuracies.extend(b.accuracy for g in result.groups for b in g.breakdowns)
        rows.append(
            {
                "sigma": sigma,
                "mean_total": sum(totals) / len(totals),
                "mean_accuracy": sum(accuracies) / len(accuracies),
                "rollouts": len(totals),
            }
        )
    jsonio.write_jsonl(rows, out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    report = bench_matching(args.objects, args.reps)
    out.write(
        jsonio.canonical_json(
            {
                "objects": report.object_count,
                "repetitions": report.repetitions,
                "batch_seconds_per_call": report.batch_seconds,
                "naive_seconds_per_call": report.naive_seconds,
                "speedup": report.speedup,
            }
        )
        + "\n"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percept-rl",
        description="Reward scoring, matching, and evaluation for multi-object perception rollouts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score rollout groups against sample ground truth")
    p_score.add_argument("--samples", required=True)
    p_score.add_argument("--rollouts", required=True)
    p_score.add_argument("--iou-min", type=float, default=0.5)
    p_score.add_argument("--box-l1-max", type=float, default=10.0)
    p_score.add_argument("--point-l1-max", type=float, default=30.0)
    p_score.set_defaults(func=cmd_score)

    p_eval = sub.add_parser("eval", help="evaluate predictions for one task family")
    p_eval.add_argument("--preds", required=True)
    p_eval.add_argument("--gts", required=True)
    p_eval.add_argument("--task", required=True, choices=["detection", "segmentation", "counting"])
    p_eval.set_defaults(func=cmd_eval)

    p_prep = sub.add_parser("prep", help="derive samples from mask annotations")
    p_prep.add_argument("--masks", required=True)
    p_prep.add_argument("--annotations", required=True)
    p_prep.add_argument("--strict", action="store_true")
    p_prep.set_defaults(func=cmd_prep)

    p_sim = sub.add_parser("simulate", help="score synthetic noisy rollouts")
    p_sim.add_argument("--samples", required=True)
    p_sim.add_argument("--sigma", required=True, help="comma-separated noise levels in pixels")
    p_sim.add_argument("--group-size", type=int, default=8)
    p_sim.add_argument("--groups", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--drop-prob", type=float, default=0.0)
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", help="time batch vs naive matching")
    p_bench.add_argument("--objects", type=int, required=True)
    p_bench.add_argument("--reps", type=int, required=True)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFileError, InputError, UndefinedMetricError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
