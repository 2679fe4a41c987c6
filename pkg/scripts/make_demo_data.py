#!/usr/bin/env python3
"""Generate a small demo dataset for walking through the CLI end to end.

Writes samples.jsonl, rollouts.jsonl, detection/counting predictions,
segmentation masks, and a masks/ directory with PNG annotations, into the
chosen output directory.
"""

import argparse
import json
from pathlib import Path

import numpy as np
from PIL import Image

from percept_rl.jsonio import canonical_json, mask_to_record, sample_to_record
from percept_rl.data_prep import MaskGrid, Sample
from percept_rl.rollout import Instance, instances_to_answer_json
from percept_rl.simulate import SimConfig, simulate


def write_jsonl(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(canonical_json(record) + "\n")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_data")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    samples = [
        Sample(
            sample_id="crates-01",
            image_width=1000,
            image_height=1000,
            query="wooden crates on the pallet",
            task_type="detection",
            gt_instances=[
                Instance((110.0, 140.0, 240.0, 300.0), (175.0, 220.0)),
                Instance((520.0, 380.0, 700.0, 560.0), (610.0, 470.0)),
            ],
        ),
        Sample(
            sample_id="birds-02",
            image_width=800,
            image_height=600,
            query="birds on the wire",
            task_type="counting",
            gt_instances=[
                Instance((100.0 + i * 150, 80.0, 140.0 + i * 150, 130.0), (120.0 + i * 150, 105.0))
                for i in range(4)
            ],
        ),
    ]
    write_jsonl(out / "samples.jsonl", [sample_to_record(s) for s in samples])

    rollout_records = []
    for sample in samples:
        result = simulate(sample, SimConfig(noise_sigma=6.0, group_size=4, groups=1, seed=args.seed))
        rollout_records.append({"sample_id": sample.sample_id, "group": list(result.groups[0].rollouts)})
    write_jsonl(out / "rollouts.jsonl", rollout_records)

    write_jsonl(
        out / "preds_detection.jsonl",
        [
            {
                "sample_id": s.sample_id,
                "pred": json.loads(instances_to_answer_json(s.gt_instances)),
            }
            for s in samples
        ],
    )
    write_jsonl(
        out / "preds_counting.jsonl",
        [{"sample_id": s.sample_id, "count": s.gt_count} for s in samples],
    )

    full = MaskGrid.from_array(rng.random((32, 32)) < 0.4)
    noisy = MaskGrid.from_array(np.logical_xor(full.bits, rng.random((32, 32)) < 0.05))
    write_jsonl(out / "gt_masks.jsonl", [mask_to_record(s.sample_id, full) for s in samples])
    write_jsonl(out / "pred_masks.jsonl", [mask_to_record(s.sample_id, noisy) for s in samples])

    masks_dir = out / "masks"
    masks_dir.mkdir(exist_ok=True)
    annotations = []
    for idx, name in enumerate(["red car", "blue bus"]):
        canvas = np.zeros((60, 80), dtype=np.uint8)
        x, y = 10 + idx * 30, 12 + idx * 8
        canvas[y:y + 20, x:x + 24] = 255
        Image.fromarray(canvas, mode="L").save(masks_dir / f"obj{idx}.png")
        annotations.append({"text": name, "mask": f"obj{idx}.png"})
    write_jsonl(
        out / "annotations.jsonl",
        [{"sample_id": "street-00", "image_width": 80, "image_height": 60,
          "task_type": "detection", "objects": annotations}],
    )

    print(f"wrote demo dataset under {out}/")


if __name__ == "__main__":
    main()
