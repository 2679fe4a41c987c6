#!/usr/bin/env python3
"""Time the batch matching path against the naive scalar loop over a size sweep."""

import argparse

from percept_rl.bench import bench_matching


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1,5,10,30,100", help="comma-separated object counts")
    parser.add_argument("--reps", type=int, default=1000)
    args = parser.parse_args()

    print(f"{'objects':>8}  {'batch s/call':>13}  {'naive s/call':>13}  {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        report = bench_matching(size, args.reps)
        print(
            f"{report.object_count:>8}  {report.batch_seconds:>13.3e}  "
            f"{report.naive_seconds:>13.3e}  {report.speedup:>7.1f}x"
        )


if __name__ == "__main__":
    main()
