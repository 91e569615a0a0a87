#!/usr/bin/env python3
"""Measure sequential vs parallel windowing across synthetic dataset sizes.

Generates synthetic datasets with a growing number of sessions, times the
windowing stage in both modes, and prints a table of median wall times and
speedup factors.

    python3 scripts/preprocessing_speedup.py --out /tmp/speedup --reps 3
"""

import argparse
import json
import sys
from pathlib import Path

from wharkit.config import load_config_file
from wharkit.parsers import write_synthetic_dataset
from wharkit.pipeline import benchmark


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, required=True, help="working directory")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--duration", type=float, default=30.0, help="seconds per session")
    ap.add_argument("--freq", type=float, default=50.0)
    ap.add_argument(
        "--sessions",
        type=int,
        nargs="+",
        default=[12, 60, 216],
        help="approximate session counts to sweep (subjects x 6 activities)",
    )
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rows = []
    for target in args.sessions:
        subjects = max(1, round(target / 6))
        dataset_id = f"speedup_{subjects}x6"
        config_path, _ = write_synthetic_dataset(
            out_dir=args.out / dataset_id,
            num_subjects=subjects,
            num_activities=6,
            duration_s=args.duration,
            freq=args.freq,
            num_channels=3,
            seed=0,
            dataset_id=dataset_id,
        )
        cfg = load_config_file(config_path)
        report = benchmark(cfg, repetitions=args.reps, jobs=args.jobs)
        rows.append(
            {
                "sessions": subjects * 6,
                "sequential_s": report.sequential_s,
                "parallel_s": report.parallel_s,
                "speedup": report.speedup,
            }
        )
        print(
            f"sessions={subjects * 6:<5d} sequential={report.sequential_s:8.3f}s "
            f"parallel={report.parallel_s:8.3f}s speedup={report.speedup:5.2f}x",
            file=sys.stderr,
        )

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'sessions':>8}  {'sequential_s':>12}  {'parallel_s':>11}  {'speedup':>7}")
        for row in rows:
            print(
                f"{row['sessions']:>8}  {row['sequential_s']:>12.3f}  "
                f"{row['parallel_s']:>11.3f}  {row['speedup']:>6.2f}x"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
