"""Command-line front end.

Exit codes are a stable contract: 0 success, 2 config error, 3 network
error, 4 validation error, 1 anything else. Parseable output goes to
stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .builtins import get_builtin_config
from .config import ConfigValidationError, Stage, WharConfig, load_config_file
from .parsers import get_parser, validate_standardized
from .pipeline import (
    NetworkError,
    PipelineError,
    StandardizationError,
    benchmark,
    ensure_downloaded,
    run_all,
)
from .storage import DatasetLayout, read_manifest

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_NETWORK = 3
EXIT_VALIDATION = 4


def _add_config_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("dataset", nargs="?", help="built-in dataset id")
    sub.add_argument("--config", type=Path, help="path to a config file")


def _resolve_config(args) -> WharConfig:
    if args.config is not None:
        return load_config_file(args.config)
    if args.dataset:
        return get_builtin_config(args.dataset)
    raise ConfigValidationError([("<args>", "either a dataset id or --config is required")])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wharkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("download", help="fetch and extract the raw dataset")
    _add_config_args(p)

    p = sub.add_parser("preprocess", help="run download, standardize, and windowing")
    _add_config_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--sequential", action="store_true", help="disable multiprocessing")
    mode.add_argument("--parallel", action="store_true", help="enable multiprocessing")
    p.add_argument("--jobs", type=int, default=None, help="worker pool size")
    p.add_argument("--force", action="store_true", help="ignore cached stage digests")
    p.add_argument("--json", action="store_true", help="emit a JSON report to stdout")

    p = sub.add_parser("info", help="summarize a dataset config and cache state")
    _add_config_args(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("validate", help="validate config and standardized output")
    _add_config_args(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bench", help="time sequential vs parallel windowing")
    _add_config_args(p)
    p.add_argument("--reps", type=int, default=3, help="repetitions per mode")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("generate-synthetic", help="write a synthetic raw dataset + config")
    p.add_argument("--subjects", type=int, required=True)
    p.add_argument("--activities", type=int, required=True)
    p.add_argument("--duration", type=float, required=True, help="seconds per session")
    p.add_argument("--freq", type=float, required=True, help="sampling frequency in Hz")
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--dataset-id", default="synthetic")
    p.add_argument("--window-time", type=float, default=2.56)
    p.add_argument("--window-overlap", type=float, default=0.5)

    return parser


def _cmd_download(args) -> int:
    cfg = _resolve_config(args)
    get_parser(cfg.parser_id)  # fail fast on unknown parser ids
    raw_dir = ensure_downloaded(cfg)
    print(f"{cfg.dataset_id}: raw data at {raw_dir}")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    cfg = _resolve_config(args)
    get_parser(cfg.parser_id)
    parallel = None
    if args.sequential:
        parallel = False
    elif args.parallel:
        parallel = True
    index = run_all(cfg, force=args.force, parallel=parallel, jobs=args.jobs)
    if args.json:
        print(
            json.dumps(
                {
                    "dataset_id": cfg.dataset_id,
                    "sessions": len(index.sessions),
                    "windows": len(index.windows),
                    "window_ids": list(index.window_ids),
                }
            )
        )
    else:
        print(f"{cfg.dataset_id}: {len(index.sessions)} sessions, {len(index.windows)} windows")
    return EXIT_OK


def _cmd_info(args) -> int:
    cfg = _resolve_config(args)
    manifest = read_manifest(DatasetLayout.from_config(cfg))
    cached = sorted(manifest.stages)
    if args.json:
        print(
            json.dumps(
                {
                    "dataset_id": cfg.dataset_id,
                    "num_of_subjects": cfg.num_of_subjects,
                    "num_of_activities": cfg.num_of_activities,
                    "sampling_freq": cfg.sampling_freq,
                    "num_of_channels": cfg.num_of_channels,
                    "sensor_channels": cfg.sensor_channels,
                    "cached_stages": cached,
                }
            )
        )
    else:
        freq = f"{cfg.sampling_freq:g}"
        print(
            f"{cfg.dataset_id}: {cfg.num_of_subjects} subjects, "
            f"{cfg.num_of_activities} activities, {freq} Hz, "
            f"{cfg.num_of_channels} channels"
        )
        print(f"cached stages: {', '.join(cached) if cached else 'none'}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    if args.config is None and not args.dataset:
        raise ConfigValidationError([("<args>", "either a dataset id or --config is required")])
    try:
        cfg = _resolve_config(args)
    except ConfigValidationError as e:
        if args.json:
            print(json.dumps({"ok": False, "config_errors": e.errors}))
        else:
            for path, msg in e.errors:
                print(f"config error at {path}: {msg}", file=sys.stderr)
        return EXIT_VALIDATION

    layout = DatasetLayout.from_config(cfg)
    manifest = read_manifest(layout)
    report = None
    if manifest.digest_for(Stage.STANDARDIZE) is not None:
        # re-parse and validate the standardized output
        raw_dir = layout.raw_dir
        result = get_parser(cfg.parser_id).parse(raw_dir, cfg)
        report = validate_standardized(result, cfg)

    if args.json:
        payload = {"ok": report.ok if report else True, "config_errors": []}
        if report:
            payload["issues"] = [
                {"severity": i.severity, "location": i.location, "message": i.message}
                for i in report.issues
            ]
        print(json.dumps(payload))
    else:
        print(f"{cfg.dataset_id}: config ok")
        if report:
            for issue in report.issues:
                print(f"{issue.severity}: {issue.location}: {issue.message}")
            print(f"standardized output: {'ok' if report.ok else 'INVALID'}")
    if report and not report.ok:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = _resolve_config(args)
    get_parser(cfg.parser_id)
    report = benchmark(cfg, repetitions=args.reps, jobs=args.jobs)
    if args.json:
        print(
            json.dumps(
                {
                    "dataset_id": cfg.dataset_id,
                    "sequential_s": report.sequential_s,
                    "parallel_s": report.parallel_s,
                    "speedup": report.speedup,
                    "repetitions": report.repetitions,
                }
            )
        )
    else:
        print(f"{'mode':<12} {'median_s':>10}")
        print(f"{'sequential':<12} {report.sequential_s:>10.3f}")
        print(f"{'parallel':<12} {report.parallel_s:>10.3f}")
        print(f"speedup: {report.speedup:.2f}x")
    return EXIT_OK


def _cmd_generate_synthetic(args) -> int:
    from .parsers import write_synthetic_dataset

    config_path, archive_path = write_synthetic_dataset(
        out_dir=args.out,
        num_subjects=args.subjects,
        num_activities=args.activities,
        duration_s=args.duration,
        freq=args.freq,
        num_channels=args.channels,
        seed=args.seed,
        dataset_id=args.dataset_id,
        window_time=args.window_time,
        window_overlap=args.window_overlap,
    )
    print(f"config: {config_path}")
    print(f"archive: {archive_path}")
    return EXIT_OK


_COMMANDS = {
    "download": _cmd_download,
    "preprocess": _cmd_preprocess,
    "info": _cmd_info,
    "validate": _cmd_validate,
    "bench": _cmd_bench,
    "generate-synthetic": _cmd_generate_synthetic,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    command = _COMMANDS[args.command]
    try:
        return command(args)
    except ConfigValidationError as e:
        for path, msg in e.errors:
            print(f"config error at {path}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as e:
        print(f"error: {e.args[0] if e.args else e}", file=sys.stderr)
        return EXIT_CONFIG
    except NetworkError as e:
        print(f"network error: {e}", file=sys.stderr)
        return EXIT_NETWORK
    except StandardizationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PipelineError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
