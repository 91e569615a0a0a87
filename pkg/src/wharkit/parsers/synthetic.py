"""Deterministic synthetic dataset generator and its raw-format parser.

One session per (subject, activity) pair; channel c of activity a is
sin(2*pi*(a+1)*t + c) plus gaussian noise (sigma=0.05) from a generator
seeded once, drawn in session emission order. The raw on-disk form is a zip
of per-session CSVs, so the full download/parse/window pipeline can run
offline.
"""

from __future__ import annotations

import io
import re
import zipfile
from pathlib import Path

import numpy as np

from ..config import NormalizationMode, WharConfig, save_config_file, validate_config
from ..model import ActivityMetadata, SessionData, SessionMetadata
from .base import ParseResult, Parser, ParserError

NOISE_SIGMA = 0.05
ARCHIVE_NAME = "synthetic_raw.zip"
_SESSION_FILE = re.compile(r"subject_(\d+)_activity_(\d+)\.csv$")


def generate_synthetic(
    num_subjects: int,
    num_activities: int,
    duration_s: float,
    freq: float,
    num_channels: int,
    seed: int,
) -> ParseResult:
    """Generate sessions in (subject, activity) order, session_id sequential."""
    for name, value in (
        ("num_subjects", num_subjects),
        ("num_activities", num_activities),
        ("duration_s", duration_s),
        ("freq", freq),
        ("num_channels", num_channels),
    ):
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")

    n = round(duration_s * freq)
    if n < 2:
        raise ValueError(f"duration_s {duration_s} at {freq} Hz gives {n} samples, need >= 2")
    step_us = round(1_000_000 / freq)
    timestamps = np.arange(n, dtype=np.int64) * step_us
    t = np.arange(n, dtype=np.float64) / freq

    rng = np.random.default_rng(seed)
    activities = [
        ActivityMetadata(activity_id=a, activity_name=f"activity_{a}")
        for a in range(num_activities)
    ]
    sessions: list[tuple[SessionMetadata, SessionData]] = []
    session_id = 0
    for subject in range(num_subjects):
        for activity in range(num_activities):
            channels = {}
            for c in range(num_channels):
                clean = np.sin(2.0 * np.pi * (activity + 1) * t + c)
                noise = rng.normal(0.0, NOISE_SIGMA, n)
                channels[f"ch_{c}"] = (clean + noise).astype(np.float32)
            meta = SessionMetadata(
                session_id=session_id, subject_id=subject, activity_id=activity
            )
            sessions.append((meta, SessionData(timestamps=timestamps, channels=channels)))
            session_id += 1
    return ParseResult(activities=activities, sessions=sessions)


def _session_csv(data: SessionData) -> bytes:
    # repr() of the exact float32 value round-trips bit-for-bit through
    # float64 text parsing followed by a float32 cast
    buf = io.StringIO()
    names = data.channel_names
    buf.write("timestamp," + ",".join(names) + "\n")
    cols = [data.channels[c] for c in names]
    for i, ts in enumerate(data.timestamps):
        buf.write(str(int(ts)))
        for col in cols:
            buf.write("," + repr(float(col[i])))
        buf.write("\n")
    return buf.getvalue().encode("ascii")


def write_synthetic_dataset(
    out_dir: str | Path,
    num_subjects: int,
    num_activities: int,
    duration_s: float,
    freq: float,
    num_channels: int,
    seed: int,
    dataset_id: str = "synthetic",
    window_time: float = 2.56,
    window_overlap: float = 0.5,
    normalization: str | NormalizationMode = NormalizationMode.NONE,
) -> tuple[Path, Path]:
    """Write a raw synthetic archive + matching config file.

    Returns (config_path, archive_path). The config points download_url at
    the local archive, so every pipeline command works offline.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = generate_synthetic(
        num_subjects, num_activities, duration_s, freq, num_channels, seed
    )

    archive_path = out_dir / ARCHIVE_NAME
    with zipfile.ZipFile(archive_path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for meta, data in result.sessions:
            name = f"subject_{meta.subject_id}_activity_{meta.activity_id}.csv"
            info = zipfile.ZipInfo(name)  # fixed date -> byte-identical archives
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, _session_csv(data))

    subjects = list(range(num_subjects))
    n_test = max(1, num_subjects // 5) if num_subjects >= 2 else 0
    train_ids = subjects[: num_subjects - n_test]
    test_ids = subjects[num_subjects - n_test :]
    # a 10% validation draw rounds up to a whole subject; only take one when
    # the training pool can spare it
    val_percentage = 0.1 if len(train_ids) >= 2 else 0.0

    cfg = validate_config(
        WharConfig(
            dataset_id=dataset_id,
            download_url=str(archive_path.resolve()),
            sampling_freq=freq,
            num_of_subjects=num_subjects,
            num_of_activities=num_activities,
            num_of_channels=num_channels,
            datasets_dir=str((out_dir / "datasets").resolve()),
            parser_id="synthetic",
            activity_names=[a.activity_name for a in result.activities],
            sensor_channels=[f"ch_{c}" for c in range(num_channels)],
            window_time=window_time,
            window_overlap=window_overlap,
            given_train_subj_ids=train_ids,
            given_test_subj_ids=test_ids,
            subj_cross_val_split_groups=[[s] for s in subjects],
            val_percentage=val_percentage,
            normalization=NormalizationMode(normalization),
            seed=seed,
        ).model_dump(mode="json")
    )
    config_path = out_dir / f"{dataset_id}.yaml"
    save_config_file(cfg, config_path)
    return config_path, archive_path


def parse_synthetic(raw_dir: Path, cfg: WharConfig) -> ParseResult:
    raw_dir = Path(raw_dir)
    found: list[tuple[int, int, Path]] = []
    for path in raw_dir.rglob("*.csv"):
        m = _SESSION_FILE.search(path.name)
        if m:
            found.append((int(m.group(1)), int(m.group(2)), path))
    if not found:
        raise ParserError(f"no subject_*_activity_*.csv files under {raw_dir}")
    found.sort(key=lambda x: (x[0], x[1]))

    activity_ids = sorted({a for _, a, _ in found})
    activities = [
        ActivityMetadata(activity_id=a, activity_name=f"activity_{a}") for a in activity_ids
    ]

    sessions: list[tuple[SessionMetadata, SessionData]] = []
    for session_id, (subject, activity, path) in enumerate(found):
        lines = path.read_text().splitlines()
        if len(lines) < 2:
            raise ParserError(f"{path}: empty session file")
        names = lines[0].split(",")[1:]
        timestamps = np.empty(len(lines) - 1, dtype=np.int64)
        values = np.empty((len(lines) - 1, len(names)), dtype=np.float64)
        for i, line in enumerate(lines[1:]):
            parts = line.split(",")
            timestamps[i] = int(parts[0])
            values[i] = [float(p) for p in parts[1:]]
        channels = {name: values[:, j].astype(np.float32) for j, name in enumerate(names)}
        meta = SessionMetadata(session_id=session_id, subject_id=subject, activity_id=activity)
        sessions.append((meta, SessionData(timestamps=timestamps, channels=channels)))

    return ParseResult(activities=activities, sessions=sessions)


SYNTHETIC_PARSER = Parser(parser_id="synthetic", parser_version=1, parse=parse_synthetic)
