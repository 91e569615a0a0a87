"""Parser for the smartphone inertial dataset with 128-sample overlapping rows.

The raw archive ships pre-windowed rows (128 samples, 50% overlap) per
signal. Sessions are reconstructed by de-overlapping: within a run of
consecutive rows sharing (subject, label), each row contributes its first 64
samples and the final row contributes all 128, giving a continuous 50 Hz
signal. Timestamps are synthesized at exact 20000 us steps.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from ..config import WharConfig
from ..model import ActivityMetadata, SessionData, SessionMetadata
from .base import ParseResult, Parser, ParserError

SIGNALS = (
    "body_acc_x",
    "body_acc_y",
    "body_acc_z",
    "body_gyro_x",
    "body_gyro_y",
    "body_gyro_z",
    "total_acc_x",
    "total_acc_y",
    "total_acc_z",
)

ROW_LEN = 128
HALF = ROW_LEN // 2
STEP_US = 20_000  # 50 Hz
SPLITS = ("train", "test")


def _find_root(raw_dir: Path) -> Path:
    hits = sorted(raw_dir.rglob("activity_labels.txt"))
    if not hits:
        raise ParserError(f"activity_labels.txt not found under {raw_dir}")
    return hits[0].parent


def _read_matrix(path: Path) -> np.ndarray:
    if not path.exists():
        raise ParserError(f"missing file: {path}")
    try:
        return pd.read_csv(path, sep=r"\s+", header=None, dtype=np.float32).to_numpy()
    except pd.errors.EmptyDataError:
        return np.empty((0, ROW_LEN), dtype=np.float32)


def _read_vector(path: Path) -> np.ndarray:
    if not path.exists():
        raise ParserError(f"missing file: {path}")
    try:
        return pd.read_csv(path, sep=r"\s+", header=None, dtype=np.int64).to_numpy().ravel()
    except pd.errors.EmptyDataError:
        return np.empty(0, dtype=np.int64)


def _label_map(root: Path) -> dict[int, str]:
    entries = {}
    for line in (root / "activity_labels.txt").read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        raw_id, name = line.split(maxsplit=1)
        entries[int(raw_id)] = name.strip().lower()
    return entries


def _deoverlap(rows: np.ndarray) -> np.ndarray:
    # first 64 samples of every row but the last, full final row
    if len(rows) == 1:
        return rows[0]
    return np.concatenate([rows[:-1, :HALF].reshape(-1), rows[-1]])


def parse_uci_har(raw_dir: Path, cfg: WharConfig) -> ParseResult:
    root = _find_root(Path(raw_dir))
    labels_by_raw = _label_map(root)
    activities = [
        ActivityMetadata(activity_id=raw - 1, activity_name=name)
        for raw, name in sorted(labels_by_raw.items())
    ]

    sessions: list[tuple[SessionMetadata, SessionData]] = []
    session_id = 0
    for split in SPLITS:
        subjects = _read_vector(root / split / f"subject_{split}.txt")
        labels = _read_vector(root / split / f"y_{split}.txt")
        if len(subjects) == 0 and len(labels) == 0:
            continue
        if len(subjects) != len(labels):
            raise ParserError(
                f"{split}: subject vector has {len(subjects)} rows, labels {len(labels)}"
            )
        unknown = sorted(set(labels.tolist()) - set(labels_by_raw))
        if unknown:
            raise ParserError(f"unknown label value {unknown[0]}")

        signals = {}
        for name in SIGNALS:
            matrix = _read_matrix(root / split / "Inertial Signals" / f"{name}_{split}.txt")
            if matrix.shape != (len(subjects), ROW_LEN):
                raise ParserError(
                    f"{split}/{name}: shape {matrix.shape}, expected ({len(subjects)}, {ROW_LEN})"
                )
            signals[name] = matrix

        # runs of consecutive rows with identical (subject, label)
        boundaries = [0]
        for i in range(1, len(subjects)):
            if subjects[i] != subjects[i - 1] or labels[i] != labels[i - 1]:
                boundaries.append(i)
        boundaries.append(len(subjects))

        for start, end in zip(boundaries, boundaries[1:]):
            channels = {name: _deoverlap(signals[name][start:end]) for name in SIGNALS}
            n = len(channels[SIGNALS[0]])
            data = SessionData(
                timestamps=np.arange(n, dtype=np.int64) * STEP_US,
                channels=channels,
            )
            meta = SessionMetadata(
                session_id=session_id,
                subject_id=int(subjects[start]),
                activity_id=int(labels[start]) - 1,
            )
            sessions.append((meta, data))
            session_id += 1

    return ParseResult(activities=activities, sessions=sessions)


UCI_HAR_PARSER = Parser(parser_id="uci_har", parser_version=1, parse=parse_uci_har)
