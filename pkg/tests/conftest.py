"""Shared fixtures: config dicts, mini raw archives, synthetic datasets."""

from __future__ import annotations

import zipfile
from pathlib import Path

import numpy as np
import pytest

from wharkit.parsers.uci_har import ROW_LEN, SIGNALS

UCI_ACTIVITY_LABELS = [
    (1, "WALKING"),
    (2, "WALKING_UPSTAIRS"),
    (3, "WALKING_DOWNSTAIRS"),
    (4, "SITTING"),
    (5, "STANDING"),
    (6, "LAYING"),
]


def example_config_dict(**overrides) -> dict:
    """Config mirroring the canonical example: 30 subjects, 50 Hz, 2.56 s
    windows with 50% overlap, subjects 0-23 train / 24-29 test, six
    cross-validation groups of five."""
    raw = dict(
        dataset_id="example",
        download_url="example.zip",
        sampling_freq=50,
        num_of_subjects=30,
        num_of_activities=6,
        num_of_channels=9,
        datasets_dir="./datasets",
        parser_id="uci_har",
        activity_names=["walking", "sitting", "laying"],
        sensor_channels=["acc_x", "acc_y", "acc_z"],
        window_time=2.56,
        window_overlap=0.5,
        in_parallel=True,
        resampling_freq=None,
        given_train_subj_ids=list(range(0, 24)),
        given_test_subj_ids=list(range(24, 30)),
        subj_cross_val_split_groups=[list(range(5 * g, 5 * g + 5)) for g in range(6)],
        val_percentage=0.1,
        normalization="std_global",
        in_memory=True,
        seed=0,
        batch_size=64,
        learning_rate=1e-4,
        num_epochs=100,
    )
    raw.update(overrides)
    return raw


def overlapping_rows(start: float, count: int) -> np.ndarray:
    """Rows of 128 consecutive values advancing by 64 per row, i.e. a true
    50%-overlap windowing of the ramp start, start+1, ..."""
    return np.stack([np.arange(start + 64 * i, start + 64 * i + ROW_LEN) for i in range(count)])


def write_uci_fixture(root: Path, rows: list[tuple[int, int]], split_sizes: dict[str, int] | None = None) -> Path:
    """Build a miniature raw archive tree.

    rows: list of (subject, label) per 128-sample row, assigned to the train
    split unless split_sizes says otherwise. Signal values are overlapping
    ramps so de-overlap output is predictable; each signal channel is offset
    by its index.
    """
    dataset_root = root / "UCI HAR Dataset"
    dataset_root.mkdir(parents=True, exist_ok=True)
    labels_txt = "\n".join(f"{i} {name}" for i, name in UCI_ACTIVITY_LABELS) + "\n"
    (dataset_root / "activity_labels.txt").write_text(labels_txt)

    split_sizes = split_sizes or {"train": len(rows), "test": 0}
    assert sum(split_sizes.values()) == len(rows)

    offset = 0
    for split in ("train", "test"):
        n = split_sizes.get(split, 0)
        chunk = rows[offset : offset + n]
        offset += n
        split_dir = dataset_root / split
        (split_dir / "Inertial Signals").mkdir(parents=True, exist_ok=True)
        subjects = [s for s, _ in chunk]
        labels = [l for _, l in chunk]
        (split_dir / f"subject_{split}.txt").write_text("".join(f"{s}\n" for s in subjects))
        (split_dir / f"y_{split}.txt").write_text("".join(f"{l}\n" for l in labels))

        # each row restarts its ramp at 1000*row_index so runs of rows from
        # the same session stitch into one continuous ramp
        base = np.zeros((n, ROW_LEN))
        row_starts = []
        run_start = 0
        for i in range(n):
            if i > 0 and chunk[i] == chunk[i - 1]:
                run_start += 64
            else:
                run_start = 1000.0 * i
            row_starts.append(run_start)
        for i, s in enumerate(row_starts):
            base[i] = np.arange(s, s + ROW_LEN)

        for ci, name in enumerate(SIGNALS):
            sig = base + ci * 10000.0
            lines = "\n".join(" ".join(f"{v: .7e}" for v in row) for row in sig)
            (split_dir / "Inertial Signals" / f"{name}_{split}.txt").write_text(lines + "\n")
    return dataset_root


def zip_tree(tree: Path, archive: Path) -> Path:
    with zipfile.ZipFile(archive, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for path in sorted(tree.rglob("*")):
            if path.is_file():
                zf.write(path, path.relative_to(tree.parent))
    return archive


def write_wisdm_fixture(root: Path, lines: list[str], name: str = "WISDM_ar_v1.1_raw.txt") -> Path:
    root.mkdir(parents=True, exist_ok=True)
    path = root / name
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def synthetic_dataset(tmp_path):
    """Small ready-to-run synthetic dataset: 2 subjects x 3 activities,
    12 s @ 50 Hz, 3 channels, seed 0."""
    from wharkit.parsers import write_synthetic_dataset

    config_path, archive_path = write_synthetic_dataset(
        out_dir=tmp_path / "syn",
        num_subjects=2,
        num_activities=3,
        duration_s=12.0,
        freq=50.0,
        num_channels=3,
        seed=0,
    )
    return config_path


@pytest.fixture
def synthetic_cfg(synthetic_dataset):
    from wharkit.config import load_config_file

    return load_config_file(synthetic_dataset)
