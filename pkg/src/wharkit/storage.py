"""On-disk layout and columnar persistence.

Everything lives under {datasets_dir}/{dataset_id}: raw/ for the downloaded
archive, sessions/ and windows/ with one parquet file per entity, metadata/
with the three relational tables, and cache_manifest.json with the per-stage
digests. All writes go through a temp file + rename so a killed process
never leaves a half-written file under its final name.
"""

from __future__ import annotations

import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq

from . import __version__
from .config import Stage, WharConfig
from .model import (
    ActivityMetadata,
    DatasetIndex,
    SessionData,
    SessionMetadata,
    Window,
    WindowMetadata,
    build_index,
)

TIMESTAMP_COLUMN = "timestamp"
MANIFEST_FORMAT_VERSION = 1

# deterministic for fixed input, required for parallel == sequential runs
_PARQUET_OPTS = {"compression": "snappy"}


class StorageError(IOError):
    pass


@dataclass(frozen=True)
class DatasetLayout:
    root: Path

    @classmethod
    def from_config(cls, cfg: WharConfig) -> "DatasetLayout":
        return cls(root=cfg.dataset_root())

    @property
    def raw_dir(self) -> Path:
        return self.root / "raw"

    @property
    def sessions_dir(self) -> Path:
        return self.root / "sessions"

    @property
    def windows_dir(self) -> Path:
        return self.root / "windows"

    @property
    def metadata_dir(self) -> Path:
        return self.root / "metadata"

    @property
    def manifest_path(self) -> Path:
        return self.root / "cache_manifest.json"

    def session_path(self, session_id: int) -> Path:
        return self.sessions_dir / f"session_{session_id}.parquet"

    def window_path(self, window_id: str) -> Path:
        return self.windows_dir / f"window_{window_id}.parquet"

    @property
    def activity_table_path(self) -> Path:
        return self.metadata_dir / "activity_metadata.parquet"

    @property
    def session_table_path(self) -> Path:
        return self.metadata_dir / "session_metadata.parquet"

    @property
    def window_table_path(self) -> Path:
        return self.metadata_dir / "window_metadata.parquet"

    def ensure_dirs(self) -> None:
        for d in (self.root, self.raw_dir, self.sessions_dir, self.windows_dir, self.metadata_dir):
            d.mkdir(parents=True, exist_ok=True)


def _atomic_write_table(table: pa.Table, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        pq.write_table(table, tmp, **_PARQUET_OPTS)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_table(path: Path, what: str) -> pa.Table:
    if not path.exists():
        raise StorageError(f"{what} not found: {path}")
    return pq.read_table(path)


# ---------------------------------------------------------------------------
# Sessions


def write_session(layout: DatasetLayout, session_id: int, data: SessionData) -> None:
    """Persist one session; refuses to write data violating its invariants."""
    data.validate()
    arrays = {TIMESTAMP_COLUMN: pa.array(data.timestamps, type=pa.int64())}
    for name, col in data.channels.items():
        arrays[name] = pa.array(col, type=pa.float32())
    _atomic_write_table(pa.table(arrays), layout.session_path(session_id))


def read_session(layout: DatasetLayout, session_id: int) -> SessionData:
    table = _read_table(layout.session_path(session_id), f"session {session_id}")
    names = [c for c in table.column_names if c != TIMESTAMP_COLUMN]
    return SessionData(
        timestamps=table.column(TIMESTAMP_COLUMN).to_numpy(),
        channels={c: table.column(c).to_numpy() for c in names},
    )


# ---------------------------------------------------------------------------
# Windows


def write_window(layout: DatasetLayout, window_id: str, w: Window) -> None:
    arrays = {name: pa.array(w.values[:, i], type=pa.float32()) for i, name in enumerate(w.channels)}
    _atomic_write_table(pa.table(arrays), layout.window_path(window_id))


def read_window(layout: DatasetLayout, window_id: str) -> Window:
    table = _read_table(layout.window_path(window_id), f"window {window_id}")
    names = tuple(table.column_names)
    values = np.column_stack([table.column(c).to_numpy() for c in names])
    return Window(values=values.astype(np.float32), channels=names)


# ---------------------------------------------------------------------------
# Metadata tables (column names are a stable public contract)


def write_metadata_tables(layout: DatasetLayout, index: DatasetIndex) -> None:
    write_activity_table(layout, index.activities)
    write_session_table(layout, index.sessions)
    write_window_table(layout, index.windows)


def write_activity_table(layout: DatasetLayout, activities) -> None:
    table = pa.table(
        {
            "activity_id": pa.array([a.activity_id for a in activities], type=pa.int64()),
            "activity_name": pa.array([a.activity_name for a in activities], type=pa.string()),
        }
    )
    _atomic_write_table(table, layout.activity_table_path)


def write_session_table(layout: DatasetLayout, sessions) -> None:
    table = pa.table(
        {
            "session_id": pa.array([s.session_id for s in sessions], type=pa.int64()),
            "subject_id": pa.array([s.subject_id for s in sessions], type=pa.int64()),
            "activity_id": pa.array([s.activity_id for s in sessions], type=pa.int64()),
        }
    )
    _atomic_write_table(table, layout.session_table_path)


def write_window_table(layout: DatasetLayout, windows) -> None:
    table = pa.table(
        {
            "window_id": pa.array([w.window_id for w in windows], type=pa.string()),
            "session_id": pa.array([w.session_id for w in windows], type=pa.int64()),
        }
    )
    _atomic_write_table(table, layout.window_table_path)


def read_activity_table(layout: DatasetLayout) -> tuple[ActivityMetadata, ...]:
    table = _read_table(layout.activity_table_path, "activity metadata table")
    return tuple(
        ActivityMetadata(activity_id=int(i), activity_name=str(n))
        for i, n in zip(table.column("activity_id").to_pylist(), table.column("activity_name").to_pylist())
    )


def read_session_table(layout: DatasetLayout) -> tuple[SessionMetadata, ...]:
    table = _read_table(layout.session_table_path, "session metadata table")
    return tuple(
        SessionMetadata(session_id=int(s), subject_id=int(u), activity_id=int(a))
        for s, u, a in zip(
            table.column("session_id").to_pylist(),
            table.column("subject_id").to_pylist(),
            table.column("activity_id").to_pylist(),
        )
    )


def read_window_table(layout: DatasetLayout) -> tuple[WindowMetadata, ...]:
    table = _read_table(layout.window_table_path, "window metadata table")
    return tuple(
        WindowMetadata(window_id=str(w), session_id=int(s))
        for w, s in zip(table.column("window_id").to_pylist(), table.column("session_id").to_pylist())
    )


def read_metadata_tables(layout: DatasetLayout) -> DatasetIndex:
    """Read all three tables and rebuild a verified DatasetIndex."""
    return build_index(
        read_activity_table(layout),
        read_session_table(layout),
        read_window_table(layout),
    )


# ---------------------------------------------------------------------------
# Cache manifest


@dataclass
class CacheManifest:
    format_version: int = MANIFEST_FORMAT_VERSION
    stages: dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__

    def digest_for(self, stage: Stage | str) -> str | None:
        return self.stages.get(Stage(stage).value)


def read_manifest(layout: DatasetLayout) -> CacheManifest:
    """Absent or unreadable manifest reads as empty (stage misses)."""
    try:
        with open(layout.manifest_path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (FileNotFoundError, json.JSONDecodeError):
        return CacheManifest()
    stages = {k: v for k, v in raw.get("stages", {}).items() if k in Stage._value2member_map_}
    return CacheManifest(
        format_version=raw.get("format_version", MANIFEST_FORMAT_VERSION),
        stages=stages,
        tool_version=raw.get("tool_version", __version__),
    )


def write_manifest(layout: DatasetLayout, manifest: CacheManifest) -> None:
    layout.root.mkdir(parents=True, exist_ok=True)
    payload = {
        "format_version": manifest.format_version,
        "stages": manifest.stages,
        "tool_version": manifest.tool_version,
    }
    fd, tmp = tempfile.mkstemp(dir=layout.root, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
        os.replace(tmp, layout.manifest_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def update_manifest(layout: DatasetLayout, stage: Stage | str, digest: str) -> CacheManifest:
    manifest = read_manifest(layout)
    manifest.stages[Stage(stage).value] = digest
    write_manifest(layout, manifest)
    return manifest


def drop_manifest_stage(layout: DatasetLayout, stage: Stage | str) -> None:
    manifest = read_manifest(layout)
    if manifest.stages.pop(Stage(stage).value, None) is not None:
        write_manifest(layout, manifest)


def clear_stage_outputs(layout: DatasetLayout, stage: Stage | str) -> None:
    """Remove a stage's files and its manifest digest before regeneration."""
    stage = Stage(stage)
    drop_manifest_stage(layout, stage)
    if stage is Stage.DOWNLOAD:
        shutil.rmtree(layout.raw_dir, ignore_errors=True)
        layout.raw_dir.mkdir(parents=True, exist_ok=True)
    elif stage is Stage.STANDARDIZE:
        shutil.rmtree(layout.sessions_dir, ignore_errors=True)
        layout.sessions_dir.mkdir(parents=True, exist_ok=True)
        layout.activity_table_path.unlink(missing_ok=True)
        layout.session_table_path.unlink(missing_ok=True)
    else:
        shutil.rmtree(layout.windows_dir, ignore_errors=True)
        layout.windows_dir.mkdir(parents=True, exist_ok=True)
        layout.window_table_path.unlink(missing_ok=True)


# ---------------------------------------------------------------------------
# Window store (preload vs on-demand sample loading)


class WindowStore:
    """Window access by id; preload keeps everything resident, on_demand
    reads exactly one file per get."""

    PRELOAD = "preload"
    ON_DEMAND = "on_demand"

    def __init__(self, layout: DatasetLayout, mode: str, window_ids: tuple[str, ...]):
        if mode not in (self.PRELOAD, self.ON_DEMAND):
            raise ValueError(f"unknown window store mode {mode!r}")
        self.layout = layout
        self.mode = mode
        self.window_ids = window_ids
        self._known = frozenset(window_ids)
        self._cache: dict[str, Window] = {}
        if mode == self.PRELOAD:
            for wid in window_ids:
                self._cache[wid] = read_window(layout, wid)

    def __len__(self) -> int:
        return len(self.window_ids)

    def get(self, window_id: str) -> Window:
        if window_id not in self._known:
            raise KeyError(f"unknown window_id {window_id!r}")
        if self.mode == self.PRELOAD:
            return self._cache[window_id]
        return read_window(self.layout, window_id)


def open_window_store(layout: DatasetLayout, mode: str) -> WindowStore:
    """Open a store over all windows listed in the window metadata table."""
    windows = read_window_table(layout)
    return WindowStore(layout, mode, tuple(w.window_id for w in windows))
