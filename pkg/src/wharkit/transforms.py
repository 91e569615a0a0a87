"""Per-session and per-window operations.

Activity filtering, channel selection, linear-interpolation resampling,
sliding-window segmentation, normalization statistics, and class weighting.
All functions are pure and safe to apply to disjoint sessions concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import NormalizationMode
from .model import ActivityMetadata, SessionData, SessionMetadata, Window, WindowMetadata, window_id_for

EPSILON = 1e-8

MICROS_PER_SECOND = 1_000_000


def _round_half_away(x: float) -> int:
    # round-half-away-from-zero; python's round() is banker's
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def filter_activities(
    sessions: Sequence[SessionMetadata],
    activities: Sequence[ActivityMetadata],
    activity_names: Sequence[str],
) -> tuple[list[SessionMetadata], list[ActivityMetadata]]:
    """Keep exactly the sessions whose activity name is in activity_names.

    Returns (kept sessions, pruned activities table); activity ids are
    preserved, never renumbered. Unknown names raise KeyError listing the
    known ones.
    """
    by_name = {a.activity_name: a for a in activities}
    unknown = [name for name in activity_names if name not in by_name]
    if unknown:
        raise KeyError(
            f"unknown activity names {unknown}; known: {sorted(by_name)}"
        )
    keep_ids = {by_name[name].activity_id for name in activity_names}
    kept_sessions = [s for s in sessions if s.activity_id in keep_ids]
    kept_activities = [a for a in activities if a.activity_id in keep_ids]
    return kept_sessions, kept_activities


def select_channels(session: SessionData, sensor_channels: Sequence[str]) -> SessionData:
    """Reorder/prune columns to exactly sensor_channels order."""
    missing = [c for c in sensor_channels if c not in session.channels]
    if missing:
        raise KeyError(
            f"requested channels {missing} absent; session has {list(session.channels)}"
        )
    if tuple(sensor_channels) == session.channel_names:
        return session
    return SessionData(
        timestamps=session.timestamps,
        channels={c: session.channels[c] for c in sensor_channels},
    )


def resample(session: SessionData, target_freq: float) -> SessionData:
    """Re-grid a session onto a uniform target_freq grid by linear interpolation.

    Grid points are t_i = i * round(1e6 / target_freq) microseconds for all
    t_i <= the last original timestamp. If the session already sits exactly
    on that grid the input is returned unchanged.
    """
    if target_freq <= 0:
        raise ValueError(f"target_freq must be > 0, got {target_freq}")
    if len(session) < 2:
        raise ValueError(f"resampling needs at least 2 rows, got {len(session)}")

    step = _round_half_away(MICROS_PER_SECOND / target_freq)
    if step < 1:
        raise ValueError(f"target_freq {target_freq} exceeds microsecond resolution")
    last = int(session.timestamps[-1])
    grid = np.arange(0, last + 1, step, dtype=np.int64)
    if np.array_equal(grid, session.timestamps):
        return session

    src_t = session.timestamps.astype(np.float64)
    dst_t = grid.astype(np.float64)
    channels = {
        name: np.interp(dst_t, src_t, col.astype(np.float64)).astype(np.float32)
        for name, col in session.channels.items()
    }
    return SessionData(timestamps=grid, channels=channels)


def window_len_for(window_time: float, effective_freq: float) -> int:
    return _round_half_away(window_time * effective_freq)


def stride_for(window_len: int, window_overlap: float) -> int:
    # floored at 1 so overlap -> 1 can never produce a zero stride
    return max(1, _round_half_away(window_len * (1.0 - window_overlap)))


def window_count(n: int, window_len: int, stride: int) -> int:
    if n < window_len:
        return 0
    return (n - window_len) // stride + 1


def generate_windows(
    session: SessionData,
    session_id: int,
    window_time: float,
    window_overlap: float,
    effective_freq: float,
) -> tuple[list[Window], list[WindowMetadata]]:
    """Slice a session into fixed-length windows.

    Windows start at sample offsets 0, stride, 2*stride, ...; a trailing
    partial window is dropped. window_len = round(window_time *
    effective_freq), stride = max(1, round(window_len * (1 - overlap))).
    """
    window_len = window_len_for(window_time, effective_freq)
    if window_len < 1:
        raise ValueError(
            f"window_time {window_time} at {effective_freq} Hz gives window_len < 1"
        )
    stride = stride_for(window_len, window_overlap)
    n = len(session)
    count = window_count(n, window_len, stride)

    names = session.channel_names
    if not names:
        raise ValueError("session has no channels to window")
    matrix = np.column_stack([session.channels[c] for c in names])
    windows: list[Window] = []
    metadata: list[WindowMetadata] = []
    for i in range(count):
        start = i * stride
        values = np.array(matrix[start : start + window_len], dtype=np.float32)
        windows.append(Window(values=values, channels=names))
        metadata.append(WindowMetadata(window_id=window_id_for(session_id, i), session_id=session_id))
    return windows, metadata


# ---------------------------------------------------------------------------
# Normalization


@dataclass(frozen=True)
class NormStats:
    """Per-channel statistics, float32 values from float64 accumulation."""

    channels: tuple[str, ...]
    min: np.ndarray
    max: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray


def _stats_from_matrix(values: np.ndarray, channels: tuple[str, ...]) -> NormStats:
    data = values.astype(np.float64)
    return NormStats(
        channels=channels,
        min=data.min(axis=0).astype(np.float32),
        max=data.max(axis=0).astype(np.float32),
        mean=data.mean(axis=0).astype(np.float32),
        std=data.std(axis=0).astype(np.float32),  # population std
        median=np.median(data, axis=0).astype(np.float32),
        q25=np.quantile(data, 0.25, axis=0).astype(np.float32),
        q75=np.quantile(data, 0.75, axis=0).astype(np.float32),
    )


def compute_norm_stats(train_windows: Iterable[Window]) -> NormStats:
    """Statistics per channel over the concatenation of all training windows."""
    blocks = []
    channels: tuple[str, ...] | None = None
    for w in train_windows:
        if channels is None:
            channels = w.channels
        elif w.channels != channels:
            raise ValueError(f"window channels {w.channels} != {channels}")
        blocks.append(w.values)
    if not blocks:
        raise ValueError("cannot compute normalization statistics from an empty window set")
    return _stats_from_matrix(np.concatenate(blocks, axis=0), channels)


def apply_normalization(
    w: Window, mode: NormalizationMode | str, stats: NormStats | None = None
) -> Window:
    """Normalize a window per channel.

    min_max: (x - min) / (max - min + eps)
    std:     (x - mean) / (std + eps)
    robust:  (x - median) / ((q75 - q25) + eps)

    Global modes require stats (from the training windows); per-window modes
    compute stats from the window itself. Mode none returns the input
    unchanged, bit for bit.
    """
    mode = NormalizationMode(mode)
    if mode is NormalizationMode.NONE:
        return w

    if mode in (
        NormalizationMode.MIN_MAX_PER_WINDOW,
        NormalizationMode.STD_PER_WINDOW,
        NormalizationMode.ROBUST_PER_WINDOW,
    ):
        stats = _stats_from_matrix(w.values, w.channels)
    elif stats is None:
        raise ValueError(f"mode {mode.value} requires training-set statistics")
    else:
        missing = [c for c in w.channels if c not in stats.channels]
        if missing:
            raise KeyError(f"statistics missing for channels {missing}")
        if stats.channels != w.channels:
            order = [stats.channels.index(c) for c in w.channels]
            stats = NormStats(
                channels=w.channels,
                **{
                    name: getattr(stats, name)[order]
                    for name in ("min", "max", "mean", "std", "median", "q25", "q75")
                },
            )

    x = w.values.astype(np.float64)
    if mode in (NormalizationMode.MIN_MAX_PER_WINDOW, NormalizationMode.MIN_MAX_GLOBAL):
        lo = stats.min.astype(np.float64)
        hi = stats.max.astype(np.float64)
        out = (x - lo) / (hi - lo + EPSILON)
    elif mode in (NormalizationMode.STD_PER_WINDOW, NormalizationMode.STD_GLOBAL):
        out = (x - stats.mean.astype(np.float64)) / (stats.std.astype(np.float64) + EPSILON)
    else:
        med = stats.median.astype(np.float64)
        iqr = stats.q75.astype(np.float64) - stats.q25.astype(np.float64)
        out = (x - med) / (iqr + EPSILON)
    return Window(values=out.astype(np.float32), channels=w.channels)


# ---------------------------------------------------------------------------
# Class weighting


def compute_class_weights(
    labels: Mapping[str, int], train_window_ids: Iterable[str]
) -> dict[int, float]:
    """Balanced inverse-frequency weights over the training windows.

    w_k = N / (K * n_k) with N the training window count, K the number of
    distinct classes present, n_k the count of class k. Weights are defined
    exactly for the classes present in the training windows.
    """
    counts: dict[int, int] = {}
    total = 0
    for wid in train_window_ids:
        counts[labels[wid]] = counts.get(labels[wid], 0) + 1
        total += 1
    if total == 0:
        raise ValueError("cannot compute class weights from an empty training set")
    k = len(counts)
    return {cls: total / (k * n) for cls, n in sorted(counts.items())}
