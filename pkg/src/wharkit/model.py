"""In-memory representation of the standardized data format.

Three relational metadata tables (activities, sessions, windows) plus the
session and window payloads. Timestamps are integer microseconds since
session start so resampling grids stay exact and outputs bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class IntegrityError(ValueError):
    """Referential-integrity violation across the metadata tables."""


@dataclass(frozen=True)
class ActivityMetadata:
    activity_id: int
    activity_name: str


@dataclass(frozen=True)
class SessionMetadata:
    session_id: int
    subject_id: int
    activity_id: int


@dataclass(frozen=True)
class WindowMetadata:
    window_id: str  # "{session_id}_{window_index}", window_index 0-based
    session_id: int


def window_id_for(session_id: int, window_index: int) -> str:
    return f"{session_id}_{window_index}"


@dataclass
class SessionData:
    """Timestamp-indexed multivariate time series for one subject/activity.

    timestamps: int64 microseconds since session start, strictly increasing,
    first element 0. channels: float32 column per sensor channel, all the
    same length as timestamps.
    """

    timestamps: np.ndarray
    channels: dict[str, np.ndarray]

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.int64)
        self.channels = {
            name: np.asarray(col, dtype=np.float32) for name, col in self.channels.items()
        }

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def channel_names(self) -> tuple[str, ...]:
        return tuple(self.channels)

    def validate(self) -> None:
        """Raise ValueError on any invariant violation."""
        n = len(self.timestamps)
        if n < 2:
            raise ValueError(f"session has {n} rows, need at least 2")
        if self.timestamps[0] != 0:
            raise ValueError(f"timestamps must start at 0, got {self.timestamps[0]}")
        if not np.all(np.diff(self.timestamps) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not self.channels:
            raise ValueError("session has no channels")
        for name, col in self.channels.items():
            if len(col) != n:
                raise ValueError(
                    f"channel {name!r} has {len(col)} rows, timestamps have {n}"
                )
            if np.isnan(col).any():
                raise ValueError(f"channel {name!r} contains missing values")

    def equals(self, other: "SessionData") -> bool:
        return (
            np.array_equal(self.timestamps, other.timestamps)
            and self.channel_names == other.channel_names
            and all(np.array_equal(self.channels[c], other.channels[c]) for c in self.channels)
        )


@dataclass
class Window:
    """Fixed-length sample block: (window_len, num_channels) float32.

    Column order follows the config's sensor_channels order.
    """

    values: np.ndarray
    channels: tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        self.channels = tuple(self.channels)
        if self.values.ndim != 2:
            raise ValueError(f"window values must be 2-D, got shape {self.values.shape}")
        if self.values.shape[1] != len(self.channels):
            raise ValueError(
                f"{self.values.shape[1]} columns but {len(self.channels)} channel names"
            )

    def __len__(self) -> int:
        return self.values.shape[0]

    def equals(self, other: "Window") -> bool:
        return self.channels == other.channels and np.array_equal(self.values, other.values)


@dataclass
class DatasetIndex:
    """The three metadata tables plus derived label/subject lookups."""

    activities: tuple[ActivityMetadata, ...]
    sessions: tuple[SessionMetadata, ...]
    windows: tuple[WindowMetadata, ...]
    labels: dict[str, int] = field(default_factory=dict)  # window_id -> activity_id
    subjects: dict[str, int] = field(default_factory=dict)  # window_id -> subject_id

    @property
    def activity_names(self) -> dict[int, str]:
        return {a.activity_id: a.activity_name for a in self.activities}

    @property
    def subject_ids(self) -> set[int]:
        return {s.subject_id for s in self.sessions}

    @property
    def window_ids(self) -> tuple[str, ...]:
        return tuple(w.window_id for w in self.windows)


def build_index(
    activities: tuple[ActivityMetadata, ...] | list[ActivityMetadata],
    sessions: tuple[SessionMetadata, ...] | list[SessionMetadata],
    windows: tuple[WindowMetadata, ...] | list[WindowMetadata],
) -> DatasetIndex:
    """Assemble a DatasetIndex, verifying referential integrity.

    Raises IntegrityError naming the offending row on any dangling foreign
    key or duplicate primary key.
    """
    activities = tuple(activities)
    sessions = tuple(sessions)
    windows = tuple(windows)

    activity_ids = set()
    activity_names = set()
    for a in activities:
        if a.activity_id in activity_ids:
            raise IntegrityError(f"duplicate activity_id {a.activity_id}")
        if not a.activity_name:
            raise IntegrityError(f"empty activity_name for activity_id {a.activity_id}")
        if a.activity_name in activity_names:
            raise IntegrityError(f"duplicate activity_name {a.activity_name!r}")
        activity_ids.add(a.activity_id)
        activity_names.add(a.activity_name)

    by_session: dict[int, SessionMetadata] = {}
    for s in sessions:
        if s.session_id in by_session:
            raise IntegrityError(f"duplicate session_id {s.session_id}")
        if s.activity_id not in activity_ids:
            raise IntegrityError(
                f"session {s.session_id}: dangling activity_id {s.activity_id}"
            )
        if s.subject_id < 0:
            raise IntegrityError(f"session {s.session_id}: negative subject_id")
        by_session[s.session_id] = s

    labels: dict[str, int] = {}
    subjects: dict[str, int] = {}
    for w in windows:
        if w.window_id in labels:
            raise IntegrityError(f"duplicate window_id {w.window_id!r}")
        sess = by_session.get(w.session_id)
        if sess is None:
            raise IntegrityError(f"window {w.window_id!r}: dangling session_id {w.session_id}")
        labels[w.window_id] = sess.activity_id
        subjects[w.window_id] = sess.subject_id

    return DatasetIndex(
        activities=activities,
        sessions=sessions,
        windows=windows,
        labels=labels,
        subjects=subjects,
    )
