"""Parser for the semicolon-terminated accelerometer log format.

Raw lines look like `user,activity,timestamp,x,y,z;` and the file is known
dirty: blank lines, trailing semicolons, missing fields, duplicate and
backwards timestamps. Lines that yield no valid record are skipped and
counted; more than MAX_MALFORMED_FRACTION of them fails the parse.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..config import WharConfig
from ..model import ActivityMetadata, SessionData, SessionMetadata
from .base import Issue, ParseResult, Parser, ParserError

ACTIVITIES = ("walking", "jogging", "upstairs", "downstairs", "sitting", "standing")
ACTIVITY_IDS = {name: i for i, name in enumerate(ACTIVITIES)}

MAX_MALFORMED_FRACTION = 0.10
NS_PER_US = 1000  # raw timestamps are nanoseconds
MIN_SESSION_ROWS = 2

RAW_FILENAME = "WISDM_ar_v1.1_raw.txt"


def _find_raw_file(raw_dir: Path) -> Path:
    exact = sorted(raw_dir.rglob(RAW_FILENAME))
    if exact:
        return exact[0]
    candidates = sorted(raw_dir.rglob("*_raw.txt"))
    if candidates:
        return candidates[0]
    raise ParserError(f"no raw accelerometer log found under {raw_dir}")


def _parse_record(chunk: str) -> tuple[int, str, int, float, float, float] | None:
    parts = chunk.split(",")
    if len(parts) != 6:
        return None
    try:
        user = int(parts[0])
        ts = int(float(parts[2]))
        x, y, z = float(parts[3]), float(parts[4]), float(parts[5])
    except ValueError:
        return None
    activity = parts[1].strip().lower()
    if activity not in ACTIVITY_IDS or user < 0:
        return None
    if np.isnan(x) or np.isnan(y) or np.isnan(z):
        return None
    return user, activity, ts, x, y, z


def parse_wisdm(raw_dir: Path, cfg: WharConfig) -> ParseResult:
    path = _find_raw_file(Path(raw_dir))
    try:
        text = path.read_text(errors="replace")
    except OSError as e:
        raise ParserError(f"cannot read {path}: {e}") from e

    records: list[tuple[int, str, int, float, float, float]] = []
    issues: list[Issue] = []
    lines = text.splitlines()
    skipped = 0
    for lineno, line in enumerate(lines, start=1):
        chunks = [c.strip() for c in line.strip().split(";")]
        parsed = [r for r in (_parse_record(c) for c in chunks if c) if r is not None]
        if not parsed:
            skipped += 1
            reason = "blank line" if not line.strip().strip(";") else "malformed line"
            issues.append(Issue("warning", f"line {lineno}", f"skipped: {reason}"))
            continue
        records.extend(parsed)

    if lines and skipped / len(lines) > MAX_MALFORMED_FRACTION:
        raise ParserError(
            f"{skipped}/{len(lines)} lines malformed "
            f"(> {MAX_MALFORMED_FRACTION:.0%} threshold)"
        )
    if not records:
        raise ParserError(f"no valid records in {path}")

    activities = [ActivityMetadata(activity_id=i, activity_name=n) for n, i in ACTIVITY_IDS.items()]

    # sessions are maximal runs of constant (user, activity) in file order
    sessions: list[tuple[SessionMetadata, SessionData]] = []
    session_id = 0
    start = 0
    for i in range(1, len(records) + 1):
        if i < len(records) and records[i][:2] == records[start][:2]:
            continue
        run = records[start:i]
        start = i

        ts_us = np.array([r[2] // NS_PER_US for r in run], dtype=np.int64)
        ts_us = ts_us - ts_us[0]
        xyz = np.array([(r[3], r[4], r[5]) for r in run], dtype=np.float32)

        # drop any sample whose timestamp does not advance (duplicates keep
        # the earlier sample; backwards glitches are dropped too)
        keep = np.ones(len(ts_us), dtype=bool)
        last = ts_us[0]
        for j in range(1, len(ts_us)):
            if ts_us[j] <= last:
                keep[j] = False
            else:
                last = ts_us[j]
        dropped = int((~keep).sum())
        user, activity = run[0][0], run[0][1]
        if dropped:
            issues.append(
                Issue(
                    "warning",
                    f"subject {user}, activity {activity}",
                    f"dropped {dropped} non-advancing timestamp(s)",
                )
            )
        ts_us, xyz = ts_us[keep], xyz[keep]

        if len(ts_us) < MIN_SESSION_ROWS:
            issues.append(
                Issue(
                    "warning",
                    f"subject {user}, activity {activity}",
                    f"session shorter than {MIN_SESSION_ROWS} rows after cleaning, dropped",
                )
            )
            continue

        data = SessionData(
            timestamps=ts_us,
            channels={"acc_x": xyz[:, 0], "acc_y": xyz[:, 1], "acc_z": xyz[:, 2]},
        )
        meta = SessionMetadata(
            session_id=session_id, subject_id=user, activity_id=ACTIVITY_IDS[activity]
        )
        sessions.append((meta, data))
        session_id += 1

    return ParseResult(activities=activities, sessions=sessions, issues=issues)


WISDM_PARSER = Parser(parser_id="wisdm", parser_version=1, parse=parse_wisdm)
