"""Dataset parsers: raw downloads -> standardized session format.

Parsers are registered by id; a config's parser_id selects one. Each parser
is deterministic: identical raw bytes and config produce identical output,
including session_id assignment (sequential from 0 in emission order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import WharConfig
from .base import (
    Issue,
    ParseResult,
    Parser,
    ParserError,
    ParserNotImplementedError,
    get_parser,
    register,
    registered_parsers,
    stub_parser,
)
from .synthetic import SYNTHETIC_PARSER, generate_synthetic, parse_synthetic, write_synthetic_dataset
from .uci_har import UCI_HAR_PARSER, parse_uci_har
from .wisdm import WISDM_PARSER, parse_wisdm

register(UCI_HAR_PARSER)
register(WISDM_PARSER)
register(SYNTHETIC_PARSER)
for _dataset in ("mhealth", "pamap2", "opportunity", "motion_sense", "dsads", "daphnet", "harsense"):
    register(stub_parser(_dataset))


@dataclass
class ValidationReport:
    ok: bool
    issues: list[Issue]

    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]


def validate_standardized(result: ParseResult, cfg: WharConfig) -> ValidationReport:
    """Check parser output against the standardized-format constraints.

    Errors: short/empty sessions, non-monotonic timestamps, missing values,
    configured sensor channels absent, dangling activity references, more
    distinct activities or subjects than the config declares. Parser
    cleaning warnings are carried through.
    """
    issues: list[Issue] = list(result.issues)
    declared_ids = {a.activity_id for a in result.activities}
    wanted = set(cfg.sensor_channels)

    subjects: set[int] = set()
    seen_activity_ids: set[int] = set()
    for meta, data in result.sessions:
        loc = f"session {meta.session_id}"
        subjects.add(meta.subject_id)
        seen_activity_ids.add(meta.activity_id)

        if meta.subject_id < 0:
            issues.append(Issue("error", loc, f"negative subject_id {meta.subject_id}"))
        if meta.activity_id not in declared_ids:
            issues.append(
                Issue("error", loc, f"activity_id {meta.activity_id} not in activities table")
            )

        n = len(data)
        if n < 2:
            issues.append(Issue("error", loc, f"has {n} rows, need at least 2"))
            continue
        if data.timestamps[0] != 0:
            issues.append(Issue("error", loc, f"timestamps start at {data.timestamps[0]}, not 0"))
        if not np.all(np.diff(data.timestamps) > 0):
            issues.append(Issue("error", loc, "timestamps not strictly increasing"))
        for name, col in data.channels.items():
            if len(col) != n:
                issues.append(Issue("error", f"{loc}, channel {name}", "length mismatch"))
            elif np.isnan(col).any():
                issues.append(Issue("error", f"{loc}, channel {name}", "missing values"))
        missing = wanted - set(data.channel_names)
        if missing:
            issues.append(Issue("error", loc, f"missing configured channels {sorted(missing)}"))

    if len(seen_activity_ids) > cfg.num_of_activities:
        issues.append(
            Issue(
                "error",
                "activities",
                f"{len(seen_activity_ids)} distinct activities exceed declared "
                f"num_of_activities={cfg.num_of_activities}",
            )
        )
    if len(subjects) > cfg.num_of_subjects:
        issues.append(
            Issue(
                "error",
                "subjects",
                f"{len(subjects)} distinct subjects exceed declared "
                f"num_of_subjects={cfg.num_of_subjects}",
            )
        )

    unknown_names = set(cfg.activity_names) - {a.activity_name for a in result.activities}
    if unknown_names:
        issues.append(
            Issue(
                "warning",
                "activities",
                f"configured activity_names {sorted(unknown_names)} never emitted by the parser",
            )
        )

    return ValidationReport(ok=not any(i.severity == "error" for i in issues), issues=issues)


__all__ = [
    "Issue",
    "ParseResult",
    "Parser",
    "ParserError",
    "ParserNotImplementedError",
    "ValidationReport",
    "generate_synthetic",
    "get_parser",
    "parse_synthetic",
    "parse_uci_har",
    "parse_wisdm",
    "register",
    "registered_parsers",
    "validate_standardized",
    "write_synthetic_dataset",
]
