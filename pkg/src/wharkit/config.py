"""Dataset-agnostic configuration schema, validation, and stage hashing.

A WharConfig drives every stage of the pipeline. Stage hashes digest exactly
the fields that influence a stage, so caches invalidate precisely when a
contributing field changes and never otherwise.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

# the single supported environment override: redirects dataset artifacts
DATASETS_DIR_ENV = "WHARKIT_DATASETS_DIR"


class NormalizationMode(str, Enum):
    NONE = "none"
    MIN_MAX_PER_WINDOW = "min_max_per_window"
    MIN_MAX_GLOBAL = "min_max_global"
    STD_PER_WINDOW = "std_per_window"
    STD_GLOBAL = "std_global"
    ROBUST_PER_WINDOW = "robust_per_window"
    ROBUST_GLOBAL = "robust_global"


class Stage(str, Enum):
    DOWNLOAD = "download"
    STANDARDIZE = "standardize"
    WINDOWING = "windowing"


class ConfigValidationError(ValueError):
    """Carries every violation found, as (field_path, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        lines = "; ".join(f"{path}: {msg}" for path, msg in errors)
        super().__init__(f"invalid config ({len(errors)} error(s)): {lines}")


def _duplicates(items: list) -> list:
    seen, dups = set(), []
    for x in items:
        if x in seen and x not in dups:
            dups.append(x)
        seen.add(x)
    return dups


class WharConfig(BaseModel):
    model_config = ConfigDict(validate_assignment=True)

    # info
    dataset_id: str = Field(min_length=1)
    download_url: str = Field(min_length=1)
    sampling_freq: float = Field(gt=0)
    num_of_subjects: int = Field(gt=0)
    num_of_activities: int = Field(gt=0)
    num_of_channels: int = Field(gt=0)
    datasets_dir: str = "./datasets"

    # parsing
    parser_id: str = Field(min_length=1)

    # preprocessing
    activity_names: list[str]
    sensor_channels: list[str]
    window_time: float = Field(gt=0)
    window_overlap: float = Field(ge=0, lt=1)
    in_parallel: bool = True
    resampling_freq: float | None = None

    # training (validated, surfaced to bindings, unused by the pipeline)
    given_train_subj_ids: list[int] = Field(default_factory=list)
    given_test_subj_ids: list[int] = Field(default_factory=list)
    subj_cross_val_split_groups: list[list[int]] = Field(default_factory=list)
    val_percentage: float = Field(default=0.1, ge=0, lt=1)
    normalization: NormalizationMode = NormalizationMode.NONE
    in_memory: bool = True
    seed: int = Field(default=0, ge=0)
    batch_size: int = Field(default=64, gt=0)
    learning_rate: float = Field(default=1e-4, gt=0)
    num_epochs: int = Field(default=100, gt=0)

    @model_validator(mode="after")
    def _cross_field(self, info):
        # validate_config defers this so it can report every violation itself
        if info.context and info.context.get("defer_cross_field"):
            return self
        issues = cross_field_issues(self)
        if issues:
            raise ValueError("; ".join(f"{path}: {msg}" for path, msg in issues))
        return self

    def dataset_root(self) -> Path:
        return Path(self.datasets_dir) / self.dataset_id

    @property
    def effective_freq(self) -> float:
        return self.resampling_freq if self.resampling_freq is not None else self.sampling_freq


def cross_field_issues(cfg: WharConfig) -> list[tuple[str, str]]:
    """All cross-field invariant violations as (field_path, message) pairs."""
    issues: list[tuple[str, str]] = []

    if not cfg.activity_names:
        issues.append(("activity_names", "must be non-empty"))
    elif dups := _duplicates(cfg.activity_names):
        issues.append(("activity_names", f"duplicate entries {dups}"))

    if not cfg.sensor_channels:
        issues.append(("sensor_channels", "must be non-empty"))
    elif dups := _duplicates(cfg.sensor_channels):
        issues.append(("sensor_channels", f"duplicate entries {dups}"))

    if cfg.resampling_freq is not None and cfg.resampling_freq <= 0:
        issues.append(("resampling_freq", "must be > 0 when set"))

    overlap = set(cfg.given_train_subj_ids) & set(cfg.given_test_subj_ids)
    if overlap:
        issues.append(
            ("given_train_subj_ids", f"train/test subject overlap {sorted(overlap)}")
        )

    seen: set[int] = set()
    for i, group in enumerate(cfg.subj_cross_val_split_groups):
        clash = seen & set(group)
        if clash:
            issues.append(
                (
                    f"subj_cross_val_split_groups[{i}]",
                    f"subjects {sorted(clash)} appear in more than one group",
                )
            )
        seen.update(group)

    return issues


def validate_config(raw: Mapping[str, Any] | WharConfig) -> WharConfig:
    """Validate a raw key-value document into a WharConfig.

    Raises ConfigValidationError listing every violation (field path +
    message), not just the first. Validating an already-valid config is the
    identity.
    """
    if isinstance(raw, WharConfig):
        raw = raw.model_dump(mode="json")
    try:
        cfg = WharConfig.model_validate(raw, context={"defer_cross_field": True})
    except ValidationError as e:
        errors = [
            (".".join(str(part) for part in err["loc"]) or "<root>", err["msg"])
            for err in e.errors()
        ]
        raise ConfigValidationError(errors) from None
    issues = cross_field_issues(cfg)
    if issues:
        raise ConfigValidationError(issues)
    return cfg


def apply_env_overrides(cfg: WharConfig) -> WharConfig:
    """Apply WHARKIT_DATASETS_DIR when set; the only supported override."""
    datasets_dir = os.environ.get(DATASETS_DIR_ENV)
    if datasets_dir:
        return validate_config(dict(cfg.model_dump(mode="json"), datasets_dir=datasets_dir))
    return cfg


def load_config_file(path: str | Path) -> WharConfig:
    """Load and validate a YAML config document from disk."""
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    if not isinstance(raw, dict):
        raise ConfigValidationError([("<root>", "config file must be a key-value document")])
    return apply_env_overrides(validate_config(raw))


def save_config_file(cfg: WharConfig, path: str | Path) -> None:
    data = cfg.model_dump(mode="json")
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=False)


# ---------------------------------------------------------------------------
# Stage hashing


@dataclass(frozen=True)
class StageHash:
    stage: Stage
    digest: str  # 64-hex-char sha256


def _canonical(obj: Any) -> str:
    # lexicographically sorted keys, order-preserving lists, shortest
    # round-trip decimals (json repr of Python floats)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _sha256(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def stage_hash(cfg: WharConfig, stage: Stage | str) -> StageHash:
    """Digest over exactly the fields that influence the given stage.

    download    <- {dataset_id, download_url}
    standardize <- download digest + {parser_id, parser_version}
    windowing   <- standardize digest + {activity_names, sensor_channels,
                   resampling_freq, window_time, window_overlap}
    """
    stage = Stage(stage)
    download = _sha256(
        _canonical({"dataset_id": cfg.dataset_id, "download_url": cfg.download_url})
    )
    if stage is Stage.DOWNLOAD:
        return StageHash(stage, download)

    from .parsers import get_parser  # late import: parsers depend on config

    standardize = _sha256(
        _canonical(
            {
                "download": download,
                "parser_id": cfg.parser_id,
                "parser_version": get_parser(cfg.parser_id).parser_version,
            }
        )
    )
    if stage is Stage.STANDARDIZE:
        return StageHash(stage, standardize)

    windowing = _sha256(
        _canonical(
            {
                "standardize": standardize,
                "activity_names": cfg.activity_names,
                "sensor_channels": cfg.sensor_channels,
                "resampling_freq": cfg.resampling_freq,
                "window_time": cfg.window_time,
                "window_overlap": cfg.window_overlap,
            }
        )
    )
    return StageHash(Stage.WINDOWING, windowing)
