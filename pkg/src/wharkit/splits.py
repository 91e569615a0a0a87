"""Subject-disjoint train/validation/test partitions and LOSO folds.

Validation is drawn at subject level: ceil(val_percentage * pool size)
subjects taken from a deterministic seeded shuffle of the pool sorted
ascending, so a split is reproducible from the config alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import WharConfig
from .model import DatasetIndex


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    train_subjects: frozenset[int]
    val_subjects: frozenset[int]
    test_subjects: frozenset[int]
    train_window_ids: tuple[str, ...]
    val_window_ids: tuple[str, ...]
    test_window_ids: tuple[str, ...]


def _window_ids_for(index: DatasetIndex, subjects: frozenset[int]) -> tuple[str, ...]:
    # window metadata order (ascending session_id, window_index) is preserved
    return tuple(w.window_id for w in index.windows if index.subjects[w.window_id] in subjects)


def _check_known(index: DatasetIndex, subject_ids: Sequence[int], origin: str) -> None:
    known = index.subject_ids
    missing = sorted(set(subject_ids) - known)
    if missing:
        raise SplitError(f"{origin} references subjects {missing} absent from the data")


def _draw_validation(pool: Sequence[int], val_percentage: float, seed: int) -> tuple[list[int], list[int]]:
    """Split pool into (validation, remainder) via a seeded shuffle."""
    n_val = math.ceil(val_percentage * len(pool))
    order = np.random.default_rng(seed).permutation(sorted(pool))
    val = sorted(int(s) for s in order[:n_val])
    rest = sorted(int(s) for s in order[n_val:])
    return val, rest


def _build_spec(
    index: DatasetIndex, train: Sequence[int], val: Sequence[int], test: Sequence[int]
) -> SplitSpec:
    train_s, val_s, test_s = frozenset(train), frozenset(val), frozenset(test)
    return SplitSpec(
        train_subjects=train_s,
        val_subjects=val_s,
        test_subjects=test_s,
        train_window_ids=_window_ids_for(index, train_s),
        val_window_ids=_window_ids_for(index, val_s),
        test_window_ids=_window_ids_for(index, test_s),
    )


def split_given(index: DatasetIndex, cfg: WharConfig) -> SplitSpec:
    """Fixed split from the config's given train/test subject lists.

    Validation subjects are drawn from the train list; test is taken as
    given. Errors if a listed subject is absent from the data.
    """
    _check_known(index, cfg.given_train_subj_ids, "given_train_subj_ids")
    _check_known(index, cfg.given_test_subj_ids, "given_test_subj_ids")
    val, train = _draw_validation(cfg.given_train_subj_ids, cfg.val_percentage, cfg.seed)
    return _build_spec(index, train, val, cfg.given_test_subj_ids)


def loso_folds(index: DatasetIndex, cfg: WharConfig) -> list[SplitSpec]:
    """One fold per cross-validation group: the group is the test set,
    validation is drawn from the remaining subjects, the rest train."""
    groups = cfg.subj_cross_val_split_groups
    if not groups:
        raise SplitError("subj_cross_val_split_groups is empty")
    seen: set[int] = set()
    for group in groups:
        clash = seen & set(group)
        if clash:
            raise SplitError(f"cross-validation groups overlap on subjects {sorted(clash)}")
        seen.update(group)
    _check_known(index, sorted(seen), "subj_cross_val_split_groups")

    all_subjects = sorted(index.subject_ids)
    folds = []
    for group in groups:
        test = sorted(group)
        rest = [s for s in all_subjects if s not in set(test)]
        val, train = _draw_validation(rest, cfg.val_percentage, cfg.seed)
        folds.append(_build_spec(index, train, val, test))
    return folds
