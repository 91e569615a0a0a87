"""Dataset handle and batch loaders over the preprocessing engine."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from wharkit.builtins import BUILTIN_CONFIGS, get_builtin_config
from wharkit.config import NormalizationMode, WharConfig, load_config_file
from wharkit.model import DatasetIndex
from wharkit.pipeline import run_all
from wharkit.splits import SplitSpec, split_given
from wharkit.storage import DatasetLayout, WindowStore, open_window_store
from wharkit.transforms import NormStats, apply_normalization, compute_class_weights, compute_norm_stats


@dataclass
class DatasetHandle:
    cfg: WharConfig
    layout: DatasetLayout
    index: DatasetIndex
    store: WindowStore
    split: SplitSpec
    _train_stats: NormStats | None = None

    def train_stats(self) -> NormStats | None:
        """Training-partition statistics, computed lazily for global modes."""
        if self.cfg.normalization in (
            NormalizationMode.MIN_MAX_GLOBAL,
            NormalizationMode.STD_GLOBAL,
            NormalizationMode.ROBUST_GLOBAL,
        ):
            if self._train_stats is None:
                self._train_stats = compute_norm_stats(
                    self.store.get(wid) for wid in self.split.train_window_ids
                )
            return self._train_stats
        return None


def load_dataset(source: str | Path, override_cache: bool = False) -> DatasetHandle:
    """Open a dataset by config path or built-in id, running the pipeline.

    override_cache forces a full rerun; otherwise cached stages are reused.
    The window store mode follows cfg.in_memory (preload vs on-demand).
    """
    if isinstance(source, Path) or str(source) not in BUILTIN_CONFIGS:
        cfg = load_config_file(source)
    else:
        cfg = get_builtin_config(str(source))
    index = run_all(cfg, force=override_cache)
    layout = DatasetLayout.from_config(cfg)
    mode = WindowStore.PRELOAD if cfg.in_memory else WindowStore.ON_DEMAND
    store = open_window_store(layout, mode)
    split = split_given(index, cfg)
    return DatasetHandle(cfg=cfg, layout=layout, index=index, store=store, split=split)


class BatchLoader:
    """Deterministic (windows, labels) batch iterator over one partition.

    Order is a seeded permutation fixed at construction; every epoch
    iterates the same sequence. Batch shape is
    (<= batch_size, window_len, num_channels) with int64 labels.
    """

    def __init__(self, handle: DatasetHandle, window_ids: tuple[str, ...], batch_size: int, seed: int):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        order = np.random.default_rng(seed).permutation(len(window_ids))
        self.window_ids = tuple(window_ids[i] for i in order)
        self.batch_size = batch_size
        self._handle = handle

    def __len__(self) -> int:
        return math.ceil(len(self.window_ids) / self.batch_size)

    def __iter__(self):
        handle = self._handle
        stats = handle.train_stats()
        mode = handle.cfg.normalization
        for start in range(0, len(self.window_ids), self.batch_size):
            chunk = self.window_ids[start : start + self.batch_size]
            windows = [
                apply_normalization(handle.store.get(wid), mode, stats) for wid in chunk
            ]
            labels = np.array([handle.index.labels[wid] for wid in chunk], dtype=np.int64)
            yield np.stack([w.values for w in windows]), labels


def get_split_iterators(
    handle: DatasetHandle, batch_size: int
) -> tuple[BatchLoader, BatchLoader, BatchLoader]:
    """(train, val, test) loaders; windows normalized per cfg.normalization
    with global statistics taken from the train partition only."""
    seed = handle.cfg.seed
    return (
        BatchLoader(handle, handle.split.train_window_ids, batch_size, seed),
        BatchLoader(handle, handle.split.val_window_ids, batch_size, seed),
        BatchLoader(handle, handle.split.test_window_ids, batch_size, seed),
    )


def get_class_weights(handle: DatasetHandle) -> list[float]:
    """Training-set class weights ordered by activity_id."""
    weights = compute_class_weights(handle.index.labels, handle.split.train_window_ids)
    return [weights[k] for k in sorted(weights)]
