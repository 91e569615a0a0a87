"""Thin adapter exposing preprocessed datasets to deep-learning workflows.

Contains zero preprocessing logic: the engine runs the pipeline and owns
every value; this package only loads configs, triggers runs, and serves
(window, label) batches with splits and class weights.
"""

from .adapter import BatchLoader, DatasetHandle, get_class_weights, get_split_iterators, load_dataset

__all__ = [
    "BatchLoader",
    "DatasetHandle",
    "get_class_weights",
    "get_split_iterators",
    "load_dataset",
]
