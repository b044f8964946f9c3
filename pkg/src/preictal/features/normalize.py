"""Per-dimension z-score normalization with statistics fit on a training set."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError

SIGMA_FLOOR = 1e-8


@dataclass(frozen=True)
class NormalizationStats:
    mean: np.ndarray
    std: np.ndarray   # floored at SIGMA_FLOOR

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mean.shape


def fit_normalization(training_features: np.ndarray) -> NormalizationStats:
    """Population mean/std per dimension over axis 0 (the training-set axis)."""
    feats = np.asarray(training_features, dtype=np.float64)
    if feats.ndim < 2 or feats.shape[0] < 2:
        raise DataError("fit_normalization needs at least 2 stacked training features")
    mean = feats.mean(axis=0)
    std = np.maximum(feats.std(axis=0), SIGMA_FLOOR)
    mean.flags.writeable = False
    std.flags.writeable = False
    return NormalizationStats(mean=mean, std=std)


def apply_normalization(features: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    """z = (x - mean) / std, broadcast over any number of leading axes."""
    feats = np.asarray(features, dtype=np.float64)
    if feats.shape[-stats.mean.ndim:] != stats.mean.shape:
        raise DataError(
            f"feature shape {feats.shape} does not end with stats shape {stats.mean.shape}"
        )
    return (feats - stats.mean) / stats.std
