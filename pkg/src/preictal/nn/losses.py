"""Reconstruction loss."""
from __future__ import annotations

import numpy as np

from ..errors import DataError


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean of squared elementwise differences and its gradient w.r.t. pred."""
    if pred.shape != target.shape:
        raise DataError(f"mse_loss shape mismatch: pred {pred.shape} vs target {target.shape}")
    diff = pred - target
    loss = float(np.mean(diff * diff))
    return loss, (2.0 / diff.size) * diff
