"""Minimal float64 neural-network kernel with reverse-mode gradients.

Deterministic by construction: parameter init and dropout masks come from
seeded PCG64 generators (numpy default_rng), training is single-threaded,
so a fixed seed reproduces parameters bit-for-bit.
"""
import numpy as np

from .layers import (BatchNorm, Conv1d, Dense, Dropout, FeedForward, Layer,
                     LayerNorm, Lstm, MeanPoolTime, MultiHeadAttention, Relu,
                     RepeatVector, Sequential, TakeLast,
                     TransformerEncoderLayer, glorot, softmax)
from .losses import mse_loss
from .optim import AdamState, adam_step
from .params_io import dump_arrays, load_arrays, load_params, save_params


def make_rng(seed: int) -> np.random.Generator:
    """Seedable deterministic generator (PCG64) used for init and dropout."""
    return np.random.default_rng(seed)


__all__ = [
    "Layer", "Sequential", "Dense", "Relu", "Dropout", "Conv1d", "Lstm",
    "MultiHeadAttention", "BatchNorm", "LayerNorm", "FeedForward",
    "TakeLast", "MeanPoolTime", "RepeatVector", "TransformerEncoderLayer",
    "softmax", "glorot", "mse_loss", "AdamState", "adam_step",
    "dump_arrays", "load_arrays", "save_params", "load_params", "make_rng",
]
