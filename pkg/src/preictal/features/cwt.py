"""Mexican-hat continuous wavelet transform and its squared-energy scalogram."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from ..errors import DataError

N_SCALES = 128        # integer scales 1..128
TIME_STRIDE = 4       # scalogram time axis keeps every 4th translation
KERNEL_HALF_WIDTH = 8  # kernel sampled on [-8a, 8a]; |psi| < 1e-12 beyond


def mexican_hat(t: np.ndarray) -> np.ndarray:
    """psi(t) = (1 - t^2) exp(-t^2 / 2); real and even, so the conjugated,
    time-reversed convolution kernel is psi itself."""
    t = np.asarray(t, dtype=np.float64)
    return (1.0 - t * t) * np.exp(-0.5 * t * t)


@lru_cache(maxsize=N_SCALES)
def _kernel(scale: int) -> np.ndarray:
    m = np.arange(-KERNEL_HALF_WIDTH * scale, KERNEL_HALF_WIDTH * scale + 1)
    k = mexican_hat(m / scale) / np.sqrt(scale)
    k.flags.writeable = False
    return k


@dataclass(frozen=True)
class Scalogram:
    """Energy E(a, b) = C(a, b)^2 over integer scales a (rows) and strided
    translations b (columns)."""
    values: np.ndarray
    scales: np.ndarray
    time_stride: int = TIME_STRIDE


def cwt_transform(segment_samples: np.ndarray, scales: np.ndarray | None = None) -> np.ndarray:
    """Pre-squared transform C(a, b) at every translation (no time stride).

    Row a: discrete convolution of the signal with the unit-step-sampled,
    1/sqrt(a)-normalized kernel, zero-padded at the edges.
    """
    x = np.asarray(segment_samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DataError("cwt expects a non-empty 1-d segment")
    if scales is None:
        scales = np.arange(1, N_SCALES + 1)
    out = np.empty((len(scales), len(x)))
    for i, a in enumerate(scales):
        out[i] = fftconvolve(x, _kernel(int(a)), mode="same")
    return out


def cwt_scalogram(segment_samples: np.ndarray) -> Scalogram:
    """Scalogram over scales 1..128 with the time axis strided by 4;
    shape (128, ceil(N/4))."""
    scales = np.arange(1, N_SCALES + 1)
    c = cwt_transform(segment_samples, scales)
    energy = np.square(c[:, ::TIME_STRIDE])
    return Scalogram(values=energy, scales=scales)
