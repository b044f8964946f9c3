"""Orthogonal wavelet filter bank and periodized multilevel DWT.

The sym4 taps are not hard-coded: they are derived at import time by
spectral factorization of the degree-3 half-band polynomial, picking the
near-symmetric factor (that choice is what distinguishes a symlet from the
minimum-phase Daubechies filter of the same order).  The construction is
validated by the orthonormality/perfect-reconstruction tests rather than by
comparison against published constants.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from ..errors import DataError

SYM4_VANISHING_MOMENTS = 4
DWT_LEVELS = 3


@dataclass(frozen=True)
class WaveletFilterBank:
    """Decomposition pair (h low-pass, g high-pass) with reconstruction filters
    derived by the quadrature-mirror relations."""
    name: str
    h: np.ndarray   # low-pass decomposition
    g: np.ndarray   # high-pass decomposition

    @property
    def rec_lo(self) -> np.ndarray:
        return self.h[::-1]

    @property
    def rec_hi(self) -> np.ndarray:
        return self.g[::-1]


def _orthogonal_candidates(vanishing_moments: int) -> list[np.ndarray]:
    """All real spectral factorizations of the Daubechies half-band polynomial."""
    K = vanishing_moments
    # P(y) = sum_{k<K} C(K-1+k, k) y^k ; roots mapped to reciprocal z-pairs via
    # y = (2 - z - 1/z)/4  =>  z^2 - (2 - 4y) z + 1 = 0
    p_coeffs = [comb(K - 1 + k, k) for k in range(K)]
    y_roots = sorted(np.roots(p_coeffs[::-1]),
                     key=lambda r: (round(r.real, 12), round(r.imag, 12)))

    groups = []   # per root group: (inside-unit-circle choice, outside choice)
    consumed = set()
    for i, y in enumerate(y_roots):
        if i in consumed:
            continue
        consumed.add(i)
        b = 2 - 4 * y
        disc = np.sqrt(complex(b * b - 4))
        z_a, z_b = (b + disc) / 2, (b - disc) / 2
        z_in = z_a if abs(z_a) < 1 else z_b
        z_out = z_b if abs(z_a) < 1 else z_a
        if abs(y.imag) < 1e-12:
            groups.append(([z_in], [z_out]))
        else:
            for j, y2 in enumerate(y_roots):
                if j not in consumed and abs(y2 - np.conj(y)) < 1e-9:
                    consumed.add(j)
                    break
            groups.append(([z_in, np.conj(z_in)], [z_out, np.conj(z_out)]))

    # ((1+z)/2)^K carries the K vanishing moments
    binom = np.array([comb(K, k) for k in range(K + 1)], dtype=np.float64) / 2.0 ** K

    candidates = []
    for picks in itertools.product((0, 1), repeat=len(groups)):
        roots = [z for grp, p in zip(groups, picks) for z in grp[p]]
        factor = np.poly(roots).real
        h = np.convolve(binom, factor)
        h *= np.sqrt(2.0) / h.sum()
        candidates.append(h)
    return candidates


@lru_cache(maxsize=None)
def sym4_bank() -> WaveletFilterBank:
    """Construct the 8-tap near-symmetric orthonormal bank (4 vanishing moments)."""
    candidates = _orthogonal_candidates(SYM4_VANISHING_MOMENTS)
    asymmetry = [float(np.sum((h - h[::-1]) ** 2)) for h in candidates]
    h = candidates[int(np.argmin(asymmetry))]
    # quadrature mirror: g[k] = (-1)^k h[L-1-k]
    L = len(h)
    g = ((-1.0) ** np.arange(L)) * h[::-1]
    h.flags.writeable = False
    g.flags.writeable = False
    return WaveletFilterBank(name="sym4", h=h, g=g)


@dataclass(frozen=True)
class DwtFeature:
    """Level-3 periodized coefficients, concatenated cA3 || cD3 || cD2 || cD1."""
    parts: tuple[np.ndarray, ...]
    levels: int = DWT_LEVELS

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate(self.parts)

    @property
    def part_lengths(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)


@lru_cache(maxsize=32)
def _analysis_indices(n: int, taps: int) -> np.ndarray:
    """Index matrix for one periodized analysis level: row n' gathers x[(2n'-k) mod n]."""
    pos = 2 * np.arange(n // 2, dtype=np.int64)[:, None] - np.arange(taps, dtype=np.int64)[None, :]
    return np.mod(pos, n)


def _analysis_step(x: np.ndarray, bank: WaveletFilterBank) -> tuple[np.ndarray, np.ndarray]:
    idx = _analysis_indices(len(x), len(bank.h))
    gathered = x[idx]
    return gathered @ bank.h, gathered @ bank.g


def _synthesis_step(approx: np.ndarray, detail: np.ndarray, bank: WaveletFilterBank) -> np.ndarray:
    n = 2 * len(approx)
    idx = _analysis_indices(n, len(bank.h))       # same index set, transposed use
    x = np.zeros(n)
    np.add.at(x, idx, approx[:, None] * bank.h[None, :])
    np.add.at(x, idx, detail[:, None] * bank.g[None, :])
    return x


def dwt_decompose(segment_samples: np.ndarray, bank: WaveletFilterBank | None = None,
                  levels: int = DWT_LEVELS) -> DwtFeature:
    """Multilevel periodized DWT; output vector length equals the input length.

    Each level convolves with (h, g) and downsamples by two with wrap-around
    indexing, so coefficient counts halve exactly per level.
    """
    bank = bank or sym4_bank()
    x = np.asarray(segment_samples, dtype=np.float64)
    if x.ndim != 1:
        raise DataError("dwt_decompose expects a 1-d segment")
    if len(x) % (2 ** levels) != 0:
        raise DataError(f"segment length {len(x)} not divisible by 2^{levels}")
    details = []
    approx = x
    for _ in range(levels):
        approx, d = _analysis_step(approx, bank)
        details.append(d)
    # ordering: cA_L || cD_L || ... || cD_1
    return DwtFeature(parts=(approx, *reversed(details)), levels=levels)


def dwt_reconstruct(feature: DwtFeature, bank: WaveletFilterBank | None = None) -> np.ndarray:
    """Inverse of dwt_decompose (exact up to roundoff for an orthonormal bank)."""
    bank = bank or sym4_bank()
    approx = feature.parts[0]
    for detail in feature.parts[1:]:   # coarsest detail first: cD_L, ..., cD_1
        approx = _synthesis_step(approx, detail, bank)
    return approx


def split_vector(vector: np.ndarray, levels: int = DWT_LEVELS) -> DwtFeature:
    """Rebuild the per-level parts from a concatenated coefficient vector."""
    n = len(vector)
    lengths = [n >> levels] + [n >> j for j in range(levels, 0, -1)]
    parts, pos = [], 0
    for ln in lengths:
        parts.append(np.asarray(vector[pos:pos + ln], dtype=np.float64))
        pos += ln
    if pos != n:
        raise DataError(f"vector length {n} does not split into {levels}-level parts")
    return DwtFeature(parts=tuple(parts), levels=levels)
