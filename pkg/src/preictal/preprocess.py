"""Low-pass filtering, fixed-length segmentation, and seizure-phase labeling."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy import signal as sps

from .errors import ConfigError, DataError
from .ingest.records import EcgRecord, SeizureAnnotation

WINDOW_CHOICES_S = (1, 5, 10)
OVERLAP_CHOICES_S = (0, 1, 3, 5)


class Phase(IntEnum):
    INTERICTAL = 0
    PREICTAL = 1
    ICTAL = 2
    POSTICTAL = 3


@dataclass(frozen=True)
class FilterConfig:
    """Order-4 recursive low-pass; zero-phase mode runs it forward and backward."""
    cutoff_hz: float = 40.0
    order: int = 4
    zero_phase: bool = True

    def validate(self, sampling_rate_hz: int):
        if not 0 < self.cutoff_hz < sampling_rate_hz / 2:
            raise ConfigError(
                f"cutoff {self.cutoff_hz} Hz must lie in (0, Nyquist={sampling_rate_hz / 2}) Hz"
            )
        if self.order < 1:
            raise ConfigError(f"filter order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class SegmentationConfig:
    window_s: int = 1
    overlap_s: int = 0
    sampling_rate_hz: int = 512

    def __post_init__(self):
        if self.window_s not in WINDOW_CHOICES_S:
            raise ConfigError(f"window_s must be one of {WINDOW_CHOICES_S}, got {self.window_s}")
        if self.overlap_s not in OVERLAP_CHOICES_S:
            raise ConfigError(f"overlap_s must be one of {OVERLAP_CHOICES_S}, got {self.overlap_s}")
        if self.overlap_s >= self.window_s:
            raise ConfigError(f"overlap_s ({self.overlap_s}) must be smaller than window_s ({self.window_s})")
        if self.sampling_rate_hz <= 0:
            raise ConfigError("sampling_rate_hz must be positive")

    @property
    def window_samples(self) -> int:
        return self.window_s * self.sampling_rate_hz

    @property
    def hop_samples(self) -> int:
        return (self.window_s - self.overlap_s) * self.sampling_rate_hz


@dataclass(frozen=True)
class Segment:
    index: int
    start_sample: int
    samples: np.ndarray
    phase: Phase

    @property
    def n(self) -> int:
        return len(self.samples)


class SegmentSet:
    """Fixed-length windows cut from one record, stored as a (count, window) array."""

    def __init__(self, samples: np.ndarray, start_samples: np.ndarray,
                 phases: np.ndarray, config: SegmentationConfig):
        self.samples = np.ascontiguousarray(samples, dtype=np.float64)
        self.start_samples = np.ascontiguousarray(start_samples, dtype=np.int64)
        self.phases = np.ascontiguousarray(phases, dtype=np.int8)
        self.config = config
        if not (len(self.samples) == len(self.start_samples) == len(self.phases)):
            raise DataError("segment arrays disagree on count")
        if self.samples.ndim != 2 or self.samples.shape[1] != config.window_samples:
            raise DataError(
                f"segment width {self.samples.shape} does not match window_samples {config.window_samples}"
            )
        for arr in (self.samples, self.start_samples, self.phases):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, i: int) -> Segment:
        return Segment(index=i, start_sample=int(self.start_samples[i]),
                       samples=self.samples[i], phase=Phase(self.phases[i]))

    def start_times_s(self) -> np.ndarray:
        return self.start_samples / self.config.sampling_rate_hz

    def with_phases(self, phases: np.ndarray) -> "SegmentSet":
        return SegmentSet(self.samples, self.start_samples, phases, self.config)


def lowpass(record: EcgRecord, cfg: FilterConfig = FilterConfig()) -> EcgRecord:
    """Low-pass the record, preserving DC/baseline wander.

    Zero-phase mode filters forward and backward (no group delay, squared
    magnitude response); padlen is stretched well past the filter's transient
    so the result is symmetric under time reversal.
    """
    cfg.validate(record.sampling_rate_hz)
    b, a = sps.butter(cfg.order, cfg.cutoff_hz / (record.sampling_rate_hz / 2), btype="low")
    if cfg.zero_phase:
        padlen = min(len(record.samples) - 1, max(3 * record.sampling_rate_hz, 3 * len(a)))
        filtered = sps.filtfilt(b, a, record.samples, padlen=padlen)
    else:
        filtered = sps.lfilter(b, a, record.samples)
    return EcgRecord(patient_id=record.patient_id, sampling_rate_hz=record.sampling_rate_hz,
                     samples=filtered, annotations=list(record.annotations))


def segment(record: EcgRecord, cfg: SegmentationConfig) -> SegmentSet:
    """Cut into windows of window_samples advancing by hop_samples.

    count = 1 + floor((N - window) / hop); the trailing partial window is
    discarded.  Phases start all-INTERICTAL; see label_phases.
    """
    if cfg.sampling_rate_hz != record.sampling_rate_hz:
        raise ConfigError(
            f"segmentation config expects fs={cfg.sampling_rate_hz}, record has {record.sampling_rate_hz}"
        )
    n = len(record.samples)
    w, hop = cfg.window_samples, cfg.hop_samples
    if n < w:
        raise DataError(f"record of {n} samples is shorter than one {w}-sample window")
    count = 1 + (n - w) // hop
    starts = np.arange(count, dtype=np.int64) * hop
    idx = starts[:, None] + np.arange(w)[None, :]
    return SegmentSet(record.samples[idx], starts,
                      np.zeros(count, dtype=np.int8), cfg)


def label_phases(segments: SegmentSet, annotations: list[SeizureAnnotation],
                 preictal_len_s: float, postictal_len_s: float = 600.0) -> SegmentSet:
    """Label each segment by its overlap with the annotated seizure windows.

    ICTAL if it overlaps [onset, offset]; PREICTAL if it overlaps
    [onset - preictal_len_s, onset); POSTICTAL if it overlaps
    (offset, offset + postictal_len_s]; otherwise INTERICTAL.
    Precedence: ICTAL > PREICTAL > POSTICTAL.
    """
    fs = segments.config.sampling_rate_hz
    seg_start = segments.start_samples / fs
    seg_end = seg_start + segments.config.window_s
    phases = np.full(len(segments), Phase.INTERICTAL, dtype=np.int8)

    for ann in annotations:
        post = (seg_start <= ann.offset_s + postictal_len_s) & (seg_end > ann.offset_s)
        phases[post & (phases == Phase.INTERICTAL)] = Phase.POSTICTAL
    for ann in annotations:
        pre = (seg_start < ann.onset_s) & (seg_end > ann.onset_s - preictal_len_s)
        phases[pre & (phases != Phase.ICTAL)] = Phase.PREICTAL
    for ann in annotations:
        ictal = (seg_start <= ann.offset_s) & (seg_end > ann.onset_s)
        phases[ictal] = Phase.ICTAL

    return segments.with_phases(phases)
