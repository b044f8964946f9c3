"""Deterministic synthetic ECG: a quasi-periodic Gaussian-bump pulse train with
controllable pre-ictal heart-rate ramps and pulse jitter.

This is the desk-scale oracle for the whole pipeline: anomalies are injected
by construction, so detection properties can be asserted without clinical
data.
"""
from __future__ import annotations

import numpy as np

from ..errors import DataError
from .records import EcgRecord, SeizureAnnotation, SeizureType, SyntheticSpec

# fixed generator constants (not part of the spec surface)
PULSE_AMPLITUDE_MV = 1.0
PULSE_WIDTH_S = 0.02
ICTAL_DURATION_S = 60.0


def _validate(spec: SyntheticSpec):
    if spec.duration_s <= 0:
        raise DataError("duration_s must be positive")
    if spec.base_hr_bpm <= 0:
        raise DataError("base_hr_bpm must be positive")
    spans = []
    for ev in spec.events:
        if ev.preictal_lead_s <= 0:
            raise DataError("preictal_lead_s must be positive")
        spans.append((ev.onset_s - ev.preictal_lead_s, min(ev.onset_s + ICTAL_DURATION_S, spec.duration_s)))
    spans.sort()
    for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
        if b0 < a1:
            raise DataError(f"events overlap: [{a0}, {a1}] and [{b0}, {b1}]")
    if spec.events:
        first = min(spec.events, key=lambda e: e.onset_s)
        if first.preictal_lead_s >= first.onset_s:
            raise DataError("first event's pre-ictal lead must start after t=0")


def _heart_rate_at(t: float, spec: SyntheticSpec) -> float:
    hr = spec.base_hr_bpm
    if spec.hrv_bpm:
        hr += spec.hrv_bpm * np.sin(2.0 * np.pi * t / spec.hrv_period_s)
    for ev in spec.events:
        lead_start = ev.onset_s - ev.preictal_lead_s
        if lead_start <= t < ev.onset_s:
            frac = (t - lead_start) / ev.preictal_lead_s
            return hr + ev.hr_ramp_bpm * frac
        if ev.onset_s <= t < ev.onset_s + ICTAL_DURATION_S:
            return hr + ev.hr_ramp_bpm
    return hr


def _jitter_for(t: float, spec: SyntheticSpec) -> float:
    for ev in spec.events:
        if ev.onset_s - ev.preictal_lead_s <= t < ev.onset_s + ICTAL_DURATION_S:
            return ev.jitter_std
    return 0.0


def generate_synthetic(spec: SyntheticSpec) -> EcgRecord:
    """Generate a record; a pure function of the spec (fixed seed, fixed output).

    Baseline: pulses at base_hr_bpm plus white noise.  Inside each event's
    lead window the instantaneous rate ramps linearly up by hr_ramp_bpm and
    pulse amplitude/width are jittered with the event's jitter_std.
    Annotations are emitted at event onsets.
    """
    _validate(spec)
    rng = np.random.default_rng(spec.rng_seed)
    fs = spec.sampling_rate_hz
    n = int(round(spec.duration_s * fs))
    samples = np.zeros(n)

    # beat-by-beat placement: next interval from the instantaneous rate
    t = 0.5 * 60.0 / spec.base_hr_bpm
    while t < spec.duration_s:
        amp, width = PULSE_AMPLITUDE_MV, PULSE_WIDTH_S
        jit = _jitter_for(t, spec)
        if jit > 0:
            amp = amp * max(0.1, 1.0 + jit * rng.standard_normal())
            width = width * max(0.25, 1.0 + jit * rng.standard_normal())
        lo = max(0, int((t - 5 * width) * fs))
        hi = min(n, int((t + 5 * width) * fs) + 1)
        if hi > lo:
            grid = np.arange(lo, hi) / fs
            samples[lo:hi] += amp * np.exp(-((grid - t) ** 2) / (2 * width ** 2))
        t += 60.0 / _heart_rate_at(t, spec)

    if spec.noise_std > 0:
        samples += rng.normal(0.0, spec.noise_std, size=n)

    annotations = [
        SeizureAnnotation(
            onset_s=ev.onset_s,
            offset_s=min(ev.onset_s + ICTAL_DURATION_S, spec.duration_s),
            seizure_type=SeizureType.OTHER,
        )
        for ev in sorted(spec.events, key=lambda e: e.onset_s)
    ]
    return EcgRecord(patient_id=f"synthetic-{spec.rng_seed}",
                     sampling_rate_hz=fs, samples=samples, annotations=annotations)
