import numpy as np
import pytest

from preictal.ingest import SyntheticSpec, SyntheticEvent, generate_synthetic
from preictal.preprocess import SegmentationConfig, lowpass, segment


@pytest.fixture(scope="session")
def baseline_record():
    """200 s quiet synthetic baseline (no events, no noise)."""
    spec = SyntheticSpec(duration_s=200.0, base_hr_bpm=90.0, noise_std=0.0, rng_seed=7)
    return generate_synthetic(spec)


@pytest.fixture(scope="session")
def baseline_segments(baseline_record):
    cfg = SegmentationConfig(window_s=1, overlap_s=0,
                             sampling_rate_hz=baseline_record.sampling_rate_hz)
    return segment(lowpass(baseline_record), cfg)


@pytest.fixture(scope="session")
def event_record():
    """12 min record with one injected event (used by smaller pipeline tests)."""
    spec = SyntheticSpec(
        duration_s=720.0, base_hr_bpm=90.0, noise_std=0.02, hrv_bpm=5.0,
        events=(SyntheticEvent(onset_s=480.0, preictal_lead_s=240.0,
                               hr_ramp_bpm=30.0, jitter_std=0.3),),
        rng_seed=3,
    )
    return generate_synthetic(spec)
