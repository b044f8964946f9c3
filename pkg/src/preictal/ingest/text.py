"""Text formats: `time_s,mv` sample CSV, `onset_s,offset_s,type` annotation CSV,
and the Table-1-style patient metadata CSV."""
from __future__ import annotations

import csv
import io

import numpy as np

from ..errors import DataError
from .records import (EcgRecord, Gender, PatientMeta, SeizureAnnotation,
                      SeizureType, validate_annotations)

RECORD_HEADER = ("time_s", "mv")
ANNOTATION_HEADER = ("onset_s", "offset_s", "type")

# per-row sample spacing may deviate at most this much from the median step
MAX_DT_DEVIATION = 0.01


def _rows(text: str, expected_header: tuple[str, ...]) -> list[list[str]]:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and tuple(c.strip().lower() for c in rows[0]) == expected_header:
        rows = rows[1:]
    return rows


def parse_csv(text: str, patient_id: str = "unknown") -> EcgRecord:
    """Parse a two-column `time_s,mv` CSV with uniform sampling.

    The rate is inferred as round(1/median_step); rows whose step deviates
    more than 1% from the median are rejected as non-uniform.
    """
    rows = _rows(text, RECORD_HEADER)
    if not rows:
        raise DataError("empty record CSV")
    try:
        values = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise DataError(f"record CSV has a malformed row: {exc}") from exc
    t, mv = values[:, 0], values[:, 1]
    if len(t) < 2:
        raise DataError("record CSV needs at least two rows to infer a sampling rate")
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise DataError("record CSV time column must be strictly increasing")
    step = float(np.median(dt))
    if np.any(np.abs(dt - step) > MAX_DT_DEVIATION * step):
        worst = int(np.argmax(np.abs(dt - step)))
        raise DataError(
            f"non-uniform sampling: step {dt[worst]:.6g}s at row {worst + 1} "
            f"deviates >1% from median {step:.6g}s"
        )
    fs = round(1.0 / step)
    if fs <= 0:
        raise DataError(f"inferred sampling rate {fs} is not positive")
    return EcgRecord(patient_id=patient_id, sampling_rate_hz=fs, samples=mv)


def serialize_csv(record: EcgRecord) -> str:
    """Serialize with 17 significant digits so parse_csv round-trips bit-exactly."""
    fs = record.sampling_rate_hz
    lines = [",".join(RECORD_HEADER)]
    for i, v in enumerate(record.samples):
        lines.append(f"{i / fs:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"


def load_annotations(text: str) -> list[SeizureAnnotation]:
    """Parse the `onset_s,offset_s,type` sidecar into a sorted, validated list."""
    rows = _rows(text, ANNOTATION_HEADER)
    annotations = []
    for i, row in enumerate(rows):
        if len(row) < 2:
            raise DataError(f"annotation row {i + 1} needs onset and offset")
        try:
            onset, offset = float(row[0]), float(row[1])
        except ValueError as exc:
            raise DataError(f"annotation row {i + 1} is not numeric: {row}") from exc
        kind = SeizureType.OTHER
        if len(row) >= 3 and row[2].strip():
            try:
                kind = SeizureType(row[2].strip().upper())
            except ValueError as exc:
                raise DataError(f"annotation row {i + 1}: unknown seizure type {row[2]!r}") from exc
        annotations.append(SeizureAnnotation(onset_s=onset, offset_s=offset, seizure_type=kind))
    validate_annotations(annotations)
    return annotations


def serialize_annotations(annotations: list[SeizureAnnotation]) -> str:
    lines = [",".join(ANNOTATION_HEADER)]
    for ann in annotations:
        lines.append(f"{ann.onset_s:.17g},{ann.offset_s:.17g},{ann.seizure_type.value}")
    return "\n".join(lines) + "\n"


def load_patient_meta(text: str) -> list[PatientMeta]:
    """Parse `patient_id,age,gender,seizure_count,recording_min` rows."""
    rows = _rows(text, ("patient_id", "age", "gender", "seizure_count", "recording_min"))
    out = []
    for i, row in enumerate(rows):
        if len(row) < 5:
            raise DataError(f"patient metadata row {i + 1} has {len(row)} of 5 columns")
        try:
            out.append(PatientMeta(
                patient_id=row[0].strip(),
                age=int(row[1]),
                gender=Gender(row[2].strip().lower()),
                seizure_count=int(row[3]),
                recording_min=float(row[4]),
            ))
        except ValueError as exc:
            raise DataError(f"patient metadata row {i + 1} is malformed: {exc}") from exc
    return out
