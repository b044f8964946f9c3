import numpy as np
import pytest

from preictal.errors import DataError
from preictal.ingest import (EcgRecord, SeizureType, load_annotations,
                             load_patient_meta, parse_csv,
                             serialize_annotations, serialize_csv)


def rows_at(fs, n, values=None):
    vals = values if values is not None else np.zeros(n)
    return "\n".join(f"{i / fs},{v}" for i, v in enumerate(vals))


def test_uniform_rate_inferred():
    rec = parse_csv(rows_at(512, 512))
    assert rec.sampling_rate_hz == 512


def test_alternating_step_rejected():
    times = np.cumsum([0] + [1 / 512, 1 / 256] * 10)
    text = "\n".join(f"{t},0.0" for t in times)
    with pytest.raises(DataError, match="non-uniform"):
        parse_csv(text)


def test_empty_rejected():
    with pytest.raises(DataError, match="empty"):
        parse_csv("")


def test_non_numeric_rejected():
    with pytest.raises(DataError, match="malformed"):
        parse_csv("0.0,1.0\n0.001953125,abc")


def test_decreasing_time_rejected():
    with pytest.raises(DataError, match="strictly increasing"):
        parse_csv("0.0,1.0\n0.5,1.0\n0.25,1.0")


def test_serialize_roundtrip_bit_exact():
    rng = np.random.default_rng(2)
    rec = EcgRecord(patient_id="p", sampling_rate_hz=512,
                    samples=rng.normal(0, 1, 777))
    back = parse_csv(serialize_csv(rec))
    assert back.sampling_rate_hz == 512
    assert np.array_equal(back.samples, rec.samples)


def test_annotation_single_row():
    anns = load_annotations("100,160,IAS")
    assert len(anns) == 1
    assert (anns[0].onset_s, anns[0].offset_s) == (100.0, 160.0)
    assert anns[0].seizure_type is SeizureType.IAS


def test_annotation_ordering_error():
    with pytest.raises(DataError, match="onset < offset"):
        load_annotations("100,90,IAS")


def test_annotation_overlap_error():
    with pytest.raises(DataError, match="overlap"):
        load_annotations("100,160,IAS\n150,200,IAS")


def test_annotation_header_and_roundtrip():
    text = "onset_s,offset_s,type\n10,20,FBTC\n30,40,WIAS\n"
    anns = load_annotations(text)
    assert [a.seizure_type for a in anns] == [SeizureType.FBTC, SeizureType.WIAS]
    assert load_annotations(serialize_annotations(anns)) == anns


def test_unknown_seizure_type():
    with pytest.raises(DataError, match="unknown seizure type"):
        load_annotations("10,20,XYZ")


def test_patient_meta():
    metas = load_patient_meta("patient_id,age,gender,seizure_count,recording_min\n"
                              "PN00,55,male,5,198\nPN05,51,female,3,359\n")
    assert metas[0].patient_id == "PN00"
    assert metas[1].seizure_count == 3

    rec = EcgRecord(patient_id="PN05", sampling_rate_hz=512,
                    samples=np.zeros(512 * 200),
                    annotations=[])
    with pytest.raises(DataError, match="3 seizures"):
        metas[1].check_against([rec])
