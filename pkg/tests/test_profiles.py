import json

import numpy as np
import pytest

from layerfocus.attribution import AttributionRecord
from layerfocus.errors import ValidationError
from layerfocus.profiles import (
    ClassProfile,
    build_profiles,
    class_weights,
    deviation_histogram,
    deviation_report,
    flag,
    profiles_from_json,
    profiles_to_json,
    write_deviation_csv,
    write_histogram_csv,
)


def _record(scan_id, predicted, truth, vector):
    return AttributionRecord(scan_id, predicted, truth, np.asarray(vector, dtype=np.float64))


V1 = [10.0, 20.0, 10.0, 10.0, 30.0, 10.0, 10.0]
V2 = [12.0, 18.0, 10.0, 10.0, 30.0, 10.0, 10.0]


def test_build_profiles_mean_and_sample_std():
    profiles = build_profiles([_record("a", "CNV", "CNV", V1), _record("b", "CNV", "CNV", V2)])
    p = profiles["CNV"]
    assert p.n == 2
    assert np.allclose(p.mean, [11.0, 19.0, 10.0, 10.0, 30.0, 10.0, 10.0])
    # two points two apart: sample std is sqrt(2)
    assert p.std[0] == pytest.approx(np.sqrt(2.0), abs=1e-12)
    assert p.std[1] == pytest.approx(np.sqrt(2.0), abs=1e-12)
    assert np.allclose(p.std[2:], 0.0)


def test_build_profiles_population_std_switch():
    profiles = build_profiles(
        [_record("a", "CNV", "CNV", V1), _record("b", "CNV", "CNV", V2)], ddof=0
    )
    assert profiles["CNV"].std[0] == pytest.approx(1.0, abs=1e-12)


def test_build_profiles_skips_misclassified_records():
    # the stray DME truth has no correct record, so that class is also warned
    with pytest.warns(UserWarning, match="DME"):
        profiles = build_profiles(
            [
                _record("a", "CNV", "CNV", V1),
                _record("b", "CNV", "CNV", V2),
                _record("c", "CNV", "DME", [99.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ]
        )
    assert profiles["CNV"].n == 2
    assert np.allclose(profiles["CNV"].mean, [11.0, 19.0, 10.0, 10.0, 30.0, 10.0, 10.0])


def test_build_profiles_omits_small_classes_with_warning():
    records = [
        _record("a", "CNV", "CNV", V1),
        _record("b", "CNV", "CNV", V2),
        _record("c", "DME", "DME", V1),
    ]
    with pytest.warns(UserWarning, match="DME"):
        profiles = build_profiles(records)
    assert set(profiles) == {"CNV"}


def test_build_profiles_requires_truth():
    with pytest.raises(ValidationError):
        build_profiles([_record("a", "CNV", None, V1), _record("b", "CNV", "CNV", V2)])


def test_deviation_report_z_scores():
    profile = ClassProfile(
        "CNV",
        np.array(V1, dtype=np.float64),
        np.array([2.0, 1.0, 0.0, 4.0, 1.0, 1.0, 1.0]),
        5,
    )
    observed = np.array([14.0, 19.0, 11.0, 10.0, 30.0, 10.0, 10.0])
    report = deviation_report(observed, profile)
    assert np.allclose(report.observed, observed)
    assert np.allclose(report.difference, [4.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    assert report.z[0] == pytest.approx(2.0)
    assert report.z[1] == pytest.approx(-1.0)
    assert np.isnan(report.z[2])  # zero spread leaves the score undefined
    assert report.z[3] == pytest.approx(0.0)
    assert list(report.z_defined) == [True, True, False, True, True, True, True]


def test_flag_threshold_is_inclusive():
    profile = ClassProfile("CNV", np.zeros(7), np.ones(7), 5)
    exactly_three = deviation_report(np.array([3.0, 0, 0, 0, 0, 0, 0]), profile)
    decision = flag(exactly_three, threshold=3.0)
    assert decision.suspicious
    assert decision.offending_layers == ["ILM"]
    assert decision.max_abs_z == pytest.approx(3.0)


def test_flag_below_threshold_is_clean():
    profile = ClassProfile("CNV", np.zeros(7), np.ones(7), 5)
    decision = flag(deviation_report(np.full(7, 2.9), profile), threshold=3.0)
    assert not decision.suspicious
    assert decision.offending_layers == []
    assert decision.max_abs_z == pytest.approx(2.9)


def test_flag_undefined_z_with_nonzero_difference_is_suspicious():
    profile = ClassProfile("CNV", np.zeros(7), np.zeros(7), 5)
    observed = np.zeros(7)
    observed[4] = 0.5
    decision = flag(deviation_report(observed, profile), threshold=3.0)
    assert decision.suspicious
    assert decision.offending_layers == ["ONL-ISM"]
    assert decision.max_abs_z == 0.0  # no defined scores at all


def test_flag_undefined_z_with_zero_difference_is_clean():
    profile = ClassProfile("CNV", np.full(7, 5.0), np.zeros(7), 5)
    decision = flag(deviation_report(np.full(7, 5.0), profile), threshold=3.0)
    assert not decision.suspicious


def test_profiles_json_roundtrip():
    profiles = build_profiles([_record("a", "CNV", "CNV", V1), _record("b", "CNV", "CNV", V2)])
    back = profiles_from_json(profiles_to_json(profiles))
    assert set(back) == {"CNV"}
    assert back["CNV"].n == 2
    assert np.allclose(back["CNV"].mean, profiles["CNV"].mean, atol=1e-6)
    assert np.allclose(back["CNV"].std, profiles["CNV"].std, atol=1e-6)


def test_profiles_json_is_deterministic():
    profiles = build_profiles([_record("a", "CNV", "CNV", V1), _record("b", "CNV", "CNV", V2)])
    text = profiles_to_json(profiles)
    assert text == profiles_to_json(profiles)
    assert text.endswith("\n")
    json.loads(text)  # stays parseable


def test_histogram_bins_are_floor_aligned():
    hist = deviation_histogram(np.array([-1.2, -0.4, 0.0, 0.3, 0.9, 1.0, 2.5]), bin_width=1.0)
    assert hist.bin_left[0] == pytest.approx(-2.0)
    assert hist.bin_right[-1] == pytest.approx(3.0)
    assert list(hist.counts) == [1, 1, 3, 1, 1]
    assert hist.counts.sum() == 7


def test_histogram_respects_bin_width():
    hist = deviation_histogram(np.array([0.1, 0.6, 1.1]), bin_width=0.5)
    assert hist.bin_left[0] == pytest.approx(0.0)
    assert list(hist.counts) == [1, 1, 1]


def test_histogram_boundary_value_goes_right():
    hist = deviation_histogram(np.array([1.0]), bin_width=1.0)
    assert hist.bin_left[0] == pytest.approx(1.0)
    assert list(hist.counts) == [1]


def test_histogram_empty_input():
    hist = deviation_histogram(np.array([]), bin_width=1.0)
    assert hist.counts.size == 0
    assert hist.bin_left.size == 0


def test_histogram_rejects_nonpositive_width():
    with pytest.raises(ValidationError):
        deviation_histogram(np.array([1.0]), bin_width=0.0)


def test_class_weights_inverse_frequency():
    weights = class_weights({"CNV": 10, "DME": 5, "DRUSEN": 2, "NORMAL": 10})
    assert weights["CNV"] == pytest.approx(1.0)
    assert weights["DME"] == pytest.approx(2.0)
    assert weights["DRUSEN"] == pytest.approx(5.0)
    assert weights["NORMAL"] == pytest.approx(1.0)


def test_class_weights_reject_empty_class():
    with pytest.raises(ValidationError):
        class_weights({"CNV": 10, "DME": 0})


def test_deviation_csv_layout(tmp_path):
    profile = ClassProfile("CNV", np.zeros(7), np.ones(7), 5)
    observed = np.array([3.5, 0, 0, 0, 0, 0, 0])
    report = deviation_report(observed, profile)
    decision = flag(report, threshold=3.0)
    path = tmp_path / "dev.csv"
    write_deviation_csv([("scan1", report, decision)], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "scan_id,layer,observed,difference,z,flagged"
    assert len(lines) == 8
    assert lines[1].startswith("scan1,ILM,")
    assert lines[1].endswith(",true")
    assert lines[2].endswith(",false")


def test_deviation_csv_blank_z_when_undefined(tmp_path):
    profile = ClassProfile("CNV", np.zeros(7), np.zeros(7), 5)
    report = deviation_report(np.zeros(7), profile)
    decision = flag(report, threshold=3.0)
    path = tmp_path / "dev.csv"
    write_deviation_csv([("s", report, decision)], path)
    row = path.read_text().splitlines()[1].split(",")
    assert row[4] == ""


def test_histogram_csv_layout(tmp_path):
    hist = deviation_histogram(np.array([0.2, 1.7]), bin_width=1.0)
    path = tmp_path / "hist.csv"
    write_histogram_csv(hist, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "bin_left,bin_right,count"
    assert lines[1] == "0.000000,1.000000,1"
    assert lines[2] == "1.000000,2.000000,1"
