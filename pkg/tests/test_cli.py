import json

import numpy as np
import pytest

from layerfocus.attribution import AttributionRecord, read_records_csv, write_records_csv
from layerfocus.cli import main
from layerfocus.synth import SynthSpec, generate
from layerfocus.tensor_io import read_tensor, write_labelmap, write_tensor


def _make_scan_pair(directory, stem, seed):
    spec = SynthSpec(height=36, width=24, band_heights=(4,) * 9, random_blobs=3, seed=seed)
    saliency, labels = generate(spec)
    write_tensor(saliency, directory / "sal" / f"{stem}.rlt")
    write_labelmap(labels, directory / "lab" / f"{stem}.pgm")


def _write_meta(path, rows):
    lines = ["scan_id,predicted,truth"]
    lines += [f"{s},{p},{t}" for s, p, t in rows]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def scan_dirs(tmp_path):
    (tmp_path / "sal").mkdir()
    (tmp_path / "lab").mkdir()
    for i, stem in enumerate(["scan_a", "scan_b", "scan_c"]):
        _make_scan_pair(tmp_path, stem, seed=i + 1)
    _write_meta(
        tmp_path / "meta.csv",
        [("scan_a", "CNV", "CNV"), ("scan_b", "CNV", "CNV"), ("scan_c", "DME", "CNV")],
    )
    return tmp_path


def test_attribute_writes_sorted_records(scan_dirs, capsys):
    out = scan_dirs / "records.csv"
    code = main(
        [
            "attribute",
            "--saliency-dir", str(scan_dirs / "sal"),
            "--labels-dir", str(scan_dirs / "lab"),
            "--meta", str(scan_dirs / "meta.csv"),
            "--out", str(out),
        ]
    )
    assert code == 0
    records = read_records_csv(out)
    assert [r.scan_id for r in records] == ["scan_a", "scan_b", "scan_c"]
    assert records[0].predicted == "CNV"
    for r in records:
        assert r.attribution.sum() == pytest.approx(100.0, abs=0.05)


def test_attribute_without_meta_leaves_classes_blank(scan_dirs):
    out = scan_dirs / "records.csv"
    code = main(
        [
            "attribute",
            "--saliency-dir", str(scan_dirs / "sal"),
            "--labels-dir", str(scan_dirs / "lab"),
            "--out", str(out),
        ]
    )
    assert code == 0
    assert read_records_csv(out)[0].predicted == ""


def test_attribute_missing_labelmap_fails(scan_dirs, capsys):
    (scan_dirs / "lab" / "scan_b.pgm").unlink()
    code = main(
        [
            "attribute",
            "--saliency-dir", str(scan_dirs / "sal"),
            "--labels-dir", str(scan_dirs / "lab"),
            "--out", str(scan_dirs / "records.csv"),
        ]
    )
    assert code == 1
    assert "scan_b" in capsys.readouterr().err


def _pipeline_records(tmp_path):
    base = np.array([10.0, 20.0, 10.0, 10.0, 30.0, 10.0, 10.0])
    records = []
    rng = np.random.default_rng(0)
    for cls in ("CNV", "DME", "DRUSEN", "NORMAL"):
        for i in range(3):
            jitter = rng.uniform(-1.0, 1.0, size=7)
            vec = base + jitter
            vec = vec / vec.sum() * 100.0
            records.append(AttributionRecord(f"{cls.lower()}_{i}", cls, cls, vec))
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    return path


def test_profile_score_histogram_chain(tmp_path, capsys):
    records = _pipeline_records(tmp_path)
    profiles = tmp_path / "profiles.json"
    assert main(["profile", "--records", str(records), "--out", str(profiles)]) == 0
    payload = json.loads(profiles.read_text())
    assert set(payload) == {"CNV", "DME", "DRUSEN", "NORMAL"}
    assert payload["CNV"]["n"] == 3

    scores = tmp_path / "scores.csv"
    code = main(
        [
            "score",
            "--records", str(records),
            "--profiles", str(profiles),
            "--threshold", "3.0",
            "--out", str(scores),
        ]
    )
    assert code == 0
    lines = scores.read_text().splitlines()
    assert lines[0] == "scan_id,layer,observed,difference,z,flagged"
    assert len(lines) == 1 + 12 * 7

    hist = tmp_path / "hist.csv"
    code = main(
        ["histogram", "--scores", str(scores), "--bin-width", "1.0", "--out", str(hist)]
    )
    assert code == 0
    assert hist.read_text().splitlines()[0] == "bin_left,bin_right,count"


def test_score_missing_profile_class_fails(tmp_path, capsys):
    records = _pipeline_records(tmp_path)
    profiles = tmp_path / "profiles.json"
    main(["profile", "--records", str(records), "--out", str(profiles)])
    payload = json.loads(profiles.read_text())
    del payload["DME"]
    profiles.write_text(json.dumps(payload))
    code = main(
        [
            "score",
            "--records", str(records),
            "--profiles", str(profiles),
            "--out", str(tmp_path / "scores.csv"),
        ]
    )
    assert code == 1
    assert "DME" in capsys.readouterr().err


def test_histogram_layer_filter(tmp_path):
    records = _pipeline_records(tmp_path)
    profiles = tmp_path / "profiles.json"
    scores = tmp_path / "scores.csv"
    main(["profile", "--records", str(records), "--out", str(profiles)])
    main(["score", "--records", str(records), "--profiles", str(profiles), "--out", str(scores)])
    hist = tmp_path / "hist.csv"
    code = main(
        [
            "histogram",
            "--scores", str(scores),
            "--bin-width", "0.5",
            "--layer", "ILM",
            "--out", str(hist),
        ]
    )
    assert code == 0
    counts = [int(line.split(",")[2]) for line in hist.read_text().splitlines()[1:]]
    assert sum(counts) == 12  # one ILM row per scored record


def test_overlay_command(tmp_path):
    spec = SynthSpec(height=18, width=12, band_heights=(2,) * 9, random_blobs=2, seed=3)
    saliency, labels = generate(spec)
    write_tensor(saliency, tmp_path / "sal.rlt")
    write_labelmap(labels, tmp_path / "lab.pgm")
    out = tmp_path / "overlay.ppm"
    code = main(
        [
            "overlay",
            "--saliency", str(tmp_path / "sal.rlt"),
            "--labels", str(tmp_path / "lab.pgm"),
            "--alpha", "0.5",
            "--out", str(out),
        ]
    )
    assert code == 0
    data = out.read_bytes()
    assert data.startswith(b"P6\n12 18\n255\n")
    assert len(data) == len(b"P6\n12 18\n255\n") + 18 * 12 * 3


def test_overlay_on_grayscale_scan(tmp_path):
    write_tensor(np.random.default_rng(1).uniform(size=(6, 6)), tmp_path / "sal.rlt")
    write_tensor(np.random.default_rng(2).uniform(size=(6, 6)), tmp_path / "scan.rlt")
    out = tmp_path / "overlay.ppm"
    code = main(
        [
            "overlay",
            "--saliency", str(tmp_path / "sal.rlt"),
            "--scan", str(tmp_path / "scan.rlt"),
            "--out", str(out),
        ]
    )
    assert code == 0
    assert out.read_bytes().startswith(b"P6\n6 6\n255\n")


def test_metrics_command(tmp_path):
    pairs = tmp_path / "pairs.csv"
    rows = ["scan_id,truth,predicted"]
    rows += [f"s{i},CNV,CNV" for i in range(5)]
    rows += ["s5,CNV,DME"]
    rows += [f"t{i},DME,DME" for i in range(6)]
    rows += ["u0,DRUSEN,DRUSEN", "u1,NORMAL,NORMAL"]
    pairs.write_text("\n".join(rows) + "\n")
    out = tmp_path / "metrics.json"
    code = main(["metrics", "--pairs", str(pairs), "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["accuracy"] == pytest.approx(13.0 / 14.0, abs=1e-6)
    assert payload["confusion"][0][1] == 1


def test_gradcam_command(tmp_path):
    rng = np.random.default_rng(4)
    write_tensor(rng.normal(size=(4, 4, 3)), tmp_path / "acts.rlt")
    write_tensor(rng.normal(size=(4, 4, 3)), tmp_path / "grads.rlt")
    out = tmp_path / "saliency.rlt"
    code = main(
        [
            "gradcam",
            "--acts", str(tmp_path / "acts.rlt"),
            "--grads", str(tmp_path / "grads.rlt"),
            "--height", "16",
            "--width", "16",
            "--out", str(out),
        ]
    )
    assert code == 0
    saliency = read_tensor(out)
    assert saliency.shape == (16, 16)
    assert saliency.min() >= 0.0
    assert saliency.max() <= 1.0


def test_synth_command(tmp_path):
    out_dir = tmp_path / "synth"
    code = main(
        [
            "synth",
            "--seed", "7",
            "--height", "36",
            "--width", "24",
            "--count", "2",
            "--out-dir", str(out_dir),
        ]
    )
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["scan000.pgm", "scan000.rlt", "scan001.pgm", "scan001.rlt"]
    saliency = read_tensor(out_dir / "scan000.rlt")
    assert saliency.shape == (36, 24)


def test_synth_custom_bands_and_blob(tmp_path):
    out_dir = tmp_path / "synth"
    code = main(
        [
            "synth",
            "--seed", "1",
            "--height", "18",
            "--width", "12",
            "--bands", "2,2,2,2,2,2,2,2,2",
            "--blob", "9:6:2:1",
            "--random-blobs", "0",
            "--out-dir", str(out_dir),
        ]
    )
    assert code == 0
    saliency = read_tensor(out_dir / "scan000.rlt")
    assert np.unravel_index(saliency.argmax(), saliency.shape) == (9, 6)


def test_missing_input_gives_io_exit_code(tmp_path, capsys):
    code = main(
        [
            "gradcam",
            "--acts", str(tmp_path / "nope.rlt"),
            "--grads", str(tmp_path / "nope.rlt"),
            "--height", "4",
            "--width", "4",
            "--out", str(tmp_path / "out.rlt"),
        ]
    )
    assert code == 2
    assert "i/o error" in capsys.readouterr().err


def test_corrupt_input_gives_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.rlt"
    bad.write_bytes(b"JUNKJUNKJUNK")
    code = main(
        [
            "gradcam",
            "--acts", str(bad),
            "--grads", str(bad),
            "--height", "4",
            "--width", "4",
            "--out", str(tmp_path / "out.rlt"),
        ]
    )
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_outputs_are_deterministic(scan_dirs):
    args = [
        "attribute",
        "--saliency-dir", str(scan_dirs / "sal"),
        "--labels-dir", str(scan_dirs / "lab"),
        "--meta", str(scan_dirs / "meta.csv"),
    ]
    a, b = scan_dirs / "a.csv", scan_dirs / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
