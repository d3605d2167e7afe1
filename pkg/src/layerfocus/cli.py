"""Command-line front end.

Subcommands cover the full pipeline: ``gradcam`` turns exported
activation/gradient tensors into a saliency map, ``attribute`` folds
saliency maps over label maps into per-layer percentages, ``profile``
builds per-class statistics from correctly classified records,
``score`` rates new records against those profiles and flags suspicious
ones, ``histogram`` bins the resulting deviations, ``overlay`` renders
heatmap composites, ``metrics`` summarizes classification pairs, and
``synth`` emits reproducible synthetic scenes.

Runs are deterministic: identical inputs and flags produce byte-identical
outputs. Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import attribution, classification, profiles, render, synth, tensor_io
from .errors import LayerFocusError, ValidationError
from .gradcam import compute_saliency


def _read_meta(path) -> dict[str, tuple[str, str | None]]:
    """Read scan metadata: scan_id, predicted, optional truth."""
    meta = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "scan_id" not in fields or "predicted" not in fields:
            raise ValidationError(f"{path}: meta CSV needs 'scan_id' and 'predicted' columns")
        for row in reader:
            truth = row.get("truth") or None
            meta[row["scan_id"]] = (row["predicted"], truth)
    return meta


def _cmd_attribute(args) -> None:
    saliency_dir = Path(args.saliency_dir)
    labels_dir = Path(args.labels_dir)
    meta = _read_meta(args.meta) if args.meta else {}

    stems = sorted(p.stem for p in saliency_dir.glob("*.rlt"))
    if not stems:
        raise ValidationError(f"{saliency_dir}: no .rlt saliency files found")

    def one(stem: str) -> attribution.AttributionRecord:
        saliency = tensor_io.read_tensor(saliency_dir / f"{stem}.rlt")
        label_path = labels_dir / f"{stem}.pgm"
        if not label_path.exists():
            raise ValidationError(f"{label_path}: no label map for scan {stem!r}")
        labels = tensor_io.read_labelmap(label_path)
        values = attribution.attribute_scan(saliency, labels)
        predicted, truth = meta.get(stem, ("", None))
        return attribution.AttributionRecord(stem, predicted, truth, values)

    # Scans are independent; keep the output order keyed by scan id.
    with ThreadPoolExecutor(max_workers=min(8, len(stems))) as pool:
        records = list(pool.map(one, stems))
    attribution.write_records_csv(records, args.out)


def _cmd_profile(args) -> None:
    records = attribution.read_records_csv(args.records)
    built = profiles.build_profiles(records, ddof=0 if args.population_std else 1)
    Path(args.out).write_text(profiles.profiles_to_json(built))


def _cmd_score(args) -> None:
    records = attribution.read_records_csv(args.records)
    table = profiles.profiles_from_json(Path(args.profiles).read_text())
    rows = []
    for rec in sorted(records, key=lambda r: r.scan_id):
        if not rec.predicted:
            raise ValidationError(f"record {rec.scan_id!r} has no predicted class")
        if rec.predicted not in table:
            raise ValidationError(
                f"record {rec.scan_id!r}: no profile for predicted class {rec.predicted!r}"
            )
        report = profiles.deviation_report(rec.attribution, table[rec.predicted])
        decision = profiles.flag(report, threshold=args.threshold)
        rows.append((rec.scan_id, report, decision))
    profiles.write_deviation_csv(rows, args.out)


def _cmd_histogram(args) -> None:
    values = []
    with open(args.scores, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "difference" not in fields:
            raise ValidationError(f"{args.scores}: scores CSV needs a 'difference' column")
        for row in reader:
            if args.layer and row.get("layer") != args.layer:
                continue
            values.append(float(row["difference"]))
    hist = profiles.deviation_histogram(values, bin_width=args.bin_width)
    profiles.write_histogram_csv(hist, args.out)


def _cmd_overlay(args) -> None:
    saliency = tensor_io.read_tensor(args.saliency)
    if args.labels:
        base = tensor_io.read_labelmap(args.labels)
    else:
        base = tensor_io.read_tensor(args.scan).astype(np.float64)
    if saliency.ndim == 2 and saliency.shape != base.shape:
        saliency = tensor_io.resize_bilinear(saliency, base.shape[0], base.shape[1])
    image = render.render_overlay(saliency, base, alpha=args.alpha)
    render.write_ppm(image, args.out)


def _cmd_metrics(args) -> None:
    pairs = classification.read_pairs_csv(args.pairs)
    matrix = classification.confusion(pairs)
    summary = classification.metrics(matrix)
    Path(args.out).write_text(classification.metrics_to_json(matrix, summary))


def _cmd_gradcam(args) -> None:
    acts = tensor_io.read_tensor(args.acts)
    grads = tensor_io.read_tensor(args.grads)
    saliency = compute_saliency(acts, grads, args.height, args.width)
    tensor_io.write_tensor(saliency, args.out)


def _parse_blob(text: str) -> tuple[float, float, float, float]:
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(f"blob spec {text!r} must be row:col:sigma:amplitude")
    return tuple(float(p) for p in parts)


def _cmd_synth(args) -> None:
    if args.bands:
        bands = tuple(int(b) for b in args.bands.split(","))
    else:
        bands = synth.equal_bands(args.height)
    blobs = tuple(_parse_blob(b) for b in args.blob or [])
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        spec = synth.SynthSpec(
            height=args.height,
            width=args.width,
            band_heights=bands,
            blobs=blobs,
            random_blobs=args.random_blobs,
            seed=args.seed + i,
        )
        saliency, labels = synth.generate(spec)
        stem = f"scan{i:03d}"
        tensor_io.write_tensor(saliency, out_dir / f"{stem}.rlt")
        tensor_io.write_labelmap(labels, out_dir / f"{stem}.pgm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="layerfocus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attribute", help="batch layer attribution over saliency/label pairs")
    p.add_argument("--saliency-dir", required=True, help="directory of <scan>.rlt saliency maps")
    p.add_argument("--labels-dir", required=True, help="directory of <scan>.pgm label maps")
    p.add_argument("--meta", help="optional CSV scan_id,predicted[,truth]")
    p.add_argument("--out", required=True, help="output records CSV")
    p.set_defaults(func=_cmd_attribute)

    p = sub.add_parser("profile", help="per-class mean/std profiles from correct records")
    p.add_argument("--records", required=True, help="records CSV from 'attribute'")
    p.add_argument("--population-std", action="store_true", help="use ddof=0 instead of the sample std")
    p.add_argument("--out", required=True, help="output profiles JSON")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("score", help="deviation-score records against profiles and flag")
    p.add_argument("--records", required=True, help="records CSV from 'attribute'")
    p.add_argument("--profiles", required=True, help="profiles JSON from 'profile'")
    p.add_argument("--threshold", type=float, default=3.0, help="|z| flag threshold (default 3.0)")
    p.add_argument("--out", required=True, help="output deviation CSV")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("histogram", help="bin deviation differences from a scores CSV")
    p.add_argument("--scores", required=True, help="deviation CSV from 'score'")
    p.add_argument("--bin-width", type=float, default=1.0, help="bin width in percentage points")
    p.add_argument("--layer", help="restrict to one layer name, e.g. ILM")
    p.add_argument("--out", required=True, help="output histogram CSV")
    p.set_defaults(func=_cmd_histogram)

    p = sub.add_parser("overlay", help="render saliency over a label map or grayscale scan")
    p.add_argument("--saliency", required=True, help="saliency .rlt")
    base = p.add_mutually_exclusive_group(required=True)
    base.add_argument("--labels", help="label map .pgm base")
    base.add_argument("--scan", help="grayscale scan .rlt base (values in [0, 1])")
    p.add_argument("--alpha", type=float, default=0.5, help="heatmap opacity in [0, 1]")
    p.add_argument("--out", required=True, help="output PPM image")
    p.set_defaults(func=_cmd_overlay)

    p = sub.add_parser("metrics", help="confusion matrix and summary metrics from pairs")
    p.add_argument("--pairs", required=True, help="CSV with truth,predicted columns")
    p.add_argument("--out", required=True, help="output metrics JSON")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("gradcam", help="saliency map from exported activations/gradients")
    p.add_argument("--acts", required=True, help="activations .rlt (H x W x K)")
    p.add_argument("--grads", required=True, help="gradients .rlt (H x W x K)")
    p.add_argument("--height", type=int, required=True, help="output height")
    p.add_argument("--width", type=int, required=True, help="output width")
    p.add_argument("--out", required=True, help="output saliency .rlt")
    p.set_defaults(func=_cmd_gradcam)

    p = sub.add_parser("synth", help="emit seeded synthetic saliency/label pairs")
    p.add_argument("--seed", type=int, default=0, help="base seed; pair i uses seed+i")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--bands", help="nine comma-separated band heights (default: equal split)")
    p.add_argument("--blob", action="append", help="explicit blob row:col:sigma:amplitude (repeatable)")
    p.add_argument("--random-blobs", type=int, default=3, help="seeded random blobs per scene")
    p.add_argument("--count", type=int, default=1, help="number of pairs to emit")
    p.add_argument("--out-dir", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except LayerFocusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0
