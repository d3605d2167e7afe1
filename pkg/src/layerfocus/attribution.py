"""Region-level attribution: fold a saliency map over a label map.

Each of the nine region labels accumulates the saliency mass of its
pixels. The seven retinal layers (labels 1..7) are then expressed as
percentages of the retinal total; the regions above (0) and below (8)
the retina are excluded from both numerator and denominator because
their area would otherwise swamp the in-retina percentages.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateExplanationError, ValidationError
from .tensor_io import NUM_LABELS, resize_bilinear

#: All nine region labels, index = label value.
LABEL_NAMES = ("RaR", "ILM", "NFL-IPL", "INL", "OPL", "ONL-ISM", "ISE", "OS-RPE", "RbR")

#: The seven attributable retinal layers (labels 1..7).
RETINAL_LAYERS = LABEL_NAMES[1:8]

#: Classification targets, fixed order.
CLASSES = ("CNV", "DME", "DRUSEN", "NORMAL")

_CSV_FIELDS = ["scan_id", "predicted", "truth"] + [
    "r_" + name.replace("-", "_") for name in RETINAL_LAYERS
]


def _check_pair(saliency: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    saliency = np.asarray(saliency, dtype=np.float64)
    labels = np.asarray(labels)
    if saliency.ndim != 2:
        raise ValidationError(f"saliency must be 2-D, got shape {saliency.shape}")
    if labels.ndim != 2:
        raise ValidationError(f"label map must be 2-D, got shape {labels.shape}")
    if saliency.shape != labels.shape:
        raise ValidationError(
            f"dimension mismatch: saliency {saliency.shape} vs labels {labels.shape}"
        )
    if saliency.size == 0:
        raise ValidationError("dimensions must be positive")
    if not np.all(np.isfinite(saliency)):
        raise ValidationError("saliency contains NaN or Inf")
    if saliency.min() < 0:
        raise ValidationError("saliency values must be nonnegative")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValidationError(f"labels must be integers, got dtype {labels.dtype}")
    if labels.min() < 0 or labels.max() >= NUM_LABELS:
        raise ValidationError(f"labels must lie in 0..{NUM_LABELS - 1}")
    return saliency, labels


def layer_masses(saliency: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Sum the saliency over each region label; returns 9 masses."""
    saliency, labels = _check_pair(saliency, labels)
    return np.bincount(labels.ravel(), weights=saliency.ravel(), minlength=NUM_LABELS)


def layer_attribution(saliency: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Percent of retinal saliency mass per retinal layer.

    Returns a 7-vector indexed ILM..OS-RPE that sums to 100. Labels 0
    (above retina) and 8 (below retina) contribute to neither the
    numerator nor the denominator. A zero retinal mass - all saliency
    outside the retina, or a blank map - raises
    :class:`DegenerateExplanationError`: such an explanation is itself a
    reviewable anomaly, not a number.
    """
    masses = layer_masses(saliency, labels)
    retinal = masses[1:8]
    denom = retinal.sum()
    if denom == 0.0:
        raise DegenerateExplanationError(
            "zero retinal mass: saliency places no weight on layers 1..7"
        )
    return 100.0 * retinal / denom


def attribute_scan(saliency: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Layer attribution with resolution alignment.

    Attribution is evaluated at the label map's native resolution, the
    grid where the segmentation boundaries are meaningful; a saliency
    map of a different size is first resampled to it.
    """
    saliency = np.asarray(saliency, dtype=np.float64)
    labels = np.asarray(labels)
    if saliency.ndim == 2 and labels.ndim == 2 and saliency.shape != labels.shape:
        saliency = resize_bilinear(saliency, labels.shape[0], labels.shape[1])
    return layer_attribution(saliency, labels)


@dataclass
class AttributionRecord:
    """One scored scan: ids, classes and its 7-layer attribution."""

    scan_id: str
    predicted: str
    truth: str | None
    attribution: np.ndarray

    def __post_init__(self) -> None:
        self.attribution = np.asarray(self.attribution, dtype=np.float64)
        if self.attribution.shape != (7,):
            raise ValidationError(
                f"attribution must have 7 entries, got shape {self.attribution.shape}"
            )


def _check_class(name: str, context: str) -> str:
    if name not in CLASSES:
        raise ValidationError(f"{context}: unknown class {name!r}, expected one of {CLASSES}")
    return name


def write_records_csv(records: list[AttributionRecord], path) -> None:
    """Write attribution records as CSV, one row per scan, 4 decimal places."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_FIELDS)
        for rec in records:
            row = [rec.scan_id, rec.predicted, rec.truth if rec.truth is not None else ""]
            row += [f"{v:.4f}" for v in rec.attribution]
            writer.writerow(row)


def read_records_csv(path) -> list[AttributionRecord]:
    """Read a records CSV written by :func:`write_records_csv`.

    Row attributions must be nonnegative and sum to 100 within the slack
    a 4-decimal interface permits (0.05 absolute).
    """
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in _CSV_FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            raise ValidationError(f"{path}: records CSV is missing columns {missing}")
        for i, row in enumerate(reader, start=2):
            values = np.array([float(row[f]) for f in _CSV_FIELDS[3:]], dtype=np.float64)
            if values.min() < 0:
                raise ValidationError(f"{path}: negative attribution at line {i}")
            if abs(values.sum() - 100.0) > 0.05:
                raise ValidationError(
                    f"{path}: attribution at line {i} sums to {values.sum():.4f}, not 100"
                )
            predicted = row["predicted"]
            if predicted:
                _check_class(predicted, f"{path} line {i}")
            truth = row["truth"] or None
            if truth is not None:
                _check_class(truth, f"{path} line {i}")
            records.append(AttributionRecord(row["scan_id"], predicted, truth, values))
    return records
