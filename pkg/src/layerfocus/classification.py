"""Confusion matrix and summary metrics for the four-class task."""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .attribution import CLASSES
from .errors import ValidationError

_INDEX = {cls: i for i, cls in enumerate(CLASSES)}


@dataclass
class MetricsSummary:
    accuracy: float
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_precision: float
    macro_recall: float
    macro_f1: float


def confusion(pairs: list[tuple[str, str]]) -> np.ndarray:
    """Tally (truth, predicted) pairs into a 4x4 matrix, rows = truth."""
    if not pairs:
        raise ValidationError("need at least one (truth, predicted) pair")
    matrix = np.zeros((len(CLASSES), len(CLASSES)), dtype=np.int64)
    for truth, predicted in pairs:
        if truth not in _INDEX:
            raise ValidationError(f"unknown truth class {truth!r}")
        if predicted not in _INDEX:
            raise ValidationError(f"unknown predicted class {predicted!r}")
        matrix[_INDEX[truth], _INDEX[predicted]] += 1
    return matrix


def metrics(matrix: np.ndarray) -> MetricsSummary:
    """Accuracy, per-class precision/recall/F1 and their macro averages.

    A class with an empty row or column contributes 0 to the affected
    metric, with a warning.
    """
    matrix = np.asarray(matrix)
    if matrix.shape != (4, 4) or matrix.min() < 0:
        raise ValidationError(f"confusion matrix must be 4x4 with counts >= 0, got {matrix.shape}")
    total = int(matrix.sum())
    if total == 0:
        raise ValidationError("confusion matrix is empty")

    precision, recall, f1 = {}, {}, {}
    for cls, i in _INDEX.items():
        col = int(matrix[:, i].sum())
        row = int(matrix[i, :].sum())
        diag = int(matrix[i, i])
        if col == 0:
            warnings.warn(f"class {cls}: no predictions, precision set to 0", stacklevel=2)
        if row == 0:
            warnings.warn(f"class {cls}: no true samples, recall set to 0", stacklevel=2)
        p = diag / col if col else 0.0
        r = diag / row if row else 0.0
        precision[cls] = p
        recall[cls] = r
        f1[cls] = 2 * p * r / (p + r) if p + r else 0.0

    return MetricsSummary(
        accuracy=float(np.trace(matrix)) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=sum(precision.values()) / len(CLASSES),
        macro_recall=sum(recall.values()) / len(CLASSES),
        macro_f1=sum(f1.values()) / len(CLASSES),
    )


def read_pairs_csv(path) -> list[tuple[str, str]]:
    """Read a CSV with ``truth`` and ``predicted`` columns."""
    pairs = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "truth" not in fields or "predicted" not in fields:
            raise ValidationError(f"{path}: pairs CSV needs 'truth' and 'predicted' columns")
        for row in reader:
            pairs.append((row["truth"], row["predicted"]))
    if not pairs:
        raise ValidationError(f"{path}: pairs CSV has no rows")
    return pairs


def metrics_to_json(matrix: np.ndarray, summary: MetricsSummary) -> str:
    """Serialize the confusion matrix and metrics with 6-decimal floats."""
    payload = {
        "classes": list(CLASSES),
        "confusion": [[int(v) for v in row] for row in matrix],
        "accuracy": round(summary.accuracy, 6),
        "per_class": {
            cls: {
                "precision": round(summary.precision[cls], 6),
                "recall": round(summary.recall[cls], 6),
                "f1": round(summary.f1[cls], 6),
            }
            for cls in CLASSES
        },
        "macro": {
            "precision": round(summary.macro_precision, 6),
            "recall": round(summary.macro_recall, 6),
            "f1": round(summary.macro_f1, 6),
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
