"""Per-class statistics over layer attributions, deviation scoring and flagging.

A class profile holds the mean and standard deviation of each layer's
attribution over scans the model classified correctly. A new prediction
is scored against the profile of its *predicted* class: per layer we
report the difference from the mean and the z-score, and flag the scan
as suspicious when any layer deviates too far. Deviation histograms
summarize how the differences distribute around zero.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .attribution import CLASSES, RETINAL_LAYERS, AttributionRecord
from .errors import ValidationError


@dataclass
class ClassProfile:
    """Mean/std of the 7 layer attributions over correct classifications of one class."""

    class_name: str
    mean: np.ndarray
    std: np.ndarray
    n: int

    def __post_init__(self) -> None:
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.mean.shape != (7,) or self.std.shape != (7,):
            raise ValidationError("profile mean/std must have 7 entries")
        if self.n < 2:
            raise ValidationError(f"profile needs n >= 2 samples, got {self.n}")
        if self.std.min() < 0:
            raise ValidationError("profile std must be nonnegative")


@dataclass
class DeviationReport:
    """Per-layer observed value, difference from the mean, and z-score.

    ``z`` is NaN on layers whose profile std is zero; those layers carry
    no defined z and are judged by their raw difference instead.
    """

    observed: np.ndarray
    difference: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        self.observed = np.asarray(self.observed, dtype=np.float64)
        self.difference = np.asarray(self.difference, dtype=np.float64)
        self.z = np.asarray(self.z, dtype=np.float64)
        for name, v in (("observed", self.observed), ("difference", self.difference), ("z", self.z)):
            if v.shape != (7,):
                raise ValidationError(f"deviation report {name} must have 7 entries")

    @property
    def z_defined(self) -> np.ndarray:
        return np.isfinite(self.z)


@dataclass
class FlagDecision:
    """Verdict for one scan: suspicious iff any layer offends."""

    suspicious: bool
    max_abs_z: float
    offending_layers: list[str] = field(default_factory=list)


def build_profiles(
    records: list[AttributionRecord], ddof: int = 1
) -> dict[str, ClassProfile]:
    """Build one profile per class from the correctly classified records.

    Records with ``predicted != truth`` are excluded. ``ddof=1`` (the
    default) gives the sample standard deviation; pass ``ddof=0`` for
    the population convention. Classes with fewer than 2 correct
    records are omitted with a warning since their spread is undefined.
    """
    if ddof not in (0, 1):
        raise ValidationError(f"ddof must be 0 or 1, got {ddof}")
    for rec in records:
        if rec.truth is None:
            raise ValidationError(f"record {rec.scan_id!r} has no truth label")

    present = {r.truth for r in records}
    profiles: dict[str, ClassProfile] = {}
    for cls in CLASSES:
        if cls not in present:
            continue
        rows = [r.attribution for r in records if r.predicted == r.truth == cls]
        if len(rows) < 2:
            warnings.warn(
                f"class {cls}: only {len(rows)} correct record(s), profile omitted",
                stacklevel=2,
            )
            continue
        stack = np.vstack(rows)
        profiles[cls] = ClassProfile(
            class_name=cls,
            mean=stack.mean(axis=0),
            std=stack.std(axis=0, ddof=ddof),
            n=len(rows),
        )
    return profiles


def deviation_report(attribution: np.ndarray, profile: ClassProfile) -> DeviationReport:
    """Score a 7-layer attribution against a class profile."""
    observed = np.asarray(attribution, dtype=np.float64)
    if observed.shape != (7,):
        raise ValidationError(f"attribution must have 7 entries, got shape {observed.shape}")
    if not np.all(np.isfinite(observed)):
        raise ValidationError("attribution contains NaN or Inf")
    difference = observed - profile.mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(profile.std > 0, difference / profile.std, np.nan)
    return DeviationReport(observed=observed, difference=difference, z=z)


def flag(report: DeviationReport, threshold: float = 3.0) -> FlagDecision:
    """Decide whether a deviation report is statistically suspicious.

    A layer offends when its defined |z| reaches ``threshold``, or when
    its z is undefined (zero profile std) but its difference is nonzero:
    any departure from a zero-variance profile is infinitely surprising.
    """
    if not threshold > 0:
        raise ValidationError(f"threshold must be positive, got {threshold}")
    defined = report.z_defined
    offending = (defined & (np.abs(report.z) >= threshold)) | (
        ~defined & (np.abs(report.difference) > 0)
    )
    max_abs_z = float(np.abs(report.z[defined]).max()) if defined.any() else 0.0
    names = [RETINAL_LAYERS[i] for i in np.flatnonzero(offending)]
    return FlagDecision(suspicious=bool(offending.any()), max_abs_z=max_abs_z, offending_layers=names)


@dataclass
class HistogramData:
    """Half-open bins [left, left + width) anchored so bin edges fall on multiples of the width."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    counts: np.ndarray


def deviation_histogram(differences, bin_width: float = 1.0) -> HistogramData:
    """Bin deviation values into contiguous bins with edges at k * bin_width.

    Empty input yields an empty histogram. Counts always sum to the
    input length; empty interior bins are kept so the bins stay
    contiguous.
    """
    if not bin_width > 0:
        raise ValidationError(f"bin width must be positive, got {bin_width}")
    values = np.asarray(list(differences), dtype=np.float64)
    if values.size == 0:
        empty = np.array([], dtype=np.float64)
        return HistogramData(empty.copy(), empty.copy(), np.array([], dtype=np.int64))
    if not np.all(np.isfinite(values)):
        raise ValidationError("histogram input contains NaN or Inf")
    idx = np.floor(values / bin_width).astype(np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    k = np.arange(lo, hi + 1, dtype=np.float64)
    return HistogramData(k * bin_width, (k + 1) * bin_width, counts.astype(np.int64))


def class_weights(counts: dict[str, int]) -> dict[str, float]:
    """Inverse-frequency class weights: max(count) / count, largest class = 1."""
    if not counts:
        raise ValidationError("need at least one class count")
    for cls, n in counts.items():
        if n < 1:
            raise ValidationError(f"class {cls}: count must be >= 1, got {n}")
    top = max(counts.values())
    return {cls: top / n for cls, n in counts.items()}


def profiles_to_json(profiles: dict[str, ClassProfile]) -> str:
    """Serialize profiles as JSON with 6-decimal floats, deterministically ordered."""
    payload = {
        cls: {
            "mean": [round(float(v), 6) for v in p.mean],
            "std": [round(float(v), 6) for v in p.std],
            "n": int(p.n),
        }
        for cls, p in profiles.items()
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def profiles_from_json(text: str) -> dict[str, ClassProfile]:
    """Parse the JSON produced by :func:`profiles_to_json`."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"profiles JSON is malformed: {exc}") from exc
    profiles = {}
    for cls, entry in payload.items():
        if cls not in CLASSES:
            raise ValidationError(f"profiles JSON has unknown class {cls!r}")
        profiles[cls] = ClassProfile(
            class_name=cls,
            mean=np.array(entry["mean"], dtype=np.float64),
            std=np.array(entry["std"], dtype=np.float64),
            n=int(entry["n"]),
        )
    return profiles


def write_deviation_csv(rows: list[tuple[str, DeviationReport, FlagDecision]], path) -> None:
    """Write per-layer deviation rows: scan_id, layer, observed, difference, z, flagged.

    ``z`` is left empty on layers where it is undefined; ``flagged``
    marks the offending layers, so the scan-level verdict is the OR of
    its rows.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scan_id", "layer", "observed", "difference", "z", "flagged"])
        for scan_id, report, decision in rows:
            offenders = set(decision.offending_layers)
            for i, layer in enumerate(RETINAL_LAYERS):
                z = f"{report.z[i]:.4f}" if np.isfinite(report.z[i]) else ""
                writer.writerow(
                    [
                        scan_id,
                        layer,
                        f"{report.observed[i]:.4f}",
                        f"{report.difference[i]:.4f}",
                        z,
                        "true" if layer in offenders else "false",
                    ]
                )


def write_histogram_csv(hist: HistogramData, path) -> None:
    """Write histogram bins as CSV: bin_left, bin_right, count."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in zip(hist.bin_left, hist.bin_right, hist.counts):
            writer.writerow([f"{left:.6f}", f"{right:.6f}", int(count)])
