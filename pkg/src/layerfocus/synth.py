"""Seeded synthetic scan generator for tests and demos.

Scenes mimic the horizontal banding of retinal cross-sections: the
label map stacks the nine regions top to bottom in label order, and the
saliency map is a max-normalized sum of Gaussian blobs. Everything is a
pure function of the spec, so fixtures are reproducible byte for byte.

Randomness comes from xorshift64*, fully specified here so any
implementation can regenerate identical fixtures: starting from a
nonzero 64-bit state, each step applies ``s ^= s >> 12``,
``s ^= s << 25``, ``s ^= s >> 27`` (all mod 2**64) and outputs
``(s * 2685821657736338717) mod 2**64``; uniform doubles are the output
divided by 2**64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .tensor_io import NUM_LABELS

_MASK64 = (1 << 64) - 1
_MULT = 2685821657736338717
_SEED0 = 0x9E3779B97F4A7C15  # substitute state for the invalid all-zero seed


class Xorshift64Star:
    """The documented 64-bit shift-register generator."""

    def __init__(self, seed: int) -> None:
        self.state = (seed & _MASK64) or _SEED0

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * _MULT) & _MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * (self.next_u64() / 2.0**64)


@dataclass
class SynthSpec:
    """Recipe for one synthetic scene.

    ``band_heights`` are the nine region heights top to bottom and must
    sum to ``height``. ``blobs`` are explicit (center_row, center_col,
    sigma, amplitude) Gaussians; ``random_blobs`` adds that many more
    drawn from the seeded generator.
    """

    height: int
    width: int
    band_heights: tuple[int, ...]
    blobs: tuple[tuple[float, float, float, float], ...] = ()
    random_blobs: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.height < 1 or self.width < 1:
            raise ValidationError(f"scene size must be positive, got {self.height}x{self.width}")
        heights = tuple(int(h) for h in self.band_heights)
        if len(heights) != NUM_LABELS:
            raise ValidationError(f"need {NUM_LABELS} band heights, got {len(heights)}")
        if any(h < 1 for h in heights):
            raise ValidationError("band heights must be positive")
        if sum(heights) != self.height:
            raise ValidationError(
                f"band heights sum to {sum(heights)}, image height is {self.height}"
            )
        self.band_heights = heights
        blobs = tuple(tuple(float(v) for v in blob) for blob in self.blobs)
        for blob in blobs:
            if len(blob) != 4:
                raise ValidationError(f"blob needs (row, col, sigma, amplitude), got {blob}")
            if blob[2] <= 0:
                raise ValidationError(f"blob sigma must be positive, got {blob[2]}")
        self.blobs = blobs
        if self.random_blobs < 0:
            raise ValidationError("random_blobs must be >= 0")


def equal_bands(height: int) -> tuple[int, ...]:
    """Split a height into nine bands as evenly as possible (extra rows at the top)."""
    base, extra = divmod(height, NUM_LABELS)
    if base < 1:
        raise ValidationError(f"height {height} is too small for {NUM_LABELS} bands")
    return tuple(base + (1 if i < extra else 0) for i in range(NUM_LABELS))


def generate(spec: SynthSpec) -> tuple[np.ndarray, np.ndarray]:
    """Build the (saliency, label map) pair a spec describes.

    The saliency is the blob sum divided by its max (all zeros when the
    blobs contribute nothing), so values lie in [0, 1].
    """
    labels = np.empty((spec.height, spec.width), dtype=np.uint8)
    top = 0
    for label, h in enumerate(spec.band_heights):
        labels[top : top + h, :] = label
        top += h

    rng = Xorshift64Star(spec.seed)
    blobs = list(spec.blobs)
    for _ in range(spec.random_blobs):
        scale = min(spec.height, spec.width)
        blobs.append(
            (
                rng.uniform(0, spec.height),
                rng.uniform(0, spec.width),
                rng.uniform(scale / 12.0, scale / 4.0),
                rng.uniform(0.5, 1.0),
            )
        )

    rows = np.arange(spec.height, dtype=np.float64)[:, None]
    cols = np.arange(spec.width, dtype=np.float64)[None, :]
    saliency = np.zeros((spec.height, spec.width), dtype=np.float64)
    for cy, cx, sigma, amp in blobs:
        saliency += amp * np.exp(-((rows - cy) ** 2 + (cols - cx) ** 2) / (2.0 * sigma**2))

    peak = saliency.max()
    if peak > 0:
        saliency /= peak
    return saliency, labels
