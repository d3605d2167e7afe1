"""Brute-force reference implementations used as independent test oracles.

These transcribe the attribution and saliency definitions as literal
nested loops over plain Python floats. They deliberately share no
accumulation code with the fast numpy paths they check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateExplanationError, ValidationError


def brute_force_attribution(saliency, labels) -> np.ndarray:
    """Loop transcription of the layer attribution percentages."""
    saliency = np.asarray(saliency, dtype=np.float64)
    labels = np.asarray(labels)
    if saliency.ndim != 2 or labels.ndim != 2 or saliency.shape != labels.shape:
        raise ValidationError(
            f"dimension mismatch: saliency {saliency.shape} vs labels {labels.shape}"
        )
    height, width = saliency.shape
    masses = [0.0] * 9
    for r in range(height):
        for c in range(width):
            v = float(saliency[r, c])
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"bad saliency value {v} at ({r}, {c})")
            k = int(labels[r, c])
            if k < 0 or k > 8:
                raise ValidationError(f"label {k} at ({r}, {c}) is outside 0..8")
            masses[k] += v
    denom = 0.0
    for k in range(1, 8):
        denom += masses[k]
    if denom == 0.0:
        raise DegenerateExplanationError(
            "zero retinal mass: saliency places no weight on layers 1..7"
        )
    return np.array([100.0 * masses[k] / denom for k in range(1, 8)])


def brute_force_gradcam(acts, grads) -> np.ndarray:
    """Loop transcription of the pooled-gradient weighted activation map."""
    acts = np.asarray(acts, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if acts.ndim != 3 or acts.shape != grads.shape:
        raise ValidationError(f"need matching rank-3 stacks, got {acts.shape} vs {grads.shape}")
    height, width, channels = acts.shape

    alpha = [0.0] * channels
    for k in range(channels):
        total = 0.0
        for r in range(height):
            for c in range(width):
                total += float(grads[r, c, k])
        alpha[k] = total / (height * width)

    out = np.zeros((height, width), dtype=np.float64)
    for r in range(height):
        for c in range(width):
            combined = 0.0
            for k in range(channels):
                combined += alpha[k] * float(acts[r, c, k])
            out[r, c] = combined if combined > 0.0 else 0.0
    return out
