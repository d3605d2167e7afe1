"""Saliency maps from exported convolutional activations and gradients.

The pipeline mirrors the standard gradient-weighted class-activation
procedure: spatially pool the target-class gradients into one weight per
feature channel, combine the activation channels with those weights,
clip negatives, upsample to the requested resolution and min-max
normalize into [0, 1].

Activation and gradient stacks are rank-3 arrays laid out Hc x Wc x K
(channels last). All arithmetic runs in float64.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .tensor_io import resize_bilinear


def _check_stack(t: np.ndarray, name: str) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise ValidationError(f"{name} must be rank 3 (H x W x K), got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValidationError(f"{name} contains NaN or Inf")
    return t


def neuron_weights(grads: np.ndarray) -> np.ndarray:
    """Per-channel importance weights: the spatial mean of each gradient channel."""
    grads = _check_stack(grads, "gradients")
    return grads.mean(axis=(0, 1))


def gradcam_coarse(acts: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted channel combination of the activations, clipped at zero.

    ``out[r, c] = max(0, sum_k weights[k] * acts[r, c, k])``
    """
    acts = _check_stack(acts, "activations")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.shape[0] != acts.shape[2]:
        raise ValidationError(
            f"weight count {weights.shape} does not match {acts.shape[2]} channels"
        )
    combined = acts @ weights
    return np.maximum(combined, 0.0)


def normalize_minmax(m: np.ndarray) -> np.ndarray:
    """Affinely map a 2-D array onto [0, 1]; a constant map becomes all zeros.

    Zeros for the constant case mean "no localized evidence", which the
    attribution stage reports as a degenerate explanation instead of
    inventing a uniform focus.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError(f"normalize_minmax needs a 2-D map, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("normalize_minmax input contains NaN or Inf")
    lo = m.min()
    hi = m.max()
    if hi == lo:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo)


def compute_saliency(acts: np.ndarray, grads: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Full saliency pipeline on one exported activation/gradient pair.

    Equivalent to
    ``normalize_minmax(resize_bilinear(gradcam_coarse(acts, neuron_weights(grads)), out_h, out_w))``.
    Scaling the gradients by any positive constant leaves the result
    unchanged: the scale passes through the weights and the coarse map
    and cancels in the normalization.
    """
    acts = _check_stack(acts, "activations")
    grads = _check_stack(grads, "gradients")
    if acts.shape != grads.shape:
        raise ValidationError(
            f"activations {acts.shape} and gradients {grads.shape} must share a shape"
        )
    coarse = gradcam_coarse(acts, neuron_weights(grads))
    return normalize_minmax(resize_bilinear(coarse, out_h, out_w))
