"""Overlay rendering: saliency heat colormap blended over a base image.

The base is either a label map drawn with a fixed 9-color palette or a
grayscale scan. Output pixels are
``(1 - alpha) * base + alpha * colormap(saliency)`` and are written as
binary PPM (P6), the simplest lossless RGB container.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

#: Fixed palette for the nine region labels (RaR..RbR), RGB.
LABEL_PALETTE = np.array(
    [
        (0x00, 0x00, 0x00),  # 0 RaR
        (0xE6, 0x19, 0x4B),  # 1 ILM
        (0xF5, 0x82, 0x31),  # 2 NFL-IPL
        (0xFF, 0xE1, 0x19),  # 3 INL
        (0x3C, 0xB4, 0x4B),  # 4 OPL
        (0x42, 0xD4, 0xF4),  # 5 ONL-ISM
        (0x43, 0x63, 0xD8),  # 6 ISE
        (0x91, 0x1E, 0xB4),  # 7 OS-RPE
        (0x30, 0x30, 0x30),  # 8 RbR
    ],
    dtype=np.float64,
)


def heat_colormap(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to the classic blue-to-red heat ramp (float RGB 0..255)."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    r = np.clip(1.5 - np.abs(4.0 * v - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * v - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * v - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1) * 255.0


def _base_rgb(base: np.ndarray) -> np.ndarray:
    base = np.asarray(base)
    if base.ndim != 2:
        raise ValidationError(f"base must be 2-D, got shape {base.shape}")
    if np.issubdtype(base.dtype, np.integer):
        if base.min() < 0 or base.max() >= len(LABEL_PALETTE):
            raise ValidationError("integer base must be a label map with values 0..8")
        return LABEL_PALETTE[base]
    gray = np.clip(base.astype(np.float64), 0.0, 1.0) * 255.0
    return np.stack([gray, gray, gray], axis=-1)


def render_overlay(saliency: np.ndarray, base: np.ndarray, alpha: float) -> np.ndarray:
    """Blend the saliency colormap over the base; returns H x W x 3 uint8.

    ``base`` is a label map (integer dtype, palette colors) or a
    grayscale scan in [0, 1] (float dtype). alpha = 0 reproduces the
    base exactly, alpha = 1 the pure colormap.
    """
    saliency = np.asarray(saliency, dtype=np.float64)
    if saliency.ndim != 2:
        raise ValidationError(f"saliency must be 2-D, got shape {saliency.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    base_rgb = _base_rgb(base)
    if base_rgb.shape[:2] != saliency.shape:
        raise ValidationError(
            f"dimension mismatch: saliency {saliency.shape} vs base {base_rgb.shape[:2]}"
        )
    blended = (1.0 - alpha) * base_rgb + alpha * heat_colormap(saliency)
    return np.rint(blended).astype(np.uint8)


def write_ppm(image: np.ndarray, path) -> None:
    """Write an H x W x 3 uint8 image as binary PPM (P6, maxval 255)."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValidationError(f"PPM writer needs H x W x 3 uint8, got {image.shape} {image.dtype}")
    h, w = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())
