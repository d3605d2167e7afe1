"""Writers for the toolkit's wire formats and a reader for input images.

The consumer side of these files lives in a separate package; this
module re-states the producer half of the contract so the shim stays
decoupled from it. RLT: magic 'RLT1', u8 rank, little-endian u32 dims,
row-major little-endian float32 payload. Label maps and input images:
binary PGM (P5).
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ExportError

RLT_MAGIC = b"RLT1"


def write_tensor(array: np.ndarray, path) -> None:
    """Write a float array as an RLT tensor (float32 on disk)."""
    array = np.asarray(array)
    if array.ndim < 1 or array.ndim > 255:
        raise ExportError(f"tensor rank must be 1..255, got {array.ndim}")
    array = np.ascontiguousarray(array, dtype=np.float32)
    if any(d < 1 or d > 0xFFFFFFFF for d in array.shape):
        raise ExportError(f"tensor dims must fit u32 and be positive, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ExportError("tensor contains NaN or Inf")
    with open(path, "wb") as fh:
        fh.write(RLT_MAGIC)
        fh.write(struct.pack("B", array.ndim))
        fh.write(struct.pack(f"<{array.ndim}I", *array.shape))
        fh.write(array.astype("<f4", copy=False).tobytes(order="C"))


def write_labelmap(labels: np.ndarray, path) -> None:
    """Write a label map as binary PGM, gray value = label."""
    labels = np.asarray(labels)
    if labels.ndim != 2 or labels.size == 0:
        raise ExportError(f"label map must be 2-D and nonempty, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() > 8:
        raise ExportError(f"labels must lie in 0..8, got max {labels.max()}")
    h, w = labels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(labels.astype(np.uint8).tobytes(order="C"))


def _next_token(fh) -> bytes:
    token = b""
    while True:
        ch = fh.read(1)
        if not ch:
            raise ExportError("unexpected end of PGM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = fh.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def read_image_pgm(path) -> np.ndarray:
    """Read a grayscale P5 image into float32 values in [0, 1]."""
    with open(path, "rb") as fh:
        if _next_token(fh) != b"P5":
            raise ExportError(f"{path}: not a binary PGM (P5) file")
        try:
            w = int(_next_token(fh))
            h = int(_next_token(fh))
            maxval = int(_next_token(fh))
        except ValueError as exc:
            raise ExportError(f"{path}: malformed PGM header") from exc
        if w < 1 or h < 1:
            raise ExportError(f"{path}: image size must be positive, got {w}x{h}")
        if not 1 <= maxval <= 255:
            raise ExportError(f"{path}: PGM maxval must be 1..255, got {maxval}")
        payload = fh.read(h * w + 1)
    if len(payload) != h * w:
        raise ExportError(f"{path}: payload is {len(payload)} bytes, expected {h * w}")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(h, w)
    return pixels.astype(np.float32) / float(maxval)


def write_image_pgm(image: np.ndarray, path) -> None:
    """Write a [0, 1] grayscale image as binary PGM with maxval 255."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.size == 0:
        raise ExportError(f"image must be 2-D and nonempty, got shape {image.shape}")
    if image.min() < 0.0 or image.max() > 1.0:
        raise ExportError("image values must lie in [0, 1]")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.rint(image * 255.0).astype(np.uint8).tobytes(order="C"))
