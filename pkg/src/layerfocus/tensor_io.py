"""Binary file formats and 2-D resampling.

Two containers are supported:

* ``.rlt`` tensors: magic ``b"RLT1"`` | u8 rank | rank little-endian u32
  dims | row-major little-endian float32 payload. Encoding is fully
  deterministic, so identical tensors produce byte-identical files.
* label maps: binary PGM (``P5``, maxval 255) where the gray value of a
  pixel is its region label. The nine retinal region labels are 0..8.

All readers fail with :class:`FormatError` naming the offending byte
offset; payloads containing NaN/Inf raise :class:`ValidationError`.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError, ValidationError

RLT_MAGIC = b"RLT1"
NUM_LABELS = 9


def write_tensor(t: np.ndarray, path) -> None:
    """Write a float tensor to ``path`` in the .rlt container.

    Values are stored as little-endian float32 in row-major order. The
    tensor must have rank >= 1, positive dims and finite values.
    """
    t = np.asarray(t)
    if t.ndim < 1:
        raise ValidationError("tensor rank must be >= 1, got a scalar")
    if t.ndim > 255:
        raise ValidationError(f"tensor rank {t.ndim} exceeds the format maximum of 255")
    if any(d <= 0 for d in t.shape):
        raise ValidationError(f"all dims must be positive, got shape {t.shape}")
    if any(d > 0xFFFFFFFF for d in t.shape):
        raise ValidationError(f"dims must fit in u32, got shape {t.shape}")
    data = np.ascontiguousarray(t, dtype="<f4")
    if not np.all(np.isfinite(data)):
        raise ValidationError("tensor payload contains NaN or Inf")
    header = RLT_MAGIC + struct.pack("<B", t.ndim)
    header += struct.pack(f"<{t.ndim}I", *t.shape)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(data.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write tensor to {path}: {exc}") from exc


def read_tensor(path) -> np.ndarray:
    """Read an .rlt file back into a float32 array.

    Round-trips bit-exactly through :func:`write_tensor`.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4 or raw[:4] != RLT_MAGIC:
        raise FormatError(f"{path}: bad magic at byte 0, expected {RLT_MAGIC!r}")
    if len(raw) < 5:
        raise FormatError(f"{path}: truncated before rank byte at byte 4")
    rank = raw[4]
    if rank == 0:
        raise FormatError(f"{path}: rank 0 at byte 4, tensors need at least one dim")
    dims_end = 5 + 4 * rank
    if len(raw) < dims_end:
        raise FormatError(f"{path}: truncated dim table at byte {len(raw)}, need {dims_end} bytes")
    shape = struct.unpack(f"<{rank}I", raw[5:dims_end])
    for i, d in enumerate(shape):
        if d == 0:
            raise FormatError(f"{path}: zero dim #{i} at byte {5 + 4 * i}")
    count = 1
    for d in shape:
        count *= d
    expected = dims_end + 4 * count
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload length mismatch at byte {dims_end}: "
            f"shape {shape} needs {4 * count} payload bytes, file has {len(raw) - dims_end}"
        )
    data = np.frombuffer(raw[dims_end:], dtype="<f4").reshape(shape)
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"{path}: payload contains NaN or Inf")
    return data.copy()


def _next_pgm_token(raw: bytes, pos: int, path) -> tuple[int, int]:
    """Parse the next ASCII integer in a PGM header, skipping whitespace and # comments."""
    n = len(raw)
    while pos < n:
        c = raw[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c == ord("#"):
            while pos < n and raw[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and ord("0") <= raw[pos] <= ord("9"):
        pos += 1
    if pos == start:
        raise FormatError(f"{path}: expected integer in PGM header at byte {start}")
    return int(raw[start:pos]), pos


def read_labelmap(path) -> np.ndarray:
    """Read a binary PGM label map; gray value = region label.

    Returns an H x W uint8 array. Requires maxval 255 and every label
    in 0..8.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 2 or raw[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (expected 'P5' at byte 0)")
    width, pos = _next_pgm_token(raw, 2, path)
    height, pos = _next_pgm_token(raw, pos, path)
    maxval, pos = _next_pgm_token(raw, pos, path)
    if width <= 0 or height <= 0:
        raise FormatError(f"{path}: non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"{path}: maxval must be 255, got {maxval}")
    if pos >= len(raw) or raw[pos] not in b" \t\r\n":
        raise FormatError(f"{path}: missing whitespace after maxval at byte {pos}")
    pos += 1
    need = width * height
    if len(raw) - pos != need:
        raise FormatError(
            f"{path}: payload at byte {pos} has {len(raw) - pos} bytes, expected {need}"
        )
    labels = np.frombuffer(raw[pos:], dtype=np.uint8).reshape(height, width)
    bad = labels >= NUM_LABELS
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValidationError(
            f"{path}: label {labels[r, c]} at pixel ({r}, {c}) is outside 0..{NUM_LABELS - 1}"
        )
    return labels.copy()


def write_labelmap(labels: np.ndarray, path) -> None:
    """Write an H x W array of labels 0..8 as a binary PGM (maxval 255)."""
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValidationError(f"label map must be 2-D, got shape {labels.shape}")
    if labels.size == 0:
        raise ValidationError("label map must be non-empty")
    if labels.min() < 0 or labels.max() >= NUM_LABELS:
        raise ValidationError(f"labels must lie in 0..{NUM_LABELS - 1}")
    h, w = labels.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(labels.astype(np.uint8).tobytes())


def resize_bilinear(t: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resample a 2-D map to ``out_h`` x ``out_w`` with bilinear interpolation.

    Uses the half-pixel-center convention: the source coordinate of
    output pixel ``d`` is ``(d + 0.5) * in/out - 0.5``, clamped to the
    valid range. Output values are convex combinations of input values,
    so the input min/max bound the output, and resizing to the input
    size is the identity.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 2:
        raise ValidationError(f"resize_bilinear needs a 2-D map, got shape {t.shape}")
    if out_h < 1 or out_w < 1:
        raise ValidationError(f"output size must be positive, got {out_h}x{out_w}")
    in_h, in_w = t.shape

    src_y = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    src_x = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(src_y).astype(np.intp)
    x0 = np.floor(src_x).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (src_y - y0)[:, None]
    fx = (src_x - x0)[None, :]

    out = (
        (1.0 - fy) * (1.0 - fx) * t[np.ix_(y0, x0)]
        + (1.0 - fy) * fx * t[np.ix_(y0, x1)]
        + fy * (1.0 - fx) * t[np.ix_(y1, x0)]
        + fy * fx * t[np.ix_(y1, x1)]
    )
    # Convex weights can overshoot by an ulp; pin the documented bounds.
    return np.clip(out, t.min(), t.max())
