"""Export model internals per scan: activations, gradients, segmentation.

For each input image the shim runs the classifier once, captures the
output of its final convolutional block with a forward hook, picks the
target logit (the predicted class unless overridden), and differentiates
that pre-softmax logit with respect to the captured features. The
feature map and its gradient are written as RLT tensors in H x W x K
layout, the segmenter's argmax map as a PGM, and a manifest ties the
files of a batch together.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .errors import ExportError
from .formats import read_image_pgm, write_labelmap, write_tensor
from .models import CLASSES, INPUT_SIZE, NUM_REGIONS, build_models, load_checkpoint

_CLASS_BY_LOWER = {cls.lower(): cls for cls in CLASSES}


@dataclass
class ScanExport:
    """In-memory result of exporting one scan through the classifier."""

    acts: np.ndarray  # Hc x Wc x K float32
    grads: np.ndarray  # same shape as acts
    predicted: str
    target: int


def _to_model_input(image: np.ndarray) -> torch.Tensor:
    image = np.asarray(image, dtype=np.float32)
    if image.ndim != 2 or image.size == 0:
        raise ExportError(f"image must be a nonempty 2-D array, got shape {image.shape}")
    x = torch.from_numpy(image)[None, None]
    if x.shape[-2:] != (INPUT_SIZE, INPUT_SIZE):
        # bilinear with half-pixel centers, matching the toolkit's convention
        x = F.interpolate(x, size=(INPUT_SIZE, INPUT_SIZE), mode="bilinear", align_corners=False)
    return x


def export_scan(image: np.ndarray, model: torch.nn.Module, target_class: int | None = None) -> ScanExport:
    """Run one image through the classifier and capture acts/grads.

    ``target_class`` picks which pre-softmax logit is differentiated;
    it defaults to the predicted class.
    """
    final_conv = getattr(model, "final_conv", None)
    if not isinstance(final_conv, torch.nn.Module):
        raise ExportError("model exposes no final convolutional feature map ('final_conv')")

    captured: list[torch.Tensor] = []
    handle = final_conv.register_forward_hook(lambda mod, inp, out: captured.append(out))
    try:
        logits = model(_to_model_input(image))
    finally:
        handle.remove()
    if not captured:
        raise ExportError("final_conv was never reached during the forward pass")
    features = captured[-1]
    if features.ndim != 4:
        raise ExportError(
            f"final_conv must produce a 4-D feature map, got shape {tuple(features.shape)}"
        )
    if logits.shape != (1, len(CLASSES)):
        raise ExportError(f"classifier must emit {len(CLASSES)} logits, got {tuple(logits.shape)}")

    predicted_idx = int(logits[0].argmax())
    target = predicted_idx if target_class is None else int(target_class)
    if not 0 <= target < len(CLASSES):
        raise ExportError(f"target class index must lie in 0..{len(CLASSES) - 1}, got {target}")

    (grad,) = torch.autograd.grad(logits[0, target], features)
    if grad.shape != features.shape:
        raise ExportError(
            f"gradient shape {tuple(grad.shape)} does not match features {tuple(features.shape)}"
        )

    acts = features[0].detach().permute(1, 2, 0).numpy().astype(np.float32)
    grads = grad[0].permute(1, 2, 0).numpy().astype(np.float32)
    return ScanExport(acts=acts, grads=grads, predicted=CLASSES[predicted_idx], target=target)


def export_segmentation(image: np.ndarray, segmenter: torch.nn.Module) -> np.ndarray:
    """Per-pixel argmax labels from the segmenter, ties toward the lower index."""
    with torch.no_grad():
        x = np.asarray(image, dtype=np.float32)
        if x.ndim != 2 or x.size == 0:
            raise ExportError(f"image must be a nonempty 2-D array, got shape {x.shape}")
        scores = segmenter(torch.from_numpy(x)[None, None])
    if scores.ndim != 4 or scores.shape[1] != NUM_REGIONS:
        raise ExportError(
            f"segmenter must emit {NUM_REGIONS} classes per pixel, got shape {tuple(scores.shape)}"
        )
    # numpy argmax returns the first maximum, which is the lower label
    return np.argmax(scores[0].numpy(), axis=0).astype(np.uint8)


def truth_from_name(scan_id: str) -> str | None:
    """Class name from a Kermany-style file stem like ``CNV-53018-1``."""
    prefix = re.split(r"[-_]", scan_id, maxsplit=1)[0].lower()
    return _CLASS_BY_LOWER.get(prefix)


def export_batch(images_dir, out_dir, seed: int = 0, checkpoint=None) -> dict:
    """Export every PGM image in a directory and write the batch manifest.

    Returns the manifest dict that was written to ``out_dir/manifest.json``.
    """
    images_dir = Path(images_dir)
    out_dir = Path(out_dir)
    image_paths = sorted(images_dir.glob("*.pgm"))
    if not image_paths:
        raise ExportError(f"no .pgm images found in {images_dir}")

    if checkpoint is not None:
        classifier, segmenter = load_checkpoint(checkpoint)
    else:
        classifier, segmenter = build_models(seed=seed)

    for sub in ("acts", "grads", "labels"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)

    scans = []
    for path in image_paths:
        scan_id = path.stem
        image = read_image_pgm(path)
        result = export_scan(image, classifier)
        labels = export_segmentation(image, segmenter)

        acts_rel = f"acts/{scan_id}.rlt"
        grads_rel = f"grads/{scan_id}.rlt"
        labels_rel = f"labels/{scan_id}.pgm"
        write_tensor(result.acts, out_dir / acts_rel)
        write_tensor(result.grads, out_dir / grads_rel)
        write_labelmap(labels, out_dir / labels_rel)

        entry = {
            "id": scan_id,
            "acts": acts_rel,
            "grads": grads_rel,
            "labels": labels_rel,
            "predicted": result.predicted,
            "target": result.target,
        }
        truth = truth_from_name(scan_id)
        if truth is not None:
            entry["truth"] = truth
        scans.append(entry)

    manifest = {"scans": scans}
    with open(out_dir / "manifest.json", "w") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
