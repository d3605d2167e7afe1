"""Desk-scale convolutional models for exercising the export path.

The attribution math downstream is model-agnostic, so these stay tiny
and randomly initialized: a 4-class classifier whose last convolutional
block is exposed as ``final_conv``, and a 9-class per-pixel segmenter.
Construction is deterministic given a seed, and both can round-trip
through a checkpoint file.
"""

from __future__ import annotations

import torch
from torch import nn

CLASSES = ("CNV", "DME", "DRUSEN", "NORMAL")
NUM_REGIONS = 9
INPUT_SIZE = 64  # classifier input resolution; images are resized to this


class ToyClassifier(nn.Module):
    """Small CNN: two downsampling blocks, then ``final_conv`` -> GAP -> logits.

    The ``final_conv`` attribute is the contract hooked by the export:
    its output is the feature map whose activations and gradients are
    written out.
    """

    def __init__(self, channels: int = 12) -> None:
        super().__init__()
        self.stem = nn.Sequential(
            nn.Conv2d(1, 8, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(8, 16, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
        )
        self.final_conv = nn.Sequential(
            nn.Conv2d(16, channels, 3, padding=1),
            nn.ReLU(),
        )
        self.head = nn.Linear(channels, len(CLASSES))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        features = self.final_conv(self.stem(x))
        pooled = features.mean(dim=(2, 3))
        return self.head(pooled)


class ToySegmenter(nn.Module):
    """Per-pixel 9-class scores at the input resolution."""

    def __init__(self) -> None:
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(1, 16, 3, padding=1),
            nn.ReLU(),
            nn.Conv2d(16, NUM_REGIONS, 1),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


def build_models(seed: int = 0) -> tuple[ToyClassifier, ToySegmenter]:
    """Construct both models with weights drawn deterministically from the seed."""
    torch.manual_seed(seed)
    classifier = ToyClassifier()
    segmenter = ToySegmenter()
    classifier.eval()
    segmenter.eval()
    return classifier, segmenter


def save_checkpoint(classifier: nn.Module, segmenter: nn.Module, path) -> None:
    torch.save(
        {"classifier": classifier.state_dict(), "segmenter": segmenter.state_dict()},
        path,
    )


def load_checkpoint(path) -> tuple[ToyClassifier, ToySegmenter]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    classifier, segmenter = build_models(seed=0)
    classifier.load_state_dict(payload["classifier"])
    segmenter.load_state_dict(payload["segmenter"])
    return classifier, segmenter
