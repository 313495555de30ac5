"""Feature encoders and EMB1 export for generated (or real) image sets.

Two encoders are available:

* ``resnet18`` -- torchvision's ImageNet-pretrained ResNet-18 with its
  classification head removed (512-D features; images are upsampled to
  224x224 and channel-tripled). Needs the pretrained weights to be present
  or downloadable; raises :class:`EncoderUnavailableError` otherwise.
* ``random-cnn`` -- a small convolutional stack with frozen, seed-fixed
  random weights (128-D). Untrained CNN features are a standard cheap
  baseline for Frechet-distance work and need nothing beyond torch, so this
  is the fully offline, deterministic path.

Either way the EMB1 file records the encoder's id, and the evaluator will
refuse to mix it with embeddings from any other encoder.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from torch import nn

from .data import read_image_dir, write_emb1

RANDOM_CNN_ID = "random-cnn-128-seed0"
RESNET18_ID = "resnet18-imagenet-512"


class EncoderUnavailableError(RuntimeError):
    """The requested encoder's dependencies or weights cannot be loaded."""


def _random_cnn() -> nn.Module:
    torch.manual_seed(0)  # frozen weights: same features everywhere
    return nn.Sequential(
        nn.Conv2d(1, 32, kernel_size=3, stride=2, padding=1),
        nn.ReLU(),
        nn.Conv2d(32, 64, kernel_size=3, stride=2, padding=1),
        nn.ReLU(),
        nn.Conv2d(64, 128, kernel_size=3, stride=2, padding=1),
        nn.ReLU(),
        nn.AdaptiveAvgPool2d(1),
        nn.Flatten(),
    )


def _encode_random_cnn(images: np.ndarray, batch_size: int) -> np.ndarray:
    net = _random_cnn().eval()
    scaled = torch.from_numpy(images.astype(np.float32) / 255.0).unsqueeze(1)
    outs = []
    with torch.no_grad():
        for start in range(0, len(scaled), batch_size):
            outs.append(net(scaled[start : start + batch_size]).numpy())
    return np.concatenate(outs, axis=0)


def _encode_resnet18(images: np.ndarray, batch_size: int) -> np.ndarray:
    try:
        from torchvision import models
    except ImportError as exc:
        raise EncoderUnavailableError(
            "the resnet18 encoder needs torchvision (pip install torchvision)"
        ) from exc
    try:
        net = models.resnet18(weights=models.ResNet18_Weights.IMAGENET1K_V1)
    except Exception as exc:
        raise EncoderUnavailableError(
            "could not load ImageNet weights for resnet18 (offline and not cached?); "
            "use the 'random-cnn' encoder for a fully offline path"
        ) from exc
    net.fc = nn.Identity()
    net.eval()
    mean = torch.tensor([0.485, 0.456, 0.406]).view(1, 3, 1, 1)
    std = torch.tensor([0.229, 0.224, 0.225]).view(1, 3, 1, 1)
    scaled = torch.from_numpy(images.astype(np.float32) / 255.0).unsqueeze(1)
    outs = []
    with torch.no_grad():
        for start in range(0, len(scaled), batch_size):
            batch = scaled[start : start + batch_size]
            batch = torch.nn.functional.interpolate(
                batch, size=(224, 224), mode="bilinear", align_corners=False
            )
            batch = (batch.repeat(1, 3, 1, 1) - mean) / std
            outs.append(net(batch).numpy())
    return np.concatenate(outs, axis=0)


ENCODERS = {
    "random-cnn": (RANDOM_CNN_ID, _encode_random_cnn),
    "resnet18": (RESNET18_ID, _encode_resnet18),
}


def export_deep_embeddings(
    image_dir, out_path, encoder: str = "resnet18", batch_size: int = 64
) -> Path:
    """Encode every PNG in ``image_dir`` and write an EMB1 file."""
    if encoder not in ENCODERS:
        raise ValueError(f"encoder must be one of {sorted(ENCODERS)}, got {encoder!r}")
    embedder_id, encode = ENCODERS[encoder]
    images = read_image_dir(image_dir)
    features = encode(images, batch_size)
    return write_emb1(features, embedder_id, out_path)
