"""Training configuration: dataclass plus YAML loading."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml


@dataclass
class ClassSource:
    """Where one class's real images come from."""

    path: str
    format: str = "idx"  # "idx" | "image_dir"
    class_label: str = "unlabeled"

    def __post_init__(self):
        if self.format not in ("idx", "image_dir"):
            raise ValueError(f"format must be 'idx' or 'image_dir', got {self.format!r}")


@dataclass
class GanConfig:
    """Hyperparameters and IO for one per-class training run.

    ``output_count=None`` means "equal to the real image count" (a 1:1
    real:synthetic ratio).
    """

    class_source: ClassSource
    out_dir: str
    latent_dim: int = 100
    batch_size: int = 128
    epochs: int = 500
    learning_rate: float = 2e-4
    momentum: float = 0.5  # Adam beta1
    seed: int = 0
    output_count: int | None = None

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.output_count is not None and self.output_count < 1:
            raise ValueError("output_count must be >= 1 when set")


def load_config(path) -> GanConfig:
    """Read a YAML file mirroring :class:`GanConfig`."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or "class_source" not in raw:
        raise ValueError(f"{path}: expected a mapping with a class_source block")
    try:
        source = ClassSource(**raw.pop("class_source"))
        return GanConfig(class_source=source, **raw)
    except TypeError as exc:
        raise ValueError(f"{path}: {exc}") from exc
