"""gan_trainer: per-class DCGAN training with evaluator-compatible exports."""

__version__ = "0.1.0"

from .config import ClassSource, GanConfig, load_config
from .data import read_idx, read_image_dir, write_emb1, write_png_dir
from .embeddings import (
    RANDOM_CNN_ID,
    RESNET18_ID,
    EncoderUnavailableError,
    export_deep_embeddings,
)
from .models import Discriminator, Generator, parameter_counts
from .train import TrainingDiverged, generate_images, load_generator, train_and_generate

__all__ = [
    "__version__",
    "ClassSource",
    "GanConfig",
    "load_config",
    "read_idx",
    "read_image_dir",
    "write_emb1",
    "write_png_dir",
    "RANDOM_CNN_ID",
    "RESNET18_ID",
    "EncoderUnavailableError",
    "export_deep_embeddings",
    "Discriminator",
    "Generator",
    "parameter_counts",
    "TrainingDiverged",
    "generate_images",
    "load_generator",
    "train_and_generate",
]
