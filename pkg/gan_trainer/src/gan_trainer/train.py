"""Adversarial training loop, checkpointing, and synthetic-set export.

One run trains on a single class and writes, under ``<out_dir>``:

* ``<class>/synthetic/*.png`` -- the generated set, sized 1:1 with the real
  class unless the config overrides the count;
* ``checkpoint.pt`` -- generator/discriminator weights plus the config;
* ``losses.csv`` -- per-epoch mean generator/discriminator losses.

A non-finite loss aborts the run immediately; the checkpoint written at the
moment of divergence is kept for post-mortems. Reproducibility holds at the
framework level: same seed, same torch build, same outputs.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .config import GanConfig
from .data import load_class_images, write_png_dir
from .models import Discriminator, Generator


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; the checkpoint is retained."""

    def __init__(self, message: str, checkpoint_path: Path):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path


def check_finite_losses(g_loss: float, d_loss: float, save_checkpoint) -> None:
    """Abort on NaN/inf, invoking ``save_checkpoint`` before raising."""
    if np.isfinite(g_loss) and np.isfinite(d_loss):
        return
    path = save_checkpoint()
    raise TrainingDiverged(
        f"training diverged (generator loss {g_loss}, discriminator loss {d_loss}); "
        f"checkpoint retained at {path}",
        path,
    )


def _to_training_tensor(images: np.ndarray) -> torch.Tensor:
    """uint8 (N, H, W) -> float tensor in [-1, 1], shape (N, 1, H, W)."""
    scaled = images.astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(scaled).unsqueeze(1)


def generate_images(
    generator: Generator, count: int, seed: int, batch_size: int = 256
) -> np.ndarray:
    """Sample ``count`` images; tanh output rescaled to uint8 [0, 255]."""
    generator.eval()
    rng = torch.Generator().manual_seed(seed)
    frames = []
    with torch.no_grad():
        remaining = count
        while remaining > 0:
            n = min(batch_size, remaining)
            z = torch.randn(n, generator.latent_dim, generator=rng)
            out = generator(z).squeeze(1).numpy()
            frames.append(out)
            remaining -= n
    stacked = np.concatenate(frames, axis=0)
    return np.clip(np.rint((stacked + 1.0) * 127.5), 0, 255).astype(np.uint8)


def train_and_generate(config: GanConfig) -> dict:
    """Train the per-class DCGAN and export the synthetic set.

    Returns a summary dict with the output paths and final losses.
    """
    images = load_class_images(config.class_source.path, config.class_source.format)
    if images.shape[1:] != (28, 28):
        raise ValueError(
            f"trainer expects 28x28 images, got {images.shape[2]}x{images.shape[1]}"
        )
    if len(images) < 2:
        raise ValueError("training needs at least 2 real images")
    if config.batch_size == 1:
        raise ValueError("batch_size 1 is incompatible with batch-normalized training")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out_dir / "checkpoint.pt"

    torch.manual_seed(config.seed)
    generator = Generator(config.latent_dim)
    discriminator = Discriminator()
    criterion = nn.BCEWithLogitsLoss()
    betas = (config.momentum, 0.999)
    opt_g = torch.optim.Adam(generator.parameters(), lr=config.learning_rate, betas=betas)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=config.learning_rate, betas=betas)

    dataset = _to_training_tensor(images)
    # A trailing batch of one breaks batch norm in training mode; drop it
    # when there is a full batch to fall back on.
    drop_last = len(dataset) % config.batch_size == 1 and len(dataset) > config.batch_size
    loader = torch.utils.data.DataLoader(
        torch.utils.data.TensorDataset(dataset),
        batch_size=config.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(config.seed),
        drop_last=drop_last,
    )

    def save_checkpoint() -> Path:
        torch.save(
            {
                "generator": generator.state_dict(),
                "discriminator": discriminator.state_dict(),
                "config": asdict(config),
            },
            checkpoint_path,
        )
        return checkpoint_path

    history = []
    for epoch in range(config.epochs):
        generator.train()
        discriminator.train()
        g_losses = []
        d_losses = []
        for (real_batch,) in loader:
            n = real_batch.shape[0]
            real_labels = torch.ones(n, 1)
            fake_labels = torch.zeros(n, 1)

            # Discriminator: real up, fake down.
            z = torch.randn(n, config.latent_dim)
            fake_batch = generator(z).detach()
            opt_d.zero_grad()
            d_loss = criterion(discriminator(real_batch), real_labels) + criterion(
                discriminator(fake_batch), fake_labels
            )
            d_loss.backward()
            opt_d.step()

            # Generator: make the discriminator call fakes real.
            z = torch.randn(n, config.latent_dim)
            opt_g.zero_grad()
            g_loss = criterion(discriminator(generator(z)), real_labels)
            g_loss.backward()
            opt_g.step()

            g_losses.append(float(g_loss.detach()))
            d_losses.append(float(d_loss.detach()))
        epoch_g = float(np.mean(g_losses))
        epoch_d = float(np.mean(d_losses))
        history.append((epoch, epoch_g, epoch_d))
        check_finite_losses(epoch_g, epoch_d, save_checkpoint)

    save_checkpoint()
    loss_path = out_dir / "losses.csv"
    loss_path.write_text(
        "epoch,generator_loss,discriminator_loss\n"
        + "\n".join(f"{e},{g!r},{d!r}" for e, g, d in history)
        + "\n",
        encoding="utf-8",
    )

    count = config.output_count if config.output_count is not None else len(images)
    synthetic = generate_images(generator, count, seed=config.seed)
    synth_dir = write_png_dir(
        synthetic, out_dir / config.class_source.class_label / "synthetic"
    )
    return {
        "synthetic_dir": synth_dir,
        "checkpoint": checkpoint_path,
        "losses_csv": loss_path,
        "real_count": len(images),
        "synthetic_count": count,
        "final_generator_loss": history[-1][1],
        "final_discriminator_loss": history[-1][2],
    }


def load_generator(checkpoint_path) -> Generator:
    state = torch.load(checkpoint_path, map_location="cpu", weights_only=False)
    latent_dim = state["config"]["latent_dim"]
    generator = Generator(latent_dim)
    generator.load_state_dict(state["generator"])
    generator.eval()
    return generator
