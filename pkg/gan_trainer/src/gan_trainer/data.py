"""Readers and writers for the interchange formats the evaluator consumes.

This package talks to the evaluation toolkit purely through files: rank-3
IDX tensors or PNG directories in, PNG directories and EMB1 embedding files
out. The byte layouts are reimplemented here from their definitions rather
than imported, so the trainer stays a standalone package.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

IDX_MAGIC = b"\x00\x00\x08\x03"
EMB_MAGIC = b"EMB1"


def read_idx(path) -> np.ndarray:
    """Rank-3 unsigned-byte IDX file -> (N, H, W) uint8 array."""
    raw = Path(path).read_bytes()
    if raw[:4] != IDX_MAGIC:
        raise ValueError(f"{path}: not a rank-3 unsigned-byte IDX file")
    count, rows, cols = struct.unpack(">III", raw[4:16])
    payload = raw[16:]
    if len(payload) != count * rows * cols:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes, header declares {count * rows * cols}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)


def read_image_dir(path) -> np.ndarray:
    """PNG directory -> (N, H, W) uint8, byte-lexicographic filename order."""
    path = Path(path)
    files = sorted(
        (p for p in path.iterdir() if p.suffix.lower() == ".png"),
        key=lambda p: p.name.encode("utf-8"),
    )
    if not files:
        raise ValueError(f"{path}: no .png files")
    frames = [np.asarray(Image.open(f).convert("L"), dtype=np.uint8) for f in files]
    shapes = {f.shape for f in frames}
    if len(shapes) != 1:
        raise ValueError(f"{path}: mixed image dimensions {sorted(shapes)}")
    return np.stack(frames)


def load_class_images(source_path, source_format: str) -> np.ndarray:
    if source_format == "idx":
        return read_idx(source_path)
    return read_image_dir(source_path)


def write_png_dir(images: np.ndarray, out_dir) -> Path:
    """(N, H, W) uint8 -> zero-padded PNGs, names sorting like indices."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(images):
        Image.fromarray(frame, mode="L").save(out_dir / f"{i:06d}.png")
    return out_dir


def write_emb1(values: np.ndarray, embedder_id: str, path) -> Path:
    """(N, D) floats -> EMB1 file (float32 little-endian payload)."""
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2:
        raise ValueError(f"embeddings must be 2-D, got shape {values.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    id_bytes = embedder_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<H", len(id_bytes)))
        fh.write(id_bytes)
        fh.write(struct.pack("<II", values.shape[0], values.shape[1]))
        fh.write(values.tobytes())
    return path
