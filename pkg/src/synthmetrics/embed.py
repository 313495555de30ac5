"""Image-to-feature-vector embedding and the EMB1 interchange format.

The built-in reference embedder is deterministic and dependency-free: each
image is area-average pooled onto an 8x8 grid (cell (i, j) averages rows
``floor(i*H/8) <= r < floor((i+1)*H/8)`` and the analogous columns), the grid
is flattened row-major, and pixel values are rescaled to [0, 1]. It stands in
for the deep encoders FID is usually quoted with; scores are comparable only
across runs that share one embedder, so every embedding carries an
``embedder_id`` and mismatches are refused downstream.

Externally computed embeddings enter through the EMB1 file format:

    magic "EMB1" | u16 LE id length | UTF-8 embedder id | u32 LE N | u32 LE D
    | N*D float32 LE, row-major

Matrices are stored as float32 in memory as well, so a write/read round-trip
reproduces the in-memory matrix bit for bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import ImageSet
from .errors import DimensionMismatchError, FormatError, TruncationError

REF_EMBEDDER_ID = "ref-avgpool-64"
REF_GRID = 8

EMB_MAGIC = b"EMB1"


@dataclass(frozen=True)
class EmbedderSpec:
    """Identity and output dimensionality of an embedder."""

    id: str
    dims: int
    description: str = ""


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x D float32 feature matrix, one row per image."""

    values: np.ndarray
    embedder_id: str

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values), dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"embeddings must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 2:
            raise ValueError(f"embeddings need N >= 1 and D >= 2, got {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("embeddings contain non-finite entries")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def count(self) -> int:
        return int(self.values.shape[0])

    @property
    def dims(self) -> int:
        return int(self.values.shape[1])

    def take(self, indices: np.ndarray) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.values[np.asarray(indices)], self.embedder_id)


def embed_reference(image_set: ImageSet) -> EmbeddingMatrix:
    """Embed every image with the built-in 64-dim average-pool embedder."""
    h, w = image_set.height, image_set.width
    if h < REF_GRID or w < REF_GRID:
        raise DimensionMismatchError(
            f"reference embedder needs images of at least {REF_GRID}x{REF_GRID}, "
            f"got {w}x{h}"
        )
    pixels = image_set.pixels.astype(np.float64)
    if image_set.value_range == 255.0:
        pixels = pixels / 255.0
    row_edges = [(i * h) // REF_GRID for i in range(REF_GRID + 1)]
    col_edges = [(j * w) // REF_GRID for j in range(REF_GRID + 1)]
    out = np.empty((image_set.count, REF_GRID * REF_GRID), dtype=np.float64)
    for i in range(REF_GRID):
        for j in range(REF_GRID):
            block = pixels[:, row_edges[i] : row_edges[i + 1], col_edges[j] : col_edges[j + 1]]
            out[:, i * REF_GRID + j] = block.mean(axis=(1, 2))
    return EmbeddingMatrix(values=out.astype(np.float32), embedder_id=REF_EMBEDDER_ID)


def write_embeddings(matrix: EmbeddingMatrix, path) -> None:
    """Serialize a matrix to an EMB1 file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    id_bytes = matrix.embedder_id.encode("utf-8")
    if len(id_bytes) > 0xFFFF:
        raise ValueError("embedder_id too long for the EMB1 header")
    with open(path, "wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<H", len(id_bytes)))
        fh.write(id_bytes)
        fh.write(struct.pack("<II", matrix.count, matrix.dims))
        fh.write(np.ascontiguousarray(matrix.values, dtype="<f4").tobytes())


def read_embeddings(path) -> EmbeddingMatrix:
    """Read an EMB1 file back into a matrix, validating byte accounting."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4 or raw[:4] != EMB_MAGIC:
        raise FormatError(f"{path}: bad EMB1 magic")
    if len(raw) < 6:
        raise TruncationError(f"{path} header", 6, len(raw))
    (id_len,) = struct.unpack("<H", raw[4:6])
    header_len = 6 + id_len + 8
    if len(raw) < header_len:
        raise TruncationError(f"{path} header", header_len, len(raw))
    embedder_id = raw[6 : 6 + id_len].decode("utf-8")
    n, d = struct.unpack("<II", raw[6 + id_len : header_len])
    expected = n * d * 4
    payload = raw[header_len:]
    if len(payload) < expected:
        raise TruncationError(str(path), expected, len(payload))
    if len(payload) > expected:
        raise FormatError(
            f"{path}: payload holds {len(payload)} bytes but header declares {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(n, d)
    return EmbeddingMatrix(values=values, embedder_id=embedder_id)
