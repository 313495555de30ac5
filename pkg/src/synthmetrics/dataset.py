"""Image-set ingestion, manifests, and deterministic seeded subsampling.

Supported on-disk sources:

* IDX: the big-endian binary tensor format used by MNIST-family datasets.
  Layout: magic ``0x00 0x00 0x08 0x03`` (unsigned byte, rank 3), three
  big-endian u32 sizes (count, rows, cols), then ``count*rows*cols`` unsigned
  bytes, row-major.
* Image directories: flat directories of 8-bit grayscale PNG files, loaded in
  byte-lexicographic filename order so downstream seeded subsampling is
  reproducible across filesystems.
* Manifests: UTF-8 text files, one entry per line,
  ``class_label<TAB>provenance<TAB>format<TAB>path`` with format ``idx`` or
  ``image_dir``. Relative paths resolve against the manifest's directory.

Subsampling selects ``floor(fraction * count)`` images uniformly without
replacement using a PCG64 generator (see :mod:`synthmetrics.seeding`):
``indices = sort(Generator.choice(count, n, replace=False))``, so the selected
images keep their original relative order and ``fraction = 1.0`` is the
identity.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DimensionMismatchError,
    EmptySetError,
    FormatError,
    ManifestError,
    TooFewSamplesError,
    TruncationError,
)
from .seeding import make_rng

PROVENANCES = ("real", "synthetic")
MANIFEST_FORMATS = ("idx", "image_dir")

IDX_MAGIC = b"\x00\x00\x08\x03"


@dataclass(frozen=True)
class ImageSet:
    """A labeled collection of same-shape grayscale images.

    ``pixels`` is an (N, H, W) array; uint8 in [0, 255] when
    ``value_range == 255.0``, float64 in [0, 1] when ``value_range == 1.0``.
    The array is frozen after construction, so instances are safe to share
    across threads.
    """

    class_label: str
    provenance: str
    pixels: np.ndarray
    value_range: float = 255.0

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        px = np.asarray(self.pixels)
        if px.ndim != 3:
            raise ValueError(f"pixels must be (N, H, W), got shape {px.shape}")
        if px.shape[0] < 1:
            raise EmptySetError("an ImageSet needs at least one image")
        if self.value_range == 255.0:
            if px.dtype != np.uint8:
                px = px.astype(np.uint8)  # validated below against the original
                if not np.array_equal(px, self.pixels):
                    raise ValueError("value_range 255 requires integer pixels in [0, 255]")
        elif self.value_range == 1.0:
            px = px.astype(np.float64)
            if px.min() < 0.0 or px.max() > 1.0:
                raise ValueError("value_range 1 requires pixels in [0, 1]")
        else:
            raise ValueError(f"value_range must be 255.0 or 1.0, got {self.value_range}")
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def count(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[2])

    def take(self, indices: np.ndarray) -> "ImageSet":
        """Return a new set holding ``pixels[indices]`` in the given order."""
        return ImageSet(
            class_label=self.class_label,
            provenance=self.provenance,
            pixels=self.pixels[np.asarray(indices)],
            value_range=self.value_range,
        )

    def to_unit_range(self) -> "ImageSet":
        """Rescale an 8-bit set to [0, 1] floats (identity if already unit)."""
        if self.value_range == 1.0:
            return self
        return ImageSet(
            class_label=self.class_label,
            provenance=self.provenance,
            pixels=self.pixels.astype(np.float64) / 255.0,
            value_range=1.0,
        )


@dataclass(frozen=True)
class SubsampleSpec:
    """Fraction in (0, 1] plus the seed driving the selection."""

    fraction: float
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")


def floor_count(fraction: float, count: int) -> int:
    """floor(fraction * count), snapping products within 1e-9 of an integer.

    Guards against binary-float artifacts such as ``0.1 * 30 == 2.999...``,
    which would otherwise floor to 2 where exact arithmetic gives 3.
    """
    product = fraction * count
    nearest = round(product)
    if abs(product - nearest) < 1e-9:
        return int(nearest)
    return int(math.floor(product))


def subsample_indices(count: int, n: int, seed: int) -> np.ndarray:
    """Choose ``n`` of ``count`` indices without replacement, sorted ascending.

    Deterministic for a given seed: PCG64 + ``Generator.choice``. ``n == count``
    returns ``0..count-1`` so full-fraction subsampling is the identity.
    """
    if n > count:
        raise ValueError(f"cannot choose {n} of {count} indices")
    if n == count:
        return np.arange(count, dtype=np.int64)
    rng = make_rng(seed)
    return np.sort(rng.choice(count, size=n, replace=False).astype(np.int64))


def subsample(image_set: ImageSet, spec: SubsampleSpec) -> ImageSet:
    """Seeded uniform subsample of floor(fraction * count) images.

    Raises :class:`TooFewSamplesError` when the result would hold fewer than
    two images, since the pairwise metrics downstream are undefined there.
    """
    n = floor_count(spec.fraction, image_set.count)
    if n < 2:
        raise TooFewSamplesError(
            f"fraction {spec.fraction} of {image_set.count} images keeps {n}; "
            "pairwise metrics need at least 2"
        )
    if n == image_set.count:
        return image_set
    return image_set.take(subsample_indices(image_set.count, n, spec.seed))


# ---------------------------------------------------------------------------
# IDX format
# ---------------------------------------------------------------------------

def load_idx(path, class_label: str = "unlabeled", provenance: str = "real") -> ImageSet:
    """Load a rank-3 unsigned-byte IDX file as one class's images."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4 or raw[:4] != IDX_MAGIC:
        got = raw[:4].hex() if len(raw) >= 4 else raw.hex()
        raise FormatError(
            f"{path}: bad IDX magic, expected {IDX_MAGIC.hex()} got {got or '<empty>'}"
        )
    if len(raw) < 16:
        raise TruncationError(f"{path} header", 16, len(raw))
    count, rows, cols = struct.unpack(">III", raw[4:16])
    expected = count * rows * cols
    payload = raw[16:]
    if len(payload) < expected:
        raise TruncationError(str(path), expected, len(payload))
    if len(payload) > expected:
        raise FormatError(
            f"{path}: payload holds {len(payload)} bytes but header declares {expected}"
        )
    if count < 1:
        raise EmptySetError(f"{path}: IDX file declares zero images")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)
    return ImageSet(class_label=class_label, provenance=provenance, pixels=pixels)


def write_idx(image_set: ImageSet, path) -> None:
    """Write an 8-bit set back out as a rank-3 IDX file."""
    if image_set.value_range != 255.0:
        raise ValueError("IDX export requires an 8-bit ([0, 255]) image set")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(IDX_MAGIC)
        fh.write(struct.pack(">III", image_set.count, image_set.height, image_set.width))
        fh.write(image_set.pixels.tobytes())


# ---------------------------------------------------------------------------
# Image directories
# ---------------------------------------------------------------------------

def load_image_dir(path, class_label: str, provenance: str) -> ImageSet:
    """Load all PNGs in a directory, sorted by filename bytes.

    Non-grayscale images are converted to 8-bit grayscale on load. All files
    must share one resolution; the first offending file is named otherwise.
    """
    path = Path(path)
    if not path.is_dir():
        raise EmptySetError(f"{path} is not a directory")
    files = sorted(
        (p for p in path.iterdir() if p.suffix.lower() == ".png"),
        key=lambda p: p.name.encode("utf-8"),
    )
    if not files:
        raise EmptySetError(f"{path} contains no .png images")
    frames = []
    shape = None
    for f in files:
        with Image.open(f) as img:
            arr = np.asarray(img.convert("L"), dtype=np.uint8)
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise DimensionMismatchError(
                f"{f} is {arr.shape[1]}x{arr.shape[0]} but {files[0].name} "
                f"is {shape[1]}x{shape[0]}"
            )
        frames.append(arr)
    return ImageSet(
        class_label=class_label,
        provenance=provenance,
        pixels=np.stack(frames, axis=0),
    )


def write_image_dir(image_set: ImageSet, path) -> None:
    """Write each image as ``000000.png``, ``000001.png``, ... under ``path``.

    Zero-padded names keep byte-lexicographic order equal to index order, so
    ``load_image_dir(write_image_dir(s))`` returns pixels identical to ``s``.
    """
    if image_set.value_range != 255.0:
        raise ValueError("PNG export requires an 8-bit ([0, 255]) image set")
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for i in range(image_set.count):
        Image.fromarray(image_set.pixels[i], mode="L").save(path / f"{i:06d}.png")


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    class_label: str
    provenance: str
    format: str
    path: Path


@dataclass
class Manifest:
    """Resolved manifest: where each (class, provenance) image set lives."""

    root: Path
    entries: list[ManifestEntry] = field(default_factory=list)

    def find(self, class_label: str, provenance: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.class_label == class_label and entry.provenance == provenance:
                return entry
        raise ManifestError(
            f"manifest has no entry for class {class_label!r} with provenance {provenance!r}"
        )

    def classes(self) -> list[str]:
        seen = []
        for entry in self.entries:
            if entry.class_label not in seen:
                seen.append(entry.class_label)
        return seen

    def load_set(self, class_label: str, provenance: str) -> ImageSet:
        entry = self.find(class_label, provenance)
        if entry.format == "idx":
            return load_idx(entry.path, class_label=class_label, provenance=provenance)
        return load_image_dir(entry.path, class_label=class_label, provenance=provenance)


def read_manifest(path) -> Manifest:
    """Parse and validate a manifest file.

    Duplicate (class, provenance) pairs and missing referenced paths are
    rejected here rather than at first use.
    """
    path = Path(path)
    root = path.parent
    entries = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ManifestError(
                f"{path}:{lineno}: expected 4 tab-separated fields, got {len(fields)}"
            )
        class_label, provenance, fmt, raw_path = fields
        if provenance not in PROVENANCES:
            raise ManifestError(
                f"{path}:{lineno}: provenance must be one of {PROVENANCES}, got {provenance!r}"
            )
        if fmt not in MANIFEST_FORMATS:
            raise ManifestError(
                f"{path}:{lineno}: format must be one of {MANIFEST_FORMATS}, got {fmt!r}"
            )
        key = (class_label, provenance)
        if key in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate entry for {key}")
        seen.add(key)
        resolved = Path(raw_path)
        if not resolved.is_absolute():
            resolved = root / resolved
        if not resolved.exists():
            raise ManifestError(f"{path}:{lineno}: referenced path does not exist: {resolved}")
        entries.append(ManifestEntry(class_label, provenance, fmt, resolved))
    return Manifest(root=root, entries=entries)


def write_manifest(manifest: Manifest, path) -> None:
    path = Path(path)
    lines = [
        f"{e.class_label}\t{e.provenance}\t{e.format}\t{e.path}" for e in manifest.entries
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
