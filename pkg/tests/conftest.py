import numpy as np
import pytest

from synthmetrics import ImageSet


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_image_set(
    rng, count=8, height=16, width=16, class_label="demo", provenance="real"
):
    pixels = rng.integers(0, 256, size=(count, height, width), dtype=np.uint8)
    return ImageSet(
        class_label=class_label, provenance=provenance, pixels=pixels
    )


@pytest.fixture
def small_set(rng):
    return random_image_set(rng)


def make_manifest(tmp_path, entries):
    """Write manifest lines `(class, provenance, fmt, relpath)` under tmp_path."""
    lines = [f"{c}\t{p}\t{f}\t{path}" for c, p, f, path in entries]
    manifest_path = tmp_path / "manifest.tsv"
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest_path
