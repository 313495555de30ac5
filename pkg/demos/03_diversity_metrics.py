"""Intra-class diversity: pairwise MS-SSIM and cosine distance.

Two constructed sets make the direction of each metric obvious: a mode-
collapsed set (forty near-copies of one template) against a varied set.
Lower mean pairwise MS-SSIM means more diversity; higher mean cosine
distance means more diversity.
"""

import numpy as np

from synthmetrics import (
    ImageSet,
    PairingSpec,
    cosine_diversity,
    embed_reference,
    ms_ssim_diversity,
)

rng = np.random.default_rng(23)


def blob_image(center, size=28):
    """A soft bright blob on a dark field."""
    yy, xx = np.mgrid[0:size, 0:size]
    cy, cx = center
    img = 220.0 * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / 40.0)
    return np.clip(img + rng.normal(0, 6, (size, size)), 0, 255).astype(np.uint8)


# mode collapse: every image is the same blob, up to sensor noise
collapsed = ImageSet(
    "demo", "synthetic",
    np.stack([blob_image((14, 14)) for _ in range(40)]),
)
# varied: the blob wanders over the field
varied = ImageSet(
    "demo", "synthetic",
    np.stack([blob_image((rng.integers(6, 22), rng.integers(6, 22))) for _ in range(40)]),
)

pairing = PairingSpec(pair_count=100, seed=5)

print("mean pairwise MS-SSIM (lower = more diverse)")
for name, images in (("collapsed", collapsed), ("varied", varied)):
    report = ms_ssim_diversity(images, pairing)
    print(f"  {name:<9} {report.value:.4f}   ({report.count} pairs)")

print("\nmean pairwise cosine distance over embeddings (higher = more diverse)")
for name, images in (("collapsed", collapsed), ("varied", varied)):
    report = cosine_diversity(embed_reference(images), pairing,
                              class_label="demo", provenance="synthetic")
    print(f"  {name:<9} {report.value:.4f}   ({report.count} pairs, "
          f"embedder {report.embedder_id})")

# the pairing protocol is part of the result: exhaustive below the threshold
small = ImageSet("demo", "synthetic", varied.pixels[:12])
exhaustive = ms_ssim_diversity(small, PairingSpec(pair_count=100, seed=5))
print(f"\n12-image set: C(12,2) = 66 <= 200, so all {exhaustive.count} pairs are used")
