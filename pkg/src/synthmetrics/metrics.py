"""The three evaluation metrics: MS-SSIM diversity, cosine diversity, FID.

Intra-class diversity is the mean pairwise score over image (or embedding)
pairs drawn from one set: lower mean MS-SSIM or higher mean cosine distance
means more diverse samples. Quality is the Frechet distance between Gaussians
fitted to real and synthetic embeddings; lower means the synthetic set is
closer to the real one.

Pair selection: when a set has at most ``exhaustive_threshold`` unordered
pairs (or ``pair_count`` covers them all) every pair is evaluated; otherwise
``pair_count`` distinct unordered pairs are sampled without replacement by
drawing linear indices in [0, C(N,2)) with a seeded PCG64 generator and
decoding them to (i, j). Reports always record how many pairs were used,
because published scores are meaningless without their sample sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dataset import ImageSet
from .embed import EmbeddingMatrix
from .errors import (
    DimensionMismatchError,
    EmbedderMismatchError,
    NumericalError,
    TooFewSamplesError,
    ZeroNormRowError,
)
from .seeding import make_rng
from .ssim import SsimParams, ms_ssim

METRIC_IDS = ("ms_ssim_diversity", "cosine_diversity", "fid")

#: provenance_compared value used for the real-vs-synthetic FID report.
FID_COMPARISON = "real_vs_synthetic"


@dataclass(frozen=True)
class PairingSpec:
    """How many pairs to evaluate and how to choose them."""

    pair_count: int = 100
    seed: int = 0
    exhaustive_threshold: int = 200

    def __post_init__(self):
        if self.pair_count < 1:
            raise ValueError("pair_count must be >= 1")
        if self.exhaustive_threshold < 0:
            raise ValueError("exhaustive_threshold must be >= 0")


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix fitted to an embedding matrix."""

    mean: np.ndarray
    cov: np.ndarray
    sample_count: int
    embedder_id: str | None = None

    def __post_init__(self):
        mean = np.ascontiguousarray(np.asarray(self.mean, dtype=np.float64))
        cov = np.ascontiguousarray(np.asarray(self.cov, dtype=np.float64))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise ValueError(
                f"mean must be (D,) and cov (D, D); got {mean.shape} and {cov.shape}"
            )
        if self.sample_count < 2:
            raise TooFewSamplesError("Gaussian statistics need at least 2 samples")
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise ValueError("covariance must be symmetric within 1e-9")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dims(self) -> int:
        return int(self.mean.size)


@dataclass(frozen=True)
class MetricReport:
    """One metric value plus the context needed to reproduce it."""

    metric_id: str
    class_label: str
    provenance_compared: str
    value: float
    fraction: float = 1.0
    trial: int = 0
    seed: int = 0
    count: int = 0
    embedder_id: str | None = None

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise ValueError(f"unknown metric_id {self.metric_id!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"{self.metric_id} produced a non-finite value")
        if self.metric_id == "fid" and self.value < 0:
            raise ValueError("fid must be non-negative")
        if self.metric_id == "cosine_diversity" and not (0.0 <= self.value <= 2.0):
            raise ValueError("cosine_diversity must lie in [0, 2]")
        if self.metric_id == "ms_ssim_diversity" and not (-1.0 <= self.value <= 1.0 + 1e-9):
            raise ValueError("ms_ssim_diversity must lie in [-1, 1]")


# ---------------------------------------------------------------------------
# Pair selection
# ---------------------------------------------------------------------------

def _decode_pair(linear: int, n: int) -> tuple[int, int]:
    """Map a linear index in [0, C(n,2)) to the (i, j), i < j, unordered pair.

    Lexicographic layout: pair (i, j) sits at i*(2n - i - 1)/2 + (j - i - 1).
    Inverted with exact integer arithmetic.
    """
    rem = n * (n - 1) // 2 - 1 - linear
    # rem indexes pairs from the end; row from the triangular root.
    t = (math.isqrt(8 * rem + 1) - 1) // 2
    i = n - 2 - t
    j = linear - (i * (2 * n - i - 1)) // 2 + i + 1
    return i, j


def _covers_all_pairs(n: int, pairing: PairingSpec) -> bool:
    if n < 2:
        raise TooFewSamplesError(f"pairwise metrics need at least 2 items, got {n}")
    total = n * (n - 1) // 2
    return total <= pairing.exhaustive_threshold or pairing.pair_count >= total


def select_pairs(n: int, pairing: PairingSpec) -> tuple[np.ndarray, np.ndarray, bool]:
    """Return (i_idx, j_idx, exhaustive) for a set of ``n`` items."""
    if _covers_all_pairs(n, pairing):
        i_idx, j_idx = np.triu_indices(n, k=1)
        return i_idx.astype(np.int64), j_idx.astype(np.int64), True
    rng = make_rng(pairing.seed)
    total = n * (n - 1) // 2
    linear = np.sort(rng.choice(total, size=pairing.pair_count, replace=False))
    pairs = np.array([_decode_pair(int(k), n) for k in linear], dtype=np.int64)
    return pairs[:, 0], pairs[:, 1], False


# ---------------------------------------------------------------------------
# Diversity metrics
# ---------------------------------------------------------------------------

def ms_ssim_diversity(
    image_set: ImageSet,
    pairing: PairingSpec = PairingSpec(),
    params: SsimParams = SsimParams(),
    *,
    fraction: float = 1.0,
    trial: int = 0,
    seed: int | None = None,
) -> MetricReport:
    """Mean pairwise MS-SSIM within one image set (lower = more diverse).

    The dynamic range L always follows the set's value_range tag, never the
    pixel content.
    """
    if image_set.count < 2:
        raise TooFewSamplesError("ms_ssim_diversity needs at least 2 images")
    if params.L != image_set.value_range:
        params = replace(params, L=image_set.value_range)
    pair_seed = pairing.seed if seed is None else seed
    i_idx, j_idx, _ = select_pairs(image_set.count, replace(pairing, seed=pair_seed))
    pixels = image_set.pixels
    total = 0.0
    for i, j in zip(i_idx, j_idx):
        total += ms_ssim(pixels[i], pixels[j], params).value
    return MetricReport(
        metric_id="ms_ssim_diversity",
        class_label=image_set.class_label,
        provenance_compared=image_set.provenance,
        value=total / len(i_idx),
        fraction=fraction,
        trial=trial,
        seed=pair_seed,
        count=len(i_idx),
    )


def _cosine_mean_exhaustive(values: np.ndarray, norms: np.ndarray) -> tuple[float, int]:
    """Mean cosine over all unordered pairs, accumulated in row blocks."""
    n = values.shape[0]
    total = 0.0
    block = 512
    for start in range(0, n - 1, block):
        stop = min(start + block, n - 1)
        gram = values[start:stop] @ values[start:].T
        cos = gram / np.outer(norms[start:stop], norms[start:])
        np.clip(cos, -1.0, 1.0, out=cos)
        total += float(np.triu(cos, k=1).sum())
    count = n * (n - 1) // 2
    return total / count, count


def cosine_diversity(
    emb: EmbeddingMatrix,
    pairing: PairingSpec = PairingSpec(),
    *,
    class_label: str = "",
    provenance: str = "",
    fraction: float = 1.0,
    trial: int = 0,
    seed: int | None = None,
) -> MetricReport:
    """Mean pairwise cosine distance 1 - u.v/(|u||v|) (higher = more diverse).

    Cosines are clamped to [-1, 1] before the distance so rounding can never
    push a report outside [0, 2].
    """
    values = emb.values.astype(np.float64)
    norms = np.linalg.norm(values, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNormRowError(int(zero[0]))
    pair_seed = pairing.seed if seed is None else seed
    if _covers_all_pairs(emb.count, pairing):
        mean_cos, count = _cosine_mean_exhaustive(values, norms)
    else:
        i_idx, j_idx, _ = select_pairs(emb.count, replace(pairing, seed=pair_seed))
        cos = np.einsum("ij,ij->i", values[i_idx], values[j_idx])
        cos /= norms[i_idx] * norms[j_idx]
        np.clip(cos, -1.0, 1.0, out=cos)
        mean_cos, count = float(cos.mean()), len(i_idx)
    return MetricReport(
        metric_id="cosine_diversity",
        class_label=class_label,
        provenance_compared=provenance,
        value=1.0 - mean_cos,
        fraction=fraction,
        trial=trial,
        seed=pair_seed,
        count=count,
        embedder_id=emb.embedder_id,
    )


# ---------------------------------------------------------------------------
# FID
# ---------------------------------------------------------------------------

def fit_gaussian(emb: EmbeddingMatrix) -> GaussianStats:
    """Column means plus unbiased (N-1) covariance, explicitly symmetrized."""
    if emb.count < 2:
        raise TooFewSamplesError("fit_gaussian needs at least 2 rows")
    values = emb.values.astype(np.float64)
    mean = values.mean(axis=0)
    centered = values - mean
    cov = (centered.T @ centered) / (emb.count - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(
        mean=mean, cov=cov, sample_count=emb.count, embedder_id=emb.embedder_id
    )


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric square root with eigenvalues clamped at zero."""
    eigvals, eigvecs = np.linalg.eigh(mat)
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def _trace_sqrt_product(cov_r: np.ndarray, cov_s: np.ndarray) -> float:
    """Tr((cov_r^1/2 cov_s cov_r^1/2)^1/2), retrying with diagonal jitter.

    Rank-deficient covariances (small N, constant features) can make the
    eigensolver fail; up to three retries add jitter 1e-10, 1e-9, 1e-8.
    """
    dim = cov_r.shape[0]
    jitter = 0.0
    for attempt in range(4):
        try:
            root_r = _psd_sqrt(cov_r + jitter * np.eye(dim))
            inner = root_r @ (cov_s + jitter * np.eye(dim)) @ root_r
            inner = (inner + inner.T) / 2.0
            eigvals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
            return float(np.sqrt(eigvals).sum())
        except np.linalg.LinAlgError:
            jitter = 1e-10 * (10.0**attempt)
    raise NumericalError("eigendecomposition failed even after diagonal jitter")


def fid(
    real: GaussianStats,
    synth: GaussianStats,
    *,
    class_label: str = "",
    fraction: float = 1.0,
    trial: int = 0,
    seed: int = 0,
) -> MetricReport:
    """Frechet (Wasserstein-2) distance between two fitted Gaussians.

    value = |mu_r - mu_s|^2 + Tr(cov_r + cov_s - 2 (cov_r cov_s)^1/2),
    evaluated through the symmetric product form. Tiny negative results down
    to -1e-6 are rounding and clamp to 0; anything more negative raises.
    """
    if (
        real.embedder_id is not None
        and synth.embedder_id is not None
        and real.embedder_id != synth.embedder_id
    ):
        raise EmbedderMismatchError(
            f"refusing to compare embeddings from {real.embedder_id!r} "
            f"against {synth.embedder_id!r}"
        )
    if real.dims != synth.dims:
        raise DimensionMismatchError(
            f"embedding dimensions differ: {real.dims} vs {synth.dims}"
        )
    diff = real.mean - synth.mean
    value = float(diff @ diff)
    value += float(np.trace(real.cov) + np.trace(synth.cov))
    value -= 2.0 * _trace_sqrt_product(real.cov, synth.cov)
    if value < -1e-6:
        raise NumericalError(f"FID came out {value}, beyond the -1e-6 rounding allowance")
    value = max(value, 0.0)
    return MetricReport(
        metric_id="fid",
        class_label=class_label,
        provenance_compared=FID_COMPARISON,
        value=value,
        fraction=fraction,
        trial=trial,
        seed=seed,
        count=min(real.sample_count, synth.sample_count),
        embedder_id=real.embedder_id or synth.embedder_id,
    )
