"""Single-scale SSIM and multi-scale MS-SSIM for grayscale images.

The structural-similarity map is the product of three per-window terms,
with moments taken under a Gaussian window (size 11, sigma 1.5 by default)
normalized to sum 1:

* luminance  l = (2*mx*my + C1) / (mx^2 + my^2 + C1)
* contrast   c = (2*sx*sy + C2) / (sx^2 + sy^2 + C2)
* structure  s = (cov + C3)     / (sx*sy + C3)

with C1 = (K1*L)^2, C2 = (K2*L)^2, C3 = C2/2, and L the dynamic range of the
pixel data (255 for 8-bit, 1.0 for unit-range). Only fully interior ("valid")
window positions contribute; no border padding is invented.

MS-SSIM evaluates contrast*structure at a pyramid of scales produced by 2x2
average pooling (trailing odd row/column dropped) and the full l*c*s term at
the coarsest scale:

    value = prod_{j<M} mean_cs_j ** w_j  *  mean_lcs_M ** w_M

Scale count adaptation: M = min(5, largest m with floor(min(H, W) / 2^(m-1))
>= window_size), and the weights are the first M of the standard five-scale
weights renormalized to sum 1. The standard weights assume five scales;
28x28 inputs only support two with an 11-pixel window, so truncation plus
renormalization is how this implementation keeps the score near [0, 1] on
small images. Per-scale means that come out negative are clamped to 0 before
the fractional exponents so the product stays real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatchError

#: Standard five-scale MS-SSIM weights (finest to coarsest).
DEFAULT_SCALE_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


@dataclass(frozen=True)
class SsimParams:
    """Window, stability-constant, and scale-weight configuration."""

    window_size: int = 11
    window_sigma: float = 1.5
    K1: float = 0.01
    K2: float = 0.03
    L: float = 255.0
    scale_weights: tuple[float, ...] = field(default=DEFAULT_SCALE_WEIGHTS)

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError(f"window_size must be odd and >= 3, got {self.window_size}")
        if self.K1 <= 0 or self.K2 <= 0:
            raise ValueError("K1 and K2 must be positive")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.window_sigma <= 0:
            raise ValueError("window_sigma must be positive")
        weights = tuple(float(w) for w in self.scale_weights)
        if not weights or any(w <= 0 for w in weights):
            raise ValueError("scale_weights must be non-empty and all positive")
        object.__setattr__(self, "scale_weights", weights)

    @property
    def C1(self) -> float:
        return (self.K1 * self.L) ** 2

    @property
    def C2(self) -> float:
        return (self.K2 * self.L) ** 2

    @property
    def C3(self) -> float:
        return self.C2 / 2.0


@dataclass(frozen=True)
class SsimScore:
    """A similarity value plus how many pyramid scales produced it."""

    value: float
    scales_used: int

    def __post_init__(self):
        if self.value > 1.0 + 1e-9:
            raise ValueError(f"SSIM value cannot exceed 1, got {self.value}")
        if self.scales_used < 1:
            raise ValueError("scales_used must be >= 1")


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """1-D Gaussian taps centered on the window, normalized to sum 1."""
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    return g / g.sum()


def num_scales(height: int, width: int, window_size: int) -> int:
    """Feasible MS-SSIM scale count for an image size: see module docstring."""
    side = min(height, width)
    m = 0
    while m < 5 and (side >> m) >= window_size:
        m += 1
    return m


def _check_pair(a: np.ndarray, b: np.ndarray, params: SsimParams) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError("ssim expects 2-D grayscale images")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    k = params.window_size
    if min(a.shape) < k:
        raise DimensionMismatchError(
            f"image {a.shape[1]}x{a.shape[0]} is smaller than the {k}x{k} window; "
            f"minimum size is {k}x{k}"
        )
    return a, b


def _filter_valid(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable valid-mode correlation with a symmetric 1-D kernel."""
    rows = sliding_window_view(img, len(taps), axis=0) @ taps
    return sliding_window_view(rows, len(taps), axis=1) @ taps


def _term_means(a: np.ndarray, b: np.ndarray, params: SsimParams) -> tuple[float, float]:
    """Mean l*c*s and mean c*s over all valid window positions."""
    taps = gaussian_window(params.window_size, params.window_sigma)
    mu_a = _filter_valid(a, taps)
    mu_b = _filter_valid(b, taps)
    var_a = np.maximum(_filter_valid(a * a, taps) - mu_a * mu_a, 0.0)
    var_b = np.maximum(_filter_valid(b * b, taps) - mu_b * mu_b, 0.0)
    cov = _filter_valid(a * b, taps) - mu_a * mu_b
    sd_a = np.sqrt(var_a)
    sd_b = np.sqrt(var_b)
    lum = (2.0 * mu_a * mu_b + params.C1) / (mu_a * mu_a + mu_b * mu_b + params.C1)
    con = (2.0 * sd_a * sd_b + params.C2) / (var_a + var_b + params.C2)
    stru = (cov + params.C3) / (sd_a * sd_b + params.C3)
    cs = con * stru
    return float(np.mean(lum * cs)), float(np.mean(cs))


def _downsample2x(img: np.ndarray) -> np.ndarray:
    """2x2 average pooling; a trailing odd row/column is dropped."""
    h, w = img.shape[0] & ~1, img.shape[1] & ~1
    img = img[:h, :w]
    return (img[0::2, 0::2] + img[0::2, 1::2] + img[1::2, 0::2] + img[1::2, 1::2]) / 4.0


def ssim(a: np.ndarray, b: np.ndarray, params: SsimParams = SsimParams()) -> SsimScore:
    """Single-scale SSIM between two same-shape grayscale images."""
    a, b = _check_pair(a, b, params)
    lcs, _ = _term_means(a, b, params)
    return SsimScore(value=lcs, scales_used=1)


def ms_ssim(a: np.ndarray, b: np.ndarray, params: SsimParams = SsimParams()) -> SsimScore:
    """Multi-scale SSIM with small-image scale adaptation."""
    a, b = _check_pair(a, b, params)
    scales = num_scales(a.shape[0], a.shape[1], params.window_size)
    scales = min(scales, len(params.scale_weights))
    weights = np.asarray(params.scale_weights[:scales], dtype=np.float64)
    weights = weights / weights.sum()
    value = 1.0
    for level in range(scales):
        lcs, cs = _term_means(a, b, params)
        term = lcs if level == scales - 1 else cs
        value *= max(term, 0.0) ** weights[level]
        if level < scales - 1:
            a = _downsample2x(a)
            b = _downsample2x(b)
    return SsimScore(value=float(value), scales_used=scales)
