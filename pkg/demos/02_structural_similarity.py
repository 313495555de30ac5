"""SSIM and MS-SSIM basics: identity, noise response, scale adaptation.

MS-SSIM multiplies contrast/structure agreement across a pyramid of 2x2
average-pooled scales, with luminance judged at the coarsest one. Small
images cannot support the standard five scales, so the scale count adapts
to the image size and the weights renormalize.
"""

import numpy as np

from synthmetrics import SsimParams, ms_ssim, num_scales, ssim

rng = np.random.default_rng(11)

base = rng.integers(0, 256, size=(28, 28)).astype(np.float64)

# --- identity and noise ---------------------------------------------------
print(f"ssim(x, x)     = {ssim(base, base).value:.9f}")
print(f"ms_ssim(x, x)  = {ms_ssim(base, base).value:.9f}")

for sigma in (5, 20, 60):
    noisy = np.clip(base + rng.normal(0, sigma, base.shape), 0, 255)
    print(f"ms_ssim vs sigma={sigma:>2} noise: {ms_ssim(base, noisy).value:.4f}")

# --- constant images: closed form -----------------------------------------
params = SsimParams(L=255.0)
black = np.zeros((16, 16))
white = np.full((16, 16), 255.0)
expected = params.C1 / (255.0**2 + params.C1)
print(f"\nssim(black, white) = {ssim(black, white, params).value:.6e}"
      f"  (closed form C1/(255^2+C1) = {expected:.6e})")

# --- scale adaptation -------------------------------------------------------
print("\nfeasible scales for an 11-pixel window:")
for side in (11, 28, 64, 176, 512):
    print(f"  {side:>4}x{side:<4} -> {num_scales(side, side, 11)} scale(s)")

score = ms_ssim(base, np.clip(base + rng.normal(0, 10, base.shape), 0, 255))
print(f"\n28x28 report carries scales_used = {score.scales_used}")

# --- unit-range images work the same way -----------------------------------
unit = rng.random((32, 32))
shifted = np.clip(unit + rng.normal(0, 0.05, unit.shape), 0, 1)
unit_params = SsimParams(L=1.0)
print(f"unit-range pair: ms_ssim = {ms_ssim(unit, shifted, unit_params).value:.4f}")
