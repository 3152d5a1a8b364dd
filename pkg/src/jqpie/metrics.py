"""Reconstruction quality scoring: PSNR and SSIM.

Scores are computed on clamped pixels at the original (cropped) dimensions.
SSIM defaults to the single global statistic; ``mode="windowed"`` averages
the statistic over non-overlapping 8x8 windows for comparability with common
tooling. Variances use the population (1/N) convention so results are
bit-comparable across implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .imagio import GrayscaleImage


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    ssim: float
    delta_psnr: float
    delta_ssim: float
    baseline_id: str

    def to_json(self) -> dict:
        return asdict(self)


def _clamped_pixels(img, peak: float) -> np.ndarray:
    if isinstance(img, GrayscaleImage):
        img = img.pixels
    return np.clip(np.asarray(img, dtype=np.float64), 0.0, peak)


def _peak(a, b) -> float:
    for img in (a, b):
        if isinstance(img, GrayscaleImage):
            return img.max_value
    return 255.0


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images are identical."""
    peak = _peak(a, b)
    pa, pb = _clamped_pixels(a, peak), _clamped_pixels(b, peak)
    if pa.shape != pb.shape:
        raise ValueError(f"dimension mismatch: {pa.shape} vs {pb.shape}")
    mse = np.mean((pa - pb) ** 2)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _ssim_statistic(pa: np.ndarray, pb: np.ndarray, c1: float, c2: float) -> float:
    mu_a, mu_b = pa.mean(), pb.mean()
    var_a, var_b = pa.var(), pb.var()
    cov = np.mean((pa - mu_a) * (pb - mu_b))
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b, mode: str = "global", c1: float | None = None,
         c2: float | None = None) -> float:
    """Structural similarity index.

    global:   one statistic over the whole image.
    windowed: mean of the statistic over non-overlapping 8x8 windows
              (partial edge windows included as-is).

    The stability constants default to c1 = (0.01 L)^2, c2 = (0.03 L)^2.
    """
    if mode not in ("global", "windowed"):
        raise ValueError(f"unknown ssim mode {mode!r}")
    peak = _peak(a, b)
    pa, pb = _clamped_pixels(a, peak), _clamped_pixels(b, peak)
    if pa.shape != pb.shape:
        raise ValueError(f"dimension mismatch: {pa.shape} vs {pb.shape}")
    if c1 is None:
        c1 = (0.01 * peak) ** 2
    if c2 is None:
        c2 = (0.03 * peak) ** 2
    if mode == "global":
        return float(_ssim_statistic(pa, pb, c1, c2))
    h, w = pa.shape
    scores = [
        _ssim_statistic(pa[i:i + 8, j:j + 8], pb[i:i + 8, j:j + 8], c1, c2)
        for i in range(0, h, 8)
        for j in range(0, w, 8)
    ]
    return float(np.mean(scores))


def quality_report(reference, reconstruction, baseline, baseline_id: str,
                   ssim_mode: str = "global") -> QualityReport:
    """Score a reconstruction and its deltas against a baseline decode.

    Deltas of two infinite PSNR values are reported as zero (both exact).
    """
    p = psnr(reference, reconstruction)
    s = ssim(reference, reconstruction, mode=ssim_mode)
    pb = psnr(reference, baseline)
    sb = ssim(reference, baseline, mode=ssim_mode)
    if math.isinf(p) and math.isinf(pb):
        dp = 0.0
    else:
        dp = p - pb
    return QualityReport(p, s, dp, s - sb, baseline_id)
