"""Reference-free and full-reference quality metrics: PSNR, SSIM, LOE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import ShapeError, SizeError
from .image import CHANNEL_MAX, CHANNEL_MEAN, ImageBuffer, luminance

PSNR_CAP = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2

LOE_TARGET = 50


@dataclass(frozen=True)
class MetricReport:
    psnr: float
    ssim: float
    loe: float | None = None

    def csv_row(self, image_id: str) -> str:
        loe = "" if self.loe is None else f"{self.loe:.6f}"
        return f"{image_id},{self.psnr:.6f},{self.ssim:.6f},{loe}"


def _check_shapes(a: ImageBuffer, b: ImageBuffer):
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """Peak signal-to-noise ratio with peak 1; capped at 99 dB for MSE 0."""
    _check_shapes(a, b)
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2.0
    k = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
    k2 = np.outer(k, k)
    return k2 / k2.sum()


def ssim(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean SSIM over valid 11x11 Gaussian windows of the luminance planes."""
    _check_shapes(a, b)
    if a.height < SSIM_WINDOW or a.width < SSIM_WINDOW:
        raise SizeError(f"image {a.height}x{a.width} smaller than the {SSIM_WINDOW}px window")
    x = luminance(a, CHANNEL_MEAN).data[0]
    y = luminance(b, CHANNEL_MEAN).data[0]
    kern = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    mu_x = convolve2d(x, kern, mode="valid")
    mu_y = convolve2d(y, kern, mode="valid")
    xx = convolve2d(x * x, kern, mode="valid") - mu_x ** 2
    yy = convolve2d(y * y, kern, mode="valid") - mu_y ** 2
    xy = convolve2d(x * y, kern, mode="valid") - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * xy + SSIM_C2)
    den = (mu_x ** 2 + mu_y ** 2 + SSIM_C1) * (xx + yy + SSIM_C2)
    return float(np.mean(num / den))


def _loe_plane(img: ImageBuffer) -> np.ndarray:
    plane = luminance(img, CHANNEL_MAX).data[0]
    h, w = plane.shape
    m = min(h, w)
    if m <= LOE_TARGET:
        return plane
    nh = int(round(h * LOE_TARGET / m))
    nw = int(round(w * LOE_TARGET / m))
    ri = (np.arange(nh) * h) // nh
    ci = (np.arange(nw) * w) // nw
    return plane[np.ix_(ri, ci)]


def loe(original: ImageBuffer, enhanced: ImageBuffer) -> float:
    """Lightness order error: mean count of flipped luminance-order pairs."""
    _check_shapes(original, enhanced)
    u = _loe_plane(original).ravel()
    v = _loe_plane(enhanced).ravel()
    n = u.size
    total = 0
    # row-chunked pairwise comparison keeps memory at O(chunk * n)
    chunk = max(1, 2 ** 22 // n)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        du = u[lo:hi, None] >= u[None, :]
        dv = v[lo:hi, None] >= v[None, :]
        total += int(np.count_nonzero(du ^ dv))
    return total / n


def report(a: ImageBuffer, b: ImageBuffer,
           loe_ref: ImageBuffer | None = None) -> MetricReport:
    return MetricReport(
        psnr=psnr(a, b),
        ssim=ssim(a, b),
        loe=None if loe_ref is None else loe(loe_ref, b),
    )
