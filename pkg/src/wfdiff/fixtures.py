"""Deterministic synthetic scenes used by the demo and the test suite."""

from __future__ import annotations

import numpy as np

from .image import DISPLAY, ImageBuffer


def demo_scene(height: int = 128, width: int = 128) -> ImageBuffer:
    """Smooth photo-like RGB scene: gradients, soft blobs, mild texture."""
    yy, xx = np.meshgrid(np.linspace(0, 1, height), np.linspace(0, 1, width),
                         indexing="ij")
    base = 0.45 + 0.18 * xx + 0.08 * yy
    blob1 = 0.16 * np.exp(-(((yy - 0.35) ** 2 + (xx - 0.30) ** 2) / 0.02))
    blob2 = -0.12 * np.exp(-(((yy - 0.70) ** 2 + (xx - 0.72) ** 2) / 0.035))
    texture = 0.03 * np.sin(14 * np.pi * xx) * np.cos(10 * np.pi * yy)
    lum = base + blob1 + blob2 + texture
    chans = np.stack([
        lum * 1.05,
        lum,
        lum * 0.92 + 0.02,
    ])
    return ImageBuffer(np.clip(chans, 0.02, 0.98), DISPLAY)


def darken_gamma(img: ImageBuffer, gamma: float = 2.5) -> ImageBuffer:
    """Simulate low light by a gamma curve on display values."""
    return ImageBuffer(img.data ** gamma, DISPLAY)


def salt_noise(img: ImageBuffer, fraction: float, seed: int) -> ImageBuffer:
    """Set a random pixel fraction to 1.0 in every channel."""
    gen = np.random.Generator(np.random.PCG64(seed))
    mask = gen.random(img.data.shape[1:]) < fraction
    out = img.data.copy()
    out[:, mask] = 1.0
    return ImageBuffer(out, img.range_tag)
