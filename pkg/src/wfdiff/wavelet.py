"""Level-1 orthonormal Haar 2-D wavelet transform and its exact inverse.

Per 2x2 block [[a, b], [c, d]] the four subband samples are

    ll = (a + b + c + d) / 2      hl = (a - b + c - d) / 2
    lh = (a + b - c - d) / 2      hh = (a - b - c + d) / 2

which is the orthonormal scaling: energy is preserved and a constant
image c maps to ll = 2c.  Odd-sized inputs are symmetric-padded by one
row/column before analysis; the inverse crops back to the recorded size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SizeError
from .image import UNBOUNDED, ImageBuffer


@dataclass(frozen=True)
class SubbandSet:
    """The four level-1 subbands plus the pre-padding spatial size."""

    ll: ImageBuffer
    lh: ImageBuffer
    hl: ImageBuffer
    hh: ImageBuffer
    pad_record: tuple[int, int]

    def __post_init__(self):
        shapes = {self.ll.shape, self.lh.shape, self.hl.shape, self.hh.shape}
        if len(shapes) != 1:
            raise ShapeError(f"inconsistent subband shapes: {shapes}")

    def with_ll(self, ll: ImageBuffer) -> "SubbandSet":
        """Replace the low-frequency band, keeping the detail bands."""
        if ll.shape != self.lh.shape:
            raise ShapeError(f"LL shape {ll.shape} != detail shape {self.lh.shape}")
        return SubbandSet(ll, self.lh, self.hl, self.hh, self.pad_record)

    def with_zero_details(self) -> "SubbandSet":
        zero = ImageBuffer(np.zeros(self.ll.shape), UNBOUNDED)
        return SubbandSet(self.ll, zero, zero, zero, self.pad_record)


def dwt2(img: ImageBuffer) -> SubbandSet:
    """One level of the orthonormal Haar analysis transform."""
    h, w = img.height, img.width
    if h < 2 or w < 2:
        raise SizeError(f"dwt2 needs at least 2x2 pixels, got {h}x{w}")
    x = img.data
    if h % 2 or w % 2:
        x = np.pad(x, ((0, 0), (0, h % 2), (0, w % 2)), mode="symmetric")
    a = x[:, 0::2, 0::2]
    b = x[:, 0::2, 1::2]
    c = x[:, 1::2, 0::2]
    d = x[:, 1::2, 1::2]
    ll = (a + b + c + d) / 2.0
    hl = (a - b + c - d) / 2.0
    lh = (a + b - c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    mk = lambda v: ImageBuffer(v, UNBOUNDED)
    return SubbandSet(mk(ll), mk(lh), mk(hl), mk(hh), (h, w))


def idwt2(sb: SubbandSet) -> ImageBuffer:
    """Exact inverse of :func:`dwt2`, cropped to the recorded size."""
    ll, lh, hl, hh = sb.ll.data, sb.lh.data, sb.hl.data, sb.hh.data
    ch, hh2, wh2 = ll.shape
    out = np.empty((ch, hh2 * 2, wh2 * 2))
    out[:, 0::2, 0::2] = (ll + hl + lh + hh) / 2.0
    out[:, 0::2, 1::2] = (ll - hl + lh - hh) / 2.0
    out[:, 1::2, 0::2] = (ll + hl - lh - hh) / 2.0
    out[:, 1::2, 1::2] = (ll - hl - lh + hh) / 2.0
    h, w = sb.pad_record
    return ImageBuffer(out[:, :h, :w], UNBOUNDED)
