"""Per-channel 2-D DFT, amplitude/phase decomposition, and real inverse.

Conventions: unnormalized forward transform (the DC bin equals the pixel
sum), 1/(H*W) on the inverse, and the phase of a zero-amplitude bin is
pinned to 0 so results are platform-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SymmetryError
from .image import UNBOUNDED, ImageBuffer


@dataclass(frozen=True)
class Spectrum:
    """Complex frequency samples, planar (C, H, W) layout."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.complex128)
        if arr.ndim != 3:
            raise ShapeError(f"expected (C, H, W) spectrum, got ndim={arr.ndim}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class AmplitudePhase:
    """Polar form of a spectrum: amp >= 0, pha in (-pi, pi], pha=0 where amp=0."""

    amp: np.ndarray
    pha: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.float64).copy()
        pha = np.asarray(self.pha, dtype=np.float64).copy()
        if amp.shape != pha.shape:
            raise ShapeError(f"amp shape {amp.shape} != pha shape {pha.shape}")
        amp.setflags(write=False)
        pha.setflags(write=False)
        object.__setattr__(self, "amp", amp)
        object.__setattr__(self, "pha", pha)


def fft2(img: ImageBuffer) -> Spectrum:
    """Unnormalized forward DFT of each channel."""
    return Spectrum(np.fft.fft2(img.data, axes=(-2, -1)))


def amp_phase(spec: Spectrum) -> AmplitudePhase:
    amp = np.abs(spec.data)
    pha = np.arctan2(spec.data.imag, spec.data.real)
    pha = np.where(amp == 0.0, 0.0, pha)
    return AmplitudePhase(amp, pha)


def recompose(ap: AmplitudePhase) -> Spectrum:
    return Spectrum(ap.amp * (np.cos(ap.pha) + 1j * np.sin(ap.pha)))


def ifft2_real(spec: Spectrum, rel_tol: float = 1e-3) -> ImageBuffer:
    """Inverse DFT (1/(H*W) normalization), checked to be essentially real.

    Raises :class:`SymmetryError` when the residual imaginary part exceeds
    ``rel_tol`` times the real peak, which signals a malformed amp/pha
    combination rather than rounding noise.
    """
    full = np.fft.ifft2(spec.data, axes=(-2, -1))
    real_peak = np.abs(full.real).max()
    imag_peak = np.abs(full.imag).max()
    if imag_peak > rel_tol * max(real_peak, np.finfo(np.float64).tiny):
        raise SymmetryError(
            f"spectrum is not conjugate-symmetric: |imag| peak {imag_peak:.3e} "
            f"vs |real| peak {real_peak:.3e}"
        )
    return ImageBuffer(full.real, UNBOUNDED)
