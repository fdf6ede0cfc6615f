"""Joint wavelet/Fourier prior construction and per-step sample correction.

From the degraded input we keep, once per run: its level-1 detail bands,
the half-scaled low band that carries the diffusion variable, that band's
own level-1 decomposition, and the amplitude/phase of the twice-decomposed
low band.  Every reverse step then rebuilds the sample from a mixed
amplitude (theta * sample amplitude + input amplitude) under the input's
phase and detail bands, so structure is pinned to the input while theta
meters the injected brightness/contrast.

The diffusion variable lives in the display-derived wavelet domain (the
low band of the [0, 1] input, halved).  A signed [-1, 1] working range
would put the DC bin of any dark input on the negative real axis (phase
pi), and an amplitude sum can then only darken the image; the non-negative
domain keeps "more amplitude" meaning "brighter".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import ParameterError, ShapeError, SizeError, ValidationError
from .fourier import AmplitudePhase, Spectrum, amp_phase, fft2, ifft2_real, recompose
from .image import CHANNEL_MEAN, DISPLAY, MODEL, ImageBuffer, UNBOUNDED, luminance
from .wavelet import SubbandSet, dwt2, idwt2

TILE = 16

DEFAULT_POSITIVE_PROMPT = "a bright, clear, well-exposed photo"
DEFAULT_NEGATIVE_PROMPT = "a dark, noisy, underexposed photo"


@dataclass(frozen=True)
class GuidancePriors:
    """Fixed per-run prior bundle derived from one degraded input."""

    h_l: SubbandSet          # level-1 bands of the input; detail bands are kept
    ll_scaled: ImageBuffer   # 0.5 * low band: the diffusion variable's target
    l_l2: ImageBuffer        # low band of ll_scaled
    h_l2: SubbandSet         # level-1 bands of ll_scaled; details reused every step
    amp_l: np.ndarray
    pha_l: np.ndarray


@dataclass(frozen=True)
class Theta:
    """Non-negative scalar weighting the sample's own amplitude."""

    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError(f"theta must be >= 0, got {self.value}")


@dataclass(frozen=True)
class PromptPair:
    positive: str = DEFAULT_POSITIVE_PROMPT
    negative: str = DEFAULT_NEGATIVE_PROMPT

    def __post_init__(self):
        if not self.positive or not self.negative:
            raise ParameterError("prompts must be non-empty")


class SemanticScorer(Protocol):
    def embed_image(self, img: ImageBuffer) -> np.ndarray: ...
    def embed_text(self, prompt: str) -> np.ndarray: ...


def build_priors(i_l: ImageBuffer) -> GuidancePriors:
    """Decompose the degraded input into the fixed guidance bundle."""
    if i_l.height < 4 or i_l.width < 4:
        raise SizeError(f"build_priors needs at least 4x4 pixels, got {i_l.height}x{i_l.width}")
    level1 = dwt2(i_l)
    ll_scaled = ImageBuffer(0.5 * level1.ll.data, UNBOUNDED)
    level2 = dwt2(ll_scaled)
    ap = amp_phase(fft2(level2.ll))
    return GuidancePriors(
        h_l=level1,
        ll_scaled=ll_scaled,
        l_l2=level2.ll,
        h_l2=level2,
        amp_l=ap.amp,
        pha_l=ap.pha,
    )


def guided_update(x_t: ImageBuffer, priors: GuidancePriors, theta: Theta) -> ImageBuffer:
    """Rebuild a sample from mixed amplitude under the input's phase/details.

    The sample's own phase and detail bands are discarded; only its
    amplitude survives, weighted by theta.
    """
    if x_t.shape != priors.ll_scaled.shape:
        raise ShapeError(
            f"x_t shape {x_t.shape} != prior domain shape {priors.ll_scaled.shape}")
    sb = dwt2(x_t)
    ap_t = amp_phase(fft2(sb.ll))
    mixed = AmplitudePhase(theta.value * ap_t.amp + priors.amp_l, priors.pha_l)
    ll_new = ifft2_real(recompose(mixed))
    return idwt2(priors.h_l2.with_ll(ll_new))


def _display_plane(img: ImageBuffer) -> tuple[np.ndarray, float]:
    """Channel-mean luminance mapped to display scale, with the map's slope.

    Model-tagged data goes through the (x+1)/2 affine map without clamping
    (clamping would break the affine structure the theta gradient relies
    on); display and unbounded data are used as-is.
    """
    plane = luminance(img, CHANNEL_MEAN).data[0]
    if img.range_tag == MODEL:
        return (plane + 1.0) / 2.0, 0.5
    return plane, 1.0


def _tile_means(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    means = [
        plane[i:i + TILE, j:j + TILE].mean()
        for i in range(0, h, TILE)
        for j in range(0, w, TILE)
    ]
    return np.array(means)


def brightness_loss(x_t1: ImageBuffer, e_level: float) -> float:
    """Mean absolute deviation of 16x16 tile luminances from the target level."""
    if not (0.0 <= e_level <= 1.0):
        raise ParameterError(f"e_level must be in [0, 1], got {e_level}")
    plane, _ = _display_plane(x_t1)
    return float(np.abs(_tile_means(plane) - e_level).mean())


def theta_step(x_t: ImageBuffer, priors: GuidancePriors, theta: Theta,
               e_level: float, lr: float) -> Theta:
    """One subgradient step on theta against the brightness loss.

    The corrected sample is affine in theta, out(theta) = A * theta + B,
    so the loss subgradient is exact: sign of each tile's deviation times
    that tile's mean slope.
    """
    if lr <= 0:
        raise ParameterError(f"lr must be > 0, got {lr}")
    sb = dwt2(x_t)
    ap_t = amp_phase(fft2(sb.ll))
    slope_ll = ifft2_real(recompose(AmplitudePhase(ap_t.amp, priors.pha_l)))
    a_img = idwt2(priors.h_l2.with_ll(slope_ll).with_zero_details())
    out = guided_update(x_t, priors, theta)

    out_plane, slope = _display_plane(out)
    a_plane, _ = _display_plane(a_img)
    signs = np.sign(_tile_means(out_plane) - e_level)
    grad = float((signs * _tile_means(a_plane) * slope).mean())
    return Theta(max(theta.value - lr * grad, 0.0))


# ---------------------------------------------------------------------------
# Semantic guidance (black-box scorer contract)

def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-12 or nb < 1e-12:
        raise ValidationError("zero-norm embedding from semantic scorer")
    return float(np.dot(a, b) / (na * nb))


def semantic_loss(scorer: SemanticScorer, img: ImageBuffer, prompts: PromptPair) -> float:
    """Softmax weight of the negative prompt among the two prompts."""
    feat = scorer.embed_image(img)
    c_p = _cosine(feat, scorer.embed_text(prompts.positive))
    c_n = _cosine(feat, scorer.embed_text(prompts.negative))
    return float(np.exp(c_n) / (np.exp(c_p) + np.exp(c_n)))


def apply_semantic_guidance(img: ImageBuffer, scorer: SemanticScorer,
                            prompts: PromptPair, weight: float,
                            probe: float) -> ImageBuffer:
    """One descent step on global (gain, bias) against the semantic loss.

    The scorer is a black box, so the direction comes from symmetric
    finite differences of the loss in the two affine parameters.
    """
    if weight < 0:
        raise ParameterError(f"weight must be >= 0, got {weight}")
    if probe <= 0:
        raise ParameterError(f"probe must be > 0, got {probe}")
    if weight == 0.0:
        return img

    def loss_at(gain: float, bias: float) -> float:
        return semantic_loss(
            scorer, ImageBuffer(gain * img.data + bias, UNBOUNDED), prompts)

    d_gain = (loss_at(1.0 + probe, 0.0) - loss_at(1.0 - probe, 0.0)) / (2.0 * probe)
    d_bias = (loss_at(1.0, probe) - loss_at(1.0, -probe)) / (2.0 * probe)
    gain = 1.0 - weight * d_gain
    bias = -weight * d_bias
    return ImageBuffer(gain * img.data + bias, UNBOUNDED)


class MockScorer:
    """Deterministic stand-in scorer for tests and the CLI's mock mode.

    Image features are a soft 3-bin luminance histogram (Gaussian bin
    weights, so finite differences see a smooth response) padded to a
    fixed 8-dim space; the two canonical prompts map to orthonormal
    anchors aligned with the bright and dark bins.
    """

    DIM = 8
    _CENTERS = np.array([1.0 / 6.0, 0.5, 5.0 / 6.0])
    _SIGMA = 0.25

    def embed_image(self, img: ImageBuffer) -> np.ndarray:
        lum = luminance(img, CHANNEL_MEAN).data[0]
        lum = np.clip(lum, 0.0, 1.0)
        weights = np.exp(-((lum[..., None] - self._CENTERS) ** 2)
                         / (2.0 * self._SIGMA ** 2))
        hist = weights.mean(axis=(0, 1))
        feat = np.zeros(self.DIM)
        feat[:3] = hist
        return feat / np.linalg.norm(feat)

    def embed_text(self, prompt: str) -> np.ndarray:
        vec = np.zeros(self.DIM)
        if prompt == DEFAULT_POSITIVE_PROMPT:
            vec[2] = 1.0  # bright bin anchor
        elif prompt == DEFAULT_NEGATIVE_PROMPT:
            vec[0] = 1.0  # dark bin anchor
        else:
            gen = np.random.Generator(
                np.random.PCG64(int.from_bytes(prompt.encode()[:8].ljust(8, b"\0"), "little")))
            raw = gen.standard_normal(self.DIM)
            vec = raw / np.linalg.norm(raw)
        return vec
