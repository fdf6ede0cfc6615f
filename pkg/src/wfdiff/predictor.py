"""Small fixed convolutional noise predictor and its binary weight format.

Architecture (size-agnostic, reflect padding everywhere):

    3x3 conv  C  -> 32, SiLU
    3x3 conv  32 -> 32, plus a per-feature bias from an affine map of a
                        32-dim sinusoidal embedding of t/T, SiLU
    3x3 conv  32 -> C

Weight file layout (all integers u32 LE, all coefficients f32 LE):
magic "WFDP", version=1, channel count, hidden width (=32), then for each
of the three layers: out, in, out*in*9 filter taps (out-major, then in,
then 3x3 row-major), out biases; finally the 32x32 time matrix (row-major)
and its 32 biases.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError, ValidationError
from .image import UNBOUNDED, ImageBuffer
from .diffusion import NoiseSchedule

MAGIC = b"WFDP"
VERSION = 1
HIDDEN = 32
EMBED_DIM = 32


@dataclass(frozen=True)
class ConvPredictorWeights:
    channels: int
    filters: tuple[np.ndarray, ...]   # three (out, in, 3, 3) arrays
    biases: tuple[np.ndarray, ...]    # three (out,) arrays
    time_matrix: np.ndarray           # (HIDDEN, EMBED_DIM)
    time_bias: np.ndarray             # (HIDDEN,)

    def __post_init__(self):
        c = self.channels
        expected = [(HIDDEN, c), (HIDDEN, HIDDEN), (c, HIDDEN)]
        for i, ((out_c, in_c), f, b) in enumerate(zip(expected, self.filters, self.biases)):
            if f.shape != (out_c, in_c, 3, 3):
                raise ShapeError(f"layer {i} filter shape {f.shape} != {(out_c, in_c, 3, 3)}")
            if b.shape != (out_c,):
                raise ShapeError(f"layer {i} bias shape {b.shape} != {(out_c,)}")
        if self.time_matrix.shape != (HIDDEN, EMBED_DIM):
            raise ShapeError(f"time matrix shape {self.time_matrix.shape}")
        if self.time_bias.shape != (HIDDEN,):
            raise ShapeError(f"time bias shape {self.time_bias.shape}")
        arrays = [*self.filters, *self.biases, self.time_matrix, self.time_bias]
        if not all(np.isfinite(a).all() for a in arrays):
            raise ValidationError("non-finite coefficient in predictor weights")


def random_weights(channels: int, seed: int = 0, scale: float = 0.1) -> ConvPredictorWeights:
    gen = np.random.Generator(np.random.PCG64(seed))
    dims = [(HIDDEN, channels), (HIDDEN, HIDDEN), (channels, HIDDEN)]
    filters = tuple(scale * gen.standard_normal((o, i, 3, 3)) for o, i in dims)
    biases = tuple(scale * gen.standard_normal(o) for o, _ in dims)
    return ConvPredictorWeights(
        channels, filters, biases,
        scale * gen.standard_normal((HIDDEN, EMBED_DIM)),
        scale * gen.standard_normal(HIDDEN),
    )


def time_embedding(t: int, T: int) -> np.ndarray:
    """Sinusoidal embedding of the normalized step t/T, 32 dimensions."""
    half = EMBED_DIM // 2
    freqs = 10000.0 ** (np.arange(half) / (half - 1))
    args = (t / T) * freqs
    return np.concatenate([np.sin(args), np.cos(args)])


def _silu(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.exp(-x))


def _conv3x3(x: np.ndarray, filt: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """3x3 correlation with reflect padding; x is (in, H, W)."""
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1)), mode="reflect")
    h, w = x.shape[1:]
    out = np.tensordot(filt.reshape(filt.shape[0], filt.shape[1], 9), np.stack(
        [xp[:, dy:dy + h, dx:dx + w] for dy in range(3) for dx in range(3)],
        axis=1).reshape(x.shape[0], 9, h, w), axes=([1, 2], [0, 1]))
    return out + bias[:, None, None]


def conv_predictor_forward(w: ConvPredictorWeights, x_t: ImageBuffer, t: int,
                           sched: NoiseSchedule) -> ImageBuffer:
    if x_t.channels != w.channels:
        raise ShapeError(f"predictor built for {w.channels} channels, got {x_t.channels}")
    h1 = _silu(_conv3x3(x_t.data, w.filters[0], w.biases[0]))
    t_bias = w.time_matrix @ time_embedding(t, sched.T) + w.time_bias
    h2 = _silu(_conv3x3(h1, w.filters[1], w.biases[1]) + t_bias[:, None, None])
    out = _conv3x3(h2, w.filters[2], w.biases[2])
    return ImageBuffer(out, UNBOUNDED)


class ConvPredictor:
    """NoisePredictor backed by :func:`conv_predictor_forward`."""

    def __init__(self, weights: ConvPredictorWeights):
        self.weights = weights

    def predict(self, x_t: ImageBuffer, t: int, sched: NoiseSchedule) -> ImageBuffer:
        return conv_predictor_forward(self.weights, x_t, t, sched)


# ---------------------------------------------------------------------------
# Binary serialization

def serialize_predictor_weights(w: ConvPredictorWeights) -> bytes:
    parts = [MAGIC, struct.pack("<III", VERSION, w.channels, HIDDEN)]
    for filt, bias in zip(w.filters, w.biases):
        out_c, in_c = filt.shape[:2]
        parts.append(struct.pack("<II", out_c, in_c))
        parts.append(filt.astype("<f4").tobytes())
        parts.append(bias.astype("<f4").tobytes())
    parts.append(w.time_matrix.astype("<f4").tobytes())
    parts.append(w.time_bias.astype("<f4").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError("truncated predictor weight payload")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def f32_array(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        return np.frombuffer(self.take(4 * n), dtype="<f4").astype(np.float64).reshape(shape)


def load_predictor_weights(blob: bytes) -> ConvPredictorWeights:
    rd = _Reader(blob)
    if rd.take(4) != MAGIC:
        raise FormatError("bad magic bytes (expected WFDP)")
    version = rd.u32()
    if version != VERSION:
        raise FormatError(f"unsupported weight version {version}")
    channels = rd.u32()
    if channels not in (1, 3):
        raise FormatError(f"channel count must be 1 or 3, got {channels}")
    hidden = rd.u32()
    if hidden != HIDDEN:
        raise FormatError(f"hidden width must be {HIDDEN}, got {hidden}")
    expected = [(HIDDEN, channels), (HIDDEN, HIDDEN), (channels, HIDDEN)]
    filters, biases = [], []
    for out_exp, in_exp in expected:
        out_c, in_c = rd.u32(), rd.u32()
        if (out_c, in_c) != (out_exp, in_exp):
            raise FormatError(f"layer dims ({out_c}, {in_c}) != declared ({out_exp}, {in_exp})")
        filters.append(rd.f32_array((out_c, in_c, 3, 3)))
        biases.append(rd.f32_array((out_c,)))
    time_matrix = rd.f32_array((HIDDEN, EMBED_DIM))
    time_bias = rd.f32_array((HIDDEN,))
    if rd.pos != len(blob):
        raise FormatError(f"{len(blob) - rd.pos} trailing bytes after weight payload")
    return ConvPredictorWeights(channels, tuple(filters), tuple(biases), time_matrix, time_bias)
