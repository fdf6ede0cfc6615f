"""Planar image buffers, value-range conventions, luminance, and PNG/PFM I/O.

Samples are stored channel-major (C, H, W) as float64.  Three range tags
exist: ``display`` ([0, 1], the storage convention), ``model`` ([-1, 1],
the signed convention), and ``unbounded`` (sampler intermediates).  Range
clamping happens only when converting model -> display, never silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import ContractError, FormatError, ShapeError

DISPLAY = "display"
MODEL = "model"
UNBOUNDED = "unbounded"

_TAGS = (DISPLAY, MODEL, UNBOUNDED)

CHANNEL_MEAN = "channel-mean"
CHANNEL_MAX = "channel-max"


@dataclass(frozen=True)
class ImageBuffer:
    """Immutable planar raster: ``data`` has shape (channels, height, width)."""

    data: np.ndarray
    range_tag: str = DISPLAY

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3:
            raise ShapeError(f"expected (C, H, W) data, got ndim={arr.ndim}")
        c, h, w = arr.shape
        if c not in (1, 3):
            raise ShapeError(f"channel count must be 1 or 3, got {c}")
        if h < 1 or w < 1:
            raise ShapeError(f"degenerate image size {h}x{w}")
        if self.range_tag not in _TAGS:
            raise ContractError(f"unknown range tag {self.range_tag!r}")
        if self.range_tag == DISPLAY and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ContractError("display-tagged samples must lie in [0, 1]")
        if self.range_tag == MODEL and (arr.min() < -1.0 or arr.max() > 1.0):
            raise ContractError("model-tagged samples must lie in [-1, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


def convert_range(img: ImageBuffer, target: str) -> ImageBuffer:
    """Map between display [0,1] and model [-1,1] conventions.

    model -> display clamps; display -> model is exact; same tag is identity.
    """
    if target not in (DISPLAY, MODEL):
        raise ContractError(f"cannot convert to tag {target!r}")
    if img.range_tag == UNBOUNDED:
        raise ContractError("cannot convert an unbounded buffer; clamp explicitly")
    if img.range_tag == target:
        return img
    if target == MODEL:
        return ImageBuffer(2.0 * img.data - 1.0, MODEL)
    return ImageBuffer(np.clip((img.data + 1.0) / 2.0, 0.0, 1.0), DISPLAY)


def luminance(img: ImageBuffer, mode: str = CHANNEL_MEAN) -> ImageBuffer:
    """Collapse channels to a single luminance plane (mean or max)."""
    if mode not in (CHANNEL_MEAN, CHANNEL_MAX):
        raise ContractError(f"unknown luminance mode {mode!r}")
    if img.channels == 1:
        return img
    if mode == CHANNEL_MEAN:
        plane = img.data.mean(axis=0, keepdims=True)
    else:
        plane = img.data.max(axis=0, keepdims=True)
    return ImageBuffer(plane, img.range_tag)


# ---------------------------------------------------------------------------
# File I/O: 8-bit PNG for interchange, PFM (float32, scale -1.0) for fixtures.

def load_image(path) -> ImageBuffer:
    path = str(path)
    if path.lower().endswith(".pfm"):
        return _load_pfm_buffer(path)
    return _load_png(path)


def _load_png(path) -> ImageBuffer:
    try:
        im = Image.open(path)
        im.load()
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise FormatError(f"cannot decode {path}: {exc}") from exc
    if im.mode == "P":
        im = im.convert("RGB")
    if im.mode not in ("L", "RGB"):
        raise FormatError(f"unsupported PNG mode {im.mode!r} (need 8-bit gray or RGB)")
    arr = np.asarray(im, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = arr[None]
    else:
        arr = arr.transpose(2, 0, 1)
    return ImageBuffer(arr, DISPLAY)


def _load_pfm_buffer(path) -> ImageBuffer:
    arr = read_pfm(path)
    # PFM fixtures written by save_image are display-range by contract.
    return ImageBuffer(np.clip(arr, 0.0, 1.0), DISPLAY)


def save_image(img: ImageBuffer, path) -> None:
    """Write a display-range buffer as 8-bit PNG or float PFM by extension."""
    if img.range_tag != DISPLAY:
        raise ContractError("save_image requires a display-range buffer")
    path = str(path)
    if path.lower().endswith(".pfm"):
        write_pfm(path, img.data)
        return
    bytes8 = np.rint(img.data * 255.0).astype(np.uint8)
    if img.channels == 1:
        pil = Image.fromarray(bytes8[0], mode="L")
    else:
        pil = Image.fromarray(bytes8.transpose(1, 2, 0), mode="RGB")
    pil.save(path, format="PNG")


def read_pfm(path) -> np.ndarray:
    """Read a little-endian PFM raster; returns (C, H, W) float64."""
    with open(path, "rb") as fh:
        blob = fh.read()
    try:
        header, rest = blob.split(b"\n", 1)
        dims, rest = rest.split(b"\n", 1)
        scale_line, payload = rest.split(b"\n", 1)
        w, h = (int(v) for v in dims.split())
        scale = float(scale_line)
    except ValueError as exc:
        raise FormatError(f"malformed PFM header in {path}") from exc
    if header not in (b"PF", b"Pf"):
        raise FormatError(f"bad PFM magic {header!r}")
    if scale >= 0:
        raise FormatError("big-endian PFM not supported (scale must be negative)")
    channels = 3 if header == b"PF" else 1
    count = w * h * channels
    if len(payload) < count * 4:
        raise FormatError("truncated PFM payload")
    flat = np.frombuffer(payload[: count * 4], dtype="<f4").astype(np.float64)
    rows = flat.reshape(h, w, channels)
    rows = rows[::-1]  # PFM stores rows bottom-to-top
    return rows.transpose(2, 0, 1).copy()


def write_pfm(path, data: np.ndarray) -> None:
    """Write (C, H, W) samples as a little-endian PFM (scale -1.0)."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 2:
        data = data[None]
    c, h, w = data.shape
    if c not in (1, 3):
        raise ShapeError("PFM supports 1 or 3 channels")
    header = b"PF\n" if c == 3 else b"Pf\n"
    rows = data.transpose(1, 2, 0)[::-1].astype("<f4")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(f"{w} {h}\n".encode())
        fh.write(b"-1.0\n")
        fh.write(rows.tobytes())
