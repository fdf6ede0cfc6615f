"""End-to-end enhancement: prior setup, the guided reverse loop, and output.

The loop runs entirely in the half-scaled low-band domain of the input.
Each step corrects the current sample through the joint wavelet/Fourier
prior, refreshes theta against the brightness constraint, optionally
applies semantic guidance every S steps, and advances with the joint
reverse transition.  The final sample is unscaled back to the low band,
recombined with the input's detail bands, and lightly denoised.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .diffusion import NoiseSchedule, guided_step, linear_schedule, q_sample
from .errors import ContractError, NumericError, ParameterError
from .guidance import (
    GuidancePriors, PromptPair, SemanticScorer, Theta, apply_semantic_guidance,
    brightness_loss, build_priors, guided_update, semantic_loss, theta_step,
)
from .image import DISPLAY, ImageBuffer, UNBOUNDED
from .rng import SeededRng
from .wavelet import idwt2

NOISED_INPUT = "noised-input"
PURE_NOISE = "pure-noise"

DEFAULT_PROBE = 0.01


@dataclass(frozen=True)
class EnhanceConfig:
    T: int = 1000
    S: int = 200
    theta_init: float = 1.0
    theta_lr: float = 0.1  # 0 freezes theta for ablation
    e_level: float = 0.6
    guidance_weight: float = 0.0
    prompts: PromptPair = field(default_factory=PromptPair)
    init_mode: str = NOISED_INPUT
    denoise_strength: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.T < 1:
            raise ParameterError(f"T must be >= 1, got {self.T}")
        if not (1 <= self.S <= self.T):
            raise ParameterError(f"need 1 <= S <= T, got S={self.S}, T={self.T}")
        if not (0.0 <= self.e_level <= 1.0):
            raise ParameterError(f"e_level must be in [0, 1], got {self.e_level}")
        if self.theta_init < 0 or self.theta_lr < 0:
            raise ParameterError("theta_init and theta_lr must be >= 0")
        if self.guidance_weight < 0:
            raise ParameterError("guidance_weight must be >= 0")
        if self.denoise_strength < 0:
            raise ParameterError("denoise_strength must be >= 0")
        if self.init_mode not in (NOISED_INPUT, PURE_NOISE):
            raise ParameterError(f"unknown init_mode {self.init_mode!r}")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    brightness_loss: float
    semantic_loss: float | None
    theta: float


@dataclass
class SamplerTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "brightness_loss", "semantic_loss", "theta"])
            for rec in self.records:
                sem = "" if rec.semantic_loss is None else repr(rec.semantic_loss)
                writer.writerow([rec.t, repr(rec.brightness_loss), sem, repr(rec.theta)])


def enhance(i_l: ImageBuffer, cfg: EnhanceConfig, predictor,
            scorer: SemanticScorer | None = None) -> tuple[ImageBuffer, SamplerTrace]:
    """Run the full guided reverse-sampling enhancement on one image."""
    if i_l.range_tag != DISPLAY:
        raise ContractError("enhance expects a display-range input")
    if cfg.guidance_weight > 0 and scorer is None:
        raise ContractError("semantic guidance enabled but no scorer supplied")

    priors = build_priors(i_l)
    sched = linear_schedule(cfg.T)
    rng = SeededRng(cfg.seed)
    trace = SamplerTrace()

    z = ImageBuffer(rng.normal(priors.ll_scaled.shape), UNBOUNDED)
    if cfg.init_mode == NOISED_INPUT:
        x = q_sample(priors.ll_scaled, cfg.T, z, sched)
    else:
        x = z

    theta = Theta(cfg.theta_init)
    for t in range(cfg.T, 0, -1):
        eps = predictor.predict(x, t, sched)  # per-contract probe; Eq.-10 path below
        x_t1 = guided_update(x, priors, theta)
        if cfg.theta_lr > 0:
            theta = theta_step(x, priors, theta, cfg.e_level, cfg.theta_lr)
        sem = None
        if cfg.guidance_weight > 0 and t % cfg.S == 0:
            x_t1 = apply_semantic_guidance(
                x_t1, scorer, cfg.prompts, cfg.guidance_weight, DEFAULT_PROBE)
            sem = semantic_loss(scorer, x_t1, cfg.prompts)
        trace.append(TraceRecord(t, brightness_loss(x_t1, cfg.e_level), sem, theta.value))
        x = guided_step(x, x_t1, t, sched, rng)
        if not np.isfinite(x.data).all():
            raise NumericError(f"non-finite sample at step t={t}")

    ll = ImageBuffer(2.0 * x.data, UNBOUNDED)  # undo the 0.5 low-band scaling
    raw = idwt2(priors.h_l.with_ll(ll))
    out = ImageBuffer(np.clip(raw.data, 0.0, 1.0), DISPLAY)
    return post_denoise(out, cfg.denoise_strength), trace


def post_denoise(img: ImageBuffer, strength: float) -> ImageBuffer:
    """Edge-preserving bilateral pass; strength is the range sigma, 0 = identity."""
    if strength < 0:
        raise ParameterError(f"strength must be >= 0, got {strength}")
    if strength == 0.0:
        return img
    radius, spatial_sigma = 2, 1.5
    offsets = [(dy, dx) for dy in range(-radius, radius + 1)
               for dx in range(-radius, radius + 1)]
    x = img.data
    pad = np.pad(x, ((0, 0), (radius, radius), (radius, radius)), mode="symmetric")
    h, w = x.shape[1:]
    acc = np.zeros_like(x)
    norm = np.zeros_like(x)
    for dy, dx in offsets:
        shifted = pad[:, radius + dy:radius + dy + h, radius + dx:radius + dx + w]
        weight = np.exp(-(dy * dy + dx * dx) / (2.0 * spatial_sigma ** 2)
                        - (shifted - x) ** 2 / (2.0 * strength ** 2))
        acc += weight * shifted
        norm += weight
    out = np.clip(acc / norm, 0.0, 1.0)
    return ImageBuffer(out, img.range_tag)
