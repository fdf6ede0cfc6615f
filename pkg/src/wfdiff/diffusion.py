"""Noise schedule, forward marginal, and the two reverse-step rules.

The reverse variance is the standard posterior variance
``beta_t * (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)``, which makes the
t=1 step deterministic.  All tables are indexed 1..T; index 0 carries the
``alpha_bar[0] = 1`` convention so t=0 is an exact identity for q_sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .image import UNBOUNDED, ImageBuffer
from .rng import SeededRng

DEFAULT_BETA1 = 1e-4
DEFAULT_BETAT = 0.02


@dataclass(frozen=True)
class NoiseSchedule:
    """beta/alpha/alpha_bar/sigma2 tables; entry [0] is the t=0 convention."""

    beta: np.ndarray
    alpha: np.ndarray
    alpha_bar: np.ndarray
    sigma2: np.ndarray

    @property
    def T(self) -> int:
        return len(self.beta) - 1


def linear_schedule(T: int, beta1: float = DEFAULT_BETA1,
                    betaT: float = DEFAULT_BETAT) -> NoiseSchedule:
    """Linearly interpolated beta schedule with derived tables."""
    if T < 1:
        raise ParameterError(f"T must be >= 1, got {T}")
    if not (0.0 < beta1 <= betaT < 1.0):
        raise ParameterError(f"need 0 < beta1 <= betaT < 1, got ({beta1}, {betaT})")
    betas = np.linspace(beta1, betaT, T) if T > 1 else np.array([beta1])
    beta = np.concatenate([[0.0], betas])
    alpha = 1.0 - beta
    alpha[0] = 1.0
    alpha_bar = np.cumprod(alpha)
    sigma2 = np.zeros(T + 1)
    sigma2[1:] = beta[1:] * (1.0 - alpha_bar[:-1]) / (1.0 - alpha_bar[1:])
    sigma2[1] = 0.0  # alpha_bar[0] = 1 makes this exact
    return NoiseSchedule(beta, alpha, alpha_bar, sigma2)


def _check_t(t: int, sched: NoiseSchedule, lo: int = 1):
    if not (lo <= t <= sched.T):
        raise ParameterError(f"step index {t} outside [{lo}, {sched.T}]")


def q_sample(x0: ImageBuffer, t: int, eps: ImageBuffer, sched: NoiseSchedule) -> ImageBuffer:
    """Forward marginal: sqrt(abar_t) * x0 + sqrt(1 - abar_t) * eps."""
    _check_t(t, sched, lo=0)
    if eps.shape != x0.shape:
        raise ShapeError(f"eps shape {eps.shape} != x0 shape {x0.shape}")
    ab = sched.alpha_bar[t]
    return ImageBuffer(np.sqrt(ab) * x0.data + np.sqrt(1.0 - ab) * eps.data, UNBOUNDED)


def unguided_step(x_t: ImageBuffer, eps_hat: ImageBuffer, t: int,
                  sched: NoiseSchedule, rng: SeededRng) -> ImageBuffer:
    """One ancestral reverse step from the predicted noise."""
    _check_t(t, sched)
    if eps_hat.shape != x_t.shape:
        raise ShapeError(f"eps_hat shape {eps_hat.shape} != x_t shape {x_t.shape}")
    b = sched.beta[t]
    mean = (x_t.data - b / np.sqrt(1.0 - sched.alpha_bar[t]) * eps_hat.data) \
        / np.sqrt(sched.alpha[t])
    s2 = sched.sigma2[t]
    if s2 > 0.0:
        mean = mean + np.sqrt(s2) * rng.normal(mean.shape)
    return ImageBuffer(mean, UNBOUNDED)


def guided_step(x_t: ImageBuffer, x_t1: ImageBuffer, t: int,
                sched: NoiseSchedule, rng: SeededRng) -> ImageBuffer:
    """Reverse step whose mean mixes the raw sample with its corrected twin."""
    if x_t1.shape != x_t.shape:
        raise ShapeError(f"x_t1 shape {x_t1.shape} != x_t shape {x_t.shape}")
    _check_t(t, sched)
    if t == 1:
        # coefficients reduce to (1, 0) and sigma2[1] = 0; return exactly
        return ImageBuffer(x_t1.data, UNBOUNDED)
    denom = 1.0 - sched.alpha_bar[t]
    c1 = np.sqrt(sched.alpha_bar[t - 1]) * sched.beta[t] / denom
    c2 = np.sqrt(sched.alpha[t]) * (1.0 - sched.alpha_bar[t - 1]) / denom
    mean = c1 * x_t1.data + c2 * x_t.data
    s2 = sched.sigma2[t]
    if s2 > 0.0:
        mean = mean + np.sqrt(s2) * rng.normal(mean.shape)
    return ImageBuffer(mean, UNBOUNDED)


def gaussian_prior_eps(x_t: ImageBuffer, t: int, m: float, s: float,
                       sched: NoiseSchedule) -> ImageBuffer:
    """Closed-form MMSE noise predictor for x0 ~ N(m, s^2) per sample.

    Validates the sampler math without any pretrained weights: the exact
    posterior mean E[x0 | x_t] is affine in x_t, and the implied residual
    is returned as the predicted noise.
    """
    if s < 0:
        raise ParameterError(f"s must be >= 0, got {s}")
    _check_t(t, sched)
    ab = sched.alpha_bar[t]
    gain = np.sqrt(ab) * s * s / (ab * s * s + 1.0 - ab)
    x0_hat = m + gain * (x_t.data - np.sqrt(ab) * m)
    eps = (x_t.data - np.sqrt(ab) * x0_hat) / np.sqrt(1.0 - ab)
    return ImageBuffer(eps, UNBOUNDED)


class GaussianPriorPredictor:
    """NoisePredictor wrapper around :func:`gaussian_prior_eps`."""

    def __init__(self, m: float = 0.0, s: float = 1.0):
        self.m = float(m)
        self.s = float(s)

    def predict(self, x_t: ImageBuffer, t: int, sched: NoiseSchedule) -> ImageBuffer:
        return gaussian_prior_eps(x_t, t, self.m, self.s, sched)
