"""Zero-shot low-light image enhancement by wavelet/Fourier-prior guided
diffusion sampling, with a learnable brightness factor and a pluggable
semantic-guidance hook."""

from .diffusion import (
    GaussianPriorPredictor, NoiseSchedule, gaussian_prior_eps, guided_step,
    linear_schedule, q_sample, unguided_step,
)
from .fourier import AmplitudePhase, Spectrum, amp_phase, fft2, ifft2_real, recompose
from .guidance import (
    GuidancePriors, MockScorer, PromptPair, SemanticScorer, Theta,
    apply_semantic_guidance, brightness_loss, build_priors, guided_update,
    semantic_loss, theta_step,
)
from .image import (
    CHANNEL_MAX, CHANNEL_MEAN, DISPLAY, MODEL, UNBOUNDED, ImageBuffer,
    convert_range, load_image, luminance, save_image,
)
from .metrics import MetricReport, loe, psnr, ssim
from .pipeline import EnhanceConfig, SamplerTrace, enhance, post_denoise
from .predictor import (
    ConvPredictor, ConvPredictorWeights, conv_predictor_forward,
    load_predictor_weights, random_weights, serialize_predictor_weights,
)
from .rng import SeededRng
from .wavelet import SubbandSet, dwt2, idwt2

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
