"""Command-line entry point.

Subcommands:
  enhance    -i IN -o OUT -c CONFIG [--trace CSV]
  decompose  -i IN -o DIR            (level-1 subbands as PFM)
  metrics    -a IMG -b IMG [--loe-ref IMG]
  demo                               (synthetic end-to-end run with deltas)

Exit codes: 0 success, 1 processing error, 2 usage/file/config error.
The WFP_SEED environment variable overrides the configured seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import fixtures, metrics as metrics_mod
from .diffusion import GaussianPriorPredictor
from .errors import WfdiffError
from .guidance import MockScorer, PromptPair
from .image import ImageBuffer, load_image, save_image, write_pfm
from .pipeline import EnhanceConfig, enhance
from .predictor import ConvPredictor, load_predictor_weights
from .wavelet import dwt2

SEED_ENV = "WFP_SEED"

_CONFIG_KEYS = {
    "T", "S", "theta_init", "theta_lr", "e_level", "guidance_weight",
    "prompts", "init_mode", "denoise_strength", "seed", "predictor", "scorer",
}


class ConfigError(WfdiffError):
    pass


def _require_keys(doc: dict, allowed: set, where: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def parse_config(doc: dict):
    """Validate a JSON config document; returns (EnhanceConfig, predictor, scorer)."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, _CONFIG_KEYS, "config")

    prompts = PromptPair()
    if "prompts" in doc:
        pd = doc["prompts"]
        _require_keys(pd, {"positive", "negative"}, "prompts")
        prompts = PromptPair(pd.get("positive", prompts.positive),
                             pd.get("negative", prompts.negative))

    kwargs = {k: doc[k] for k in
              ("T", "S", "theta_init", "theta_lr", "e_level", "guidance_weight",
               "init_mode", "denoise_strength", "seed") if k in doc}
    try:
        cfg = EnhanceConfig(prompts=prompts, **kwargs)
    except (WfdiffError, TypeError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    pred_doc = doc.get("predictor", {"type": "gaussian", "m": 0.0, "s": 1.0})
    ptype = pred_doc.get("type")
    if ptype == "gaussian":
        _require_keys(pred_doc, {"type", "m", "s"}, "predictor")
        predictor = GaussianPriorPredictor(pred_doc.get("m", 0.0), pred_doc.get("s", 1.0))
    elif ptype == "conv":
        _require_keys(pred_doc, {"type", "weights_path"}, "predictor")
        if "weights_path" not in pred_doc:
            raise ConfigError("conv predictor needs weights_path")
        blob = Path(pred_doc["weights_path"]).read_bytes()
        predictor = ConvPredictor(load_predictor_weights(blob))
    else:
        raise ConfigError(f"unknown predictor type {ptype!r}")

    scorer_doc = doc.get("scorer", {"type": "none"})
    _require_keys(scorer_doc, {"type"}, "scorer")
    stype = scorer_doc.get("type")
    if stype == "mock":
        scorer = MockScorer()
    elif stype == "none":
        scorer = None
    else:
        raise ConfigError(f"unknown scorer type {stype!r}")

    return cfg, predictor, scorer


def _apply_seed_env(cfg: EnhanceConfig) -> EnhanceConfig:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return cfg
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")
    return EnhanceConfig(**{**cfg.__dict__, "seed": seed})


def _cmd_enhance(args) -> int:
    with open(args.config) as fh:
        cfg, predictor, scorer = parse_config(json.load(fh))
    cfg = _apply_seed_env(cfg)
    img = load_image(args.input)
    out, trace = enhance(img, cfg, predictor, scorer)
    save_image(out, args.output)
    if args.trace:
        trace.write_csv(args.trace)
    return 0


def _cmd_decompose(args) -> int:
    img = load_image(args.input)
    sb = dwt2(img)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in ("ll", "lh", "hl", "hh"):
        write_pfm(outdir / f"{name}.pfm", getattr(sb, name).data)
    return 0


def _cmd_metrics(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    loe_ref = load_image(args.loe_ref) if args.loe_ref else None
    rep = metrics_mod.report(a, b, loe_ref)
    print(rep.csv_row(Path(args.b).stem))
    return 0


def _cmd_demo(args) -> int:
    clean = fixtures.demo_scene()
    dark = fixtures.darken_gamma(clean, 2.5)
    cfg = EnhanceConfig(T=100, S=50, seed=42)
    cfg = _apply_seed_env(cfg)
    out, _ = enhance(dark, cfg, GaussianPriorPredictor())
    psnr_before = metrics_mod.psnr(dark, clean)
    psnr_after = metrics_mod.psnr(out, clean)
    ssim_before = metrics_mod.ssim(dark, clean)
    ssim_after = metrics_mod.ssim(out, clean)
    loe_out = metrics_mod.loe(dark, out)
    mean_out = float(out.data.mean())
    print(f"mean_luminance: {float(dark.data.mean()):.4f} -> {mean_out:.4f} "
          f"(target {cfg.e_level})")
    print(f"psnr_vs_clean: {psnr_before:.3f} -> {psnr_after:.3f} dB")
    print(f"ssim_vs_clean: {ssim_before:.4f} -> {ssim_after:.4f}")
    print(f"loe_input_vs_output: {loe_out:.3f}")
    if args.output:
        save_image(out, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfdiff",
        description="Zero-shot low-light enhancement via wavelet/Fourier-prior "
                    "guided diffusion sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="enhance one image")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-c", "--config", required=True, help="JSON config path")
    p.add_argument("--trace", help="write a per-step CSV trace here")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("decompose", help="write level-1 wavelet subbands as PFM")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("metrics", help="print a CSV metrics row for an image pair")
    p.add_argument("-a", required=True, help="reference image")
    p.add_argument("-b", required=True, help="image under test")
    p.add_argument("--loe-ref", help="original image for the LOE metric")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("demo", help="run the gamma-darkening fixture end to end")
    p.add_argument("-o", "--output", help="optionally save the enhanced image")
    p.set_defaults(func=_cmd_demo)
    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"wfdiff: file error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"wfdiff: config error: {exc}", file=sys.stderr)
        return 2
    except WfdiffError as exc:
        print(f"wfdiff: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wfdiff: file error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
