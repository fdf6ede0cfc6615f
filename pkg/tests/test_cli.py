import json

import numpy as np
import pytest

from wfdiff.cli import run_cli
from wfdiff.image import DISPLAY, ImageBuffer, read_pfm, save_image
from wfdiff.predictor import random_weights, serialize_predictor_weights


@pytest.fixture
def dark_png(tmp_path):
    path = tmp_path / "dark.png"
    gen = np.random.default_rng(0)
    save_image(ImageBuffer(gen.random((3, 24, 24)) * 0.35, DISPLAY), path)
    return path


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "T": 20, "S": 10, "seed": 5,
        "predictor": {"type": "gaussian", "m": 0.0, "s": 1.0},
        "scorer": {"type": "none"},
    }))
    return path


class TestDecompose:
    def test_writes_four_subbands(self, tmp_path, dark_png):
        outdir = tmp_path / "bands"
        small = tmp_path / "small.png"
        save_image(ImageBuffer(np.random.default_rng(1).random((1, 8, 8)), DISPLAY), small)
        assert run_cli(["decompose", "-i", str(small), "-o", str(outdir)]) == 0
        for name in ("ll", "lh", "hl", "hh"):
            band = read_pfm(outdir / f"{name}.pfm")
            assert band.shape == (1, 4, 4)


class TestEnhance:
    def test_missing_input_exits_2(self, tmp_path, config_path):
        code = run_cli(["enhance", "-i", str(tmp_path / "nope.png"),
                        "-o", str(tmp_path / "out.png"), "-c", str(config_path)])
        assert code == 2

    def test_enhance_and_trace(self, tmp_path, dark_png, config_path):
        out = tmp_path / "out.png"
        trace = tmp_path / "trace.csv"
        code = run_cli(["enhance", "-i", str(dark_png), "-o", str(out),
                        "-c", str(config_path), "--trace", str(trace)])
        assert code == 0
        assert out.exists()
        lines = trace.read_text().strip().splitlines()
        assert lines[0] == "t,brightness_loss,semantic_loss,theta"
        assert len(lines) == 21  # header + T records

    def test_unknown_config_key_rejected_before_write(self, tmp_path, dark_png):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"T": 20, "S": 10, "bogus": 1}))
        out = tmp_path / "out.png"
        assert run_cli(["enhance", "-i", str(dark_png), "-o", str(out),
                        "-c", str(cfg)]) == 2
        assert not out.exists()

    def test_out_of_range_config_rejected(self, tmp_path, dark_png):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"T": 20, "S": 10, "e_level": 2.0}))
        assert run_cli(["enhance", "-i", str(dark_png),
                        "-o", str(tmp_path / "o.png"), "-c", str(cfg)]) == 2

    def test_conv_predictor_config(self, tmp_path, dark_png):
        weights = tmp_path / "w.bin"
        weights.write_bytes(serialize_predictor_weights(random_weights(3, seed=2)))
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "T": 5, "S": 5, "predictor": {"type": "conv", "weights_path": str(weights)},
        }))
        out = tmp_path / "out.png"
        assert run_cli(["enhance", "-i", str(dark_png), "-o", str(out),
                        "-c", str(cfg)]) == 0
        assert out.exists()

    def test_mock_scorer_with_guidance(self, tmp_path, dark_png):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "T": 10, "S": 5, "guidance_weight": 0.05, "scorer": {"type": "mock"},
        }))
        assert run_cli(["enhance", "-i", str(dark_png),
                        "-o", str(tmp_path / "o.png"), "-c", str(cfg)]) == 0

    def test_seed_env_determinism(self, tmp_path, dark_png, config_path, monkeypatch):
        monkeypatch.setenv("WFP_SEED", "777")
        out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
        run_cli(["enhance", "-i", str(dark_png), "-o", str(out1), "-c", str(config_path)])
        run_cli(["enhance", "-i", str(dark_png), "-o", str(out2), "-c", str(config_path)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_env_overrides(self, tmp_path, dark_png, config_path, monkeypatch):
        out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
        monkeypatch.setenv("WFP_SEED", "1")
        run_cli(["enhance", "-i", str(dark_png), "-o", str(out1), "-c", str(config_path)])
        monkeypatch.setenv("WFP_SEED", "2")
        run_cli(["enhance", "-i", str(dark_png), "-o", str(out2), "-c", str(config_path)])
        assert out1.read_bytes() != out2.read_bytes()


class TestMetrics:
    def test_identity_row(self, tmp_path, capsys):
        img = tmp_path / "x.png"
        save_image(ImageBuffer(np.random.default_rng(3).random((3, 16, 16)), DISPLAY), img)
        assert run_cli(["metrics", "-a", str(img), "-b", str(img)]) == 0
        row = capsys.readouterr().out.strip()
        name, p, s, l = row.split(",")
        assert name == "x"
        assert float(p) == 99.0
        assert float(s) == pytest.approx(1.0)
        assert l == ""

    def test_with_loe_ref(self, tmp_path, capsys):
        img = tmp_path / "x.png"
        save_image(ImageBuffer(np.random.default_rng(4).random((3, 16, 16)), DISPLAY), img)
        assert run_cli(["metrics", "-a", str(img), "-b", str(img),
                        "--loe-ref", str(img)]) == 0
        row = capsys.readouterr().out.strip()
        assert float(row.split(",")[3]) == 0.0

    def test_usage_error(self):
        assert run_cli(["metrics", "-a", "only-one.png"]) == 2


class TestDemo:
    def test_demo_runs_and_reports(self, capsys):
        assert run_cli(["demo"]) == 0
        out = capsys.readouterr().out
        assert "psnr_vs_clean" in out
        assert "mean_luminance" in out
