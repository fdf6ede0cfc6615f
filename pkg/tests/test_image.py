import numpy as np
import pytest
from PIL import Image

from wfdiff.errors import ContractError, FormatError
from wfdiff.image import (
    CHANNEL_MAX, CHANNEL_MEAN, DISPLAY, MODEL, UNBOUNDED, ImageBuffer,
    convert_range, load_image, luminance, read_pfm, save_image, write_pfm,
)


def rand_display(shape, seed=0):
    return ImageBuffer(np.random.default_rng(seed).random(shape), DISPLAY)


class TestImageBuffer:
    def test_invariants(self):
        with pytest.raises(Exception):
            ImageBuffer(np.zeros((2, 4, 4)))  # 2 channels invalid
        with pytest.raises(ContractError):
            ImageBuffer(np.full((1, 4, 4), 1.5), DISPLAY)
        with pytest.raises(ContractError):
            ImageBuffer(np.full((1, 4, 4), -1.5), MODEL)
        ImageBuffer(np.full((1, 4, 4), 42.0), UNBOUNDED)  # fine

    def test_immutable(self):
        img = rand_display((3, 4, 4))
        with pytest.raises(ValueError):
            img.data[0, 0, 0] = 0.0


class TestPngRoundTrip:
    def test_extreme_bytes(self, tmp_path):
        path = tmp_path / "x.png"
        Image.fromarray(np.array([[255, 0]], dtype=np.uint8), mode="L").save(path)
        img = load_image(path)
        assert img.data[0, 0, 0] == 1.0
        assert img.data[0, 0, 1] == 0.0

    def test_half_gray_bytes(self, tmp_path):
        path = tmp_path / "g.png"
        save_image(ImageBuffer(np.full((1, 5, 5), 0.5)), path)
        raw = np.asarray(Image.open(path))
        assert (raw == 128).all()  # round(0.5 * 255)

    def test_quantization_bound(self, tmp_path):
        img = rand_display((3, 9, 7), seed=3)
        path = tmp_path / "r.png"
        save_image(img, path)
        back = load_image(path)
        assert np.abs(back.data - img.data).max() <= 1 / 255 + 1e-9

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "nope.png")

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.png"
        path.write_bytes(b"not a png at all")
        with pytest.raises(FormatError):
            load_image(path)

    def test_16bit_rejected(self, tmp_path):
        path = tmp_path / "deep.png"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint16)).save(path)
        with pytest.raises(FormatError):
            load_image(path)

    def test_non_display_rejected(self, tmp_path):
        img = ImageBuffer(np.zeros((1, 4, 4)), MODEL)
        with pytest.raises(ContractError):
            save_image(img, tmp_path / "m.png")


class TestPfm:
    def test_bit_identical_roundtrip(self, tmp_path):
        data = np.random.default_rng(1).random((3, 6, 5)).astype(np.float32).astype(np.float64)
        img = ImageBuffer(data)
        path = tmp_path / "x.pfm"
        save_image(img, path)
        back = load_image(path)
        assert (back.data == img.data).all()

    def test_raw_roundtrip_gray(self, tmp_path):
        data = np.random.default_rng(2).standard_normal((1, 4, 4)).astype(np.float32)
        write_pfm(tmp_path / "g.pfm", data)
        assert (read_pfm(tmp_path / "g.pfm") == data.astype(np.float64)).all()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.pfm"
        path.write_bytes(b"XX\n2 2\n-1.0\n" + b"\0" * 16)
        with pytest.raises(FormatError):
            read_pfm(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "t.pfm"
        path.write_bytes(b"Pf\n4 4\n-1.0\n" + b"\0" * 8)
        with pytest.raises(FormatError):
            read_pfm(path)


class TestConvertRange:
    @pytest.mark.parametrize("display,model", [(0.0, -1.0), (0.5, 0.0), (1.0, 1.0)])
    def test_display_to_model(self, display, model):
        img = ImageBuffer(np.full((1, 2, 2), display), DISPLAY)
        assert convert_range(img, MODEL).data[0, 0, 0] == pytest.approx(model)

    def test_clamp(self):
        img = ImageBuffer(np.full((1, 2, 2), 1.2), UNBOUNDED)
        # unbounded cannot be converted; model 1.0 maps to display 1.0
        with pytest.raises(ContractError):
            convert_range(img, DISPLAY)
        top = ImageBuffer(np.full((1, 2, 2), 1.0), MODEL)
        assert convert_range(top, DISPLAY).data[0, 0, 0] == 1.0

    def test_roundtrip_identity(self):
        img = rand_display((3, 5, 5), seed=5)
        back = convert_range(convert_range(img, MODEL), DISPLAY)
        assert np.allclose(back.data, img.data, atol=1e-15)


class TestLuminance:
    def test_mean_and_max(self):
        data = np.stack([np.full((2, 2), v) for v in (0.2, 0.4, 0.6)])
        img = ImageBuffer(data)
        assert luminance(img, CHANNEL_MEAN).data[0, 0, 0] == pytest.approx(0.4)
        assert luminance(img, CHANNEL_MAX).data[0, 0, 0] == pytest.approx(0.6)

    def test_grayscale_identity(self):
        img = rand_display((1, 3, 3), seed=7)
        assert (luminance(img, CHANNEL_MEAN).data == img.data).all()

    def test_range_bound(self):
        img = rand_display((3, 6, 6), seed=9)
        for mode in (CHANNEL_MEAN, CHANNEL_MAX):
            lum = luminance(img, mode).data
            assert lum.min() >= img.data.min() - 1e-15
            assert lum.max() <= img.data.max() + 1e-15
