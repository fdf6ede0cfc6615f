import numpy as np
import pytest

from wfdiff.errors import ShapeError, SymmetryError
from wfdiff.fourier import (
    AmplitudePhase, Spectrum, amp_phase, fft2, ifft2_real, recompose,
)
from wfdiff.image import UNBOUNDED, ImageBuffer


def buf(arr):
    return ImageBuffer(np.asarray(arr, dtype=np.float64), UNBOUNDED)


def dft_oracle(x: np.ndarray) -> np.ndarray:
    """Direct O(N^2) DFT summation for one plane."""
    h, w = x.shape
    out = np.zeros((h, w), dtype=complex)
    for u in range(h):
        for v in range(w):
            for m in range(h):
                for n in range(w):
                    out[u, v] += x[m, n] * np.exp(-2j * np.pi * (u * m / h + v * n / w))
    return out


class TestFft2:
    def test_2x2_by_hand(self):
        spec = fft2(buf([[[1, 2], [3, 4]]])).data[0]
        assert spec[0, 0] == pytest.approx(10.0)
        assert spec[0, 1] == pytest.approx(-2.0)
        assert spec[1, 0] == pytest.approx(-4.0)
        assert spec[1, 1] == pytest.approx(0.0)

    def test_constant_dc_only(self):
        spec = fft2(buf(np.full((1, 5, 7), 0.4))).data[0]
        assert spec[0, 0] == pytest.approx(0.4 * 35)
        off_dc = spec.copy()
        off_dc[0, 0] = 0
        assert np.abs(off_dc).max() < 1e-10

    def test_parseval(self):
        x = np.random.default_rng(0).standard_normal((3, 6, 9))
        spec = fft2(buf(x)).data
        lhs = (x ** 2).sum()
        rhs = (np.abs(spec) ** 2).sum() / (6 * 9)
        assert abs(lhs - rhs) / lhs < 1e-6

    @pytest.mark.parametrize("shape", [(1, 1), (2, 3), (4, 4), (5, 7), (8, 8)])
    def test_matches_oracle(self, shape):
        x = np.random.default_rng(hash(shape) & 0xFFFF).standard_normal(shape)
        spec = fft2(buf(x[None])).data[0]
        assert np.abs(spec - dft_oracle(x)).max() < 1e-9


class TestAmpPhase:
    def test_negative_real(self):
        ap = amp_phase(Spectrum(np.full((1, 1, 1), -2.0 + 0j)))
        assert ap.amp[0, 0, 0] == pytest.approx(2.0)
        assert ap.pha[0, 0, 0] == pytest.approx(np.pi)

    def test_zero_bin_convention(self):
        ap = amp_phase(Spectrum(np.zeros((1, 2, 2), dtype=complex)))
        assert (ap.amp == 0).all()
        assert (ap.pha == 0).all()

    def test_3_4i(self):
        ap = amp_phase(Spectrum(np.full((1, 1, 1), 3.0 + 4.0j)))
        assert ap.amp[0, 0, 0] == pytest.approx(5.0)
        assert ap.pha[0, 0, 0] == pytest.approx(np.arctan2(4, 3))
        assert ap.pha[0, 0, 0] == pytest.approx(0.92730, abs=1e-5)


class TestRecompose:
    def test_polar_form(self):
        spec = recompose(AmplitudePhase(np.full((1, 1, 1), 2.0), np.full((1, 1, 1), np.pi)))
        assert abs(spec.data[0, 0, 0] - (-2.0)) < 1e-9

    def test_zero_amp(self):
        spec = recompose(AmplitudePhase(np.zeros((1, 2, 2)), np.full((1, 2, 2), 1.23)))
        assert (spec.data == 0).all()

    def test_round_trip(self):
        gen = np.random.default_rng(1)
        s = Spectrum(gen.standard_normal((3, 4, 5)) + 1j * gen.standard_normal((3, 4, 5)))
        back = recompose(amp_phase(s))
        assert np.abs(back.data - s.data).max() < 1e-9

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            AmplitudePhase(np.zeros((1, 2, 2)), np.zeros((1, 2, 3)))


class TestIfft2Real:
    def test_dc_inversion(self):
        spec = np.zeros((1, 2, 2), dtype=complex)
        spec[0, 0, 0] = 4.0
        img = ifft2_real(Spectrum(spec))
        assert np.allclose(img.data, 1.0)

    def test_round_trip(self):
        x = np.random.default_rng(2).standard_normal((3, 7, 6))
        back = ifft2_real(fft2(buf(x)))
        assert np.abs(back.data - x).max() < 1e-6

    def test_linearity(self):
        gen = np.random.default_rng(3)
        s1 = fft2(buf(gen.standard_normal((1, 6, 6))))
        s2 = fft2(buf(gen.standard_normal((1, 6, 6))))
        merged = ifft2_real(Spectrum(s1.data + s2.data))
        split = ifft2_real(s1).data + ifft2_real(s2).data
        assert np.abs(merged.data - split).max() < 1e-6

    def test_symmetry_error(self):
        spec = np.zeros((1, 4, 4), dtype=complex)
        spec[0, 1, 0] = 1.0j  # lone imaginary bin, clearly asymmetric
        with pytest.raises(SymmetryError):
            ifft2_real(Spectrum(spec))

    def test_amplitude_swap_stays_real(self):
        gen = np.random.default_rng(4)
        for _ in range(5):
            a = fft2(buf(gen.standard_normal((1, 8, 6))))
            b = fft2(buf(gen.standard_normal((1, 8, 6))))
            swapped = AmplitudePhase(amp_phase(a).amp, amp_phase(b).pha)
            ifft2_real(recompose(swapped))  # must not raise
