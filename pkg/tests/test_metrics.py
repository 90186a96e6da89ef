import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_argb, random_gray
from lsbmark.images import ArgbImage, GrayImage
from lsbmark.metrics import (
    DimensionMismatchError,
    EmptyInputError,
    LengthMismatchError,
    QualityReport,
    ZeroVarianceError,
    ber,
    mse,
    normalized_correlation,
    psnr,
    to_bits,
)


def expected_pair_mse():
    """E[(old - new)^2] over uniform old/new two-bit values, by enumeration."""
    diffs = [(old - new) ** 2 for old, new in itertools.product(range(4), repeat=2)]
    return sum(diffs) / len(diffs)


def test_pair_oracle_value():
    assert expected_pair_mse() == 2.5


class TestMse:
    def test_identical(self, rng):
        img = random_argb(rng, 5, 5)
        assert mse(img, img) == 0

    def test_single_channel(self):
        a = ArgbImage.from_pixels(1, 1, [(0, 0, 0, 0)])
        b = ArgbImage.from_pixels(1, 1, [(0, 255, 0, 0)])
        assert mse(a, b) == 16256.25

    def test_gray(self):
        a = GrayImage.from_pixels(2, 1, [0, 10])
        b = GrayImage.from_pixels(2, 1, [3, 10])
        assert mse(a, b) == 4.5

    def test_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            mse(random_argb(rng, 2, 2), random_argb(rng, 3, 2))
        with pytest.raises(DimensionMismatchError):
            mse(random_argb(rng, 2, 2), random_gray(rng, 2, 2))


class TestPsnr:
    def test_identical_is_inf(self, rng):
        img = random_gray(rng, 4, 4)
        assert psnr(img, img) == math.inf

    def test_uniform_delta_three(self):
        a = ArgbImage.filled(4, 4, (10, 10, 10, 10))
        b = ArgbImage.filled(4, 4, (13, 13, 13, 13))
        assert psnr(a, b) == pytest.approx(10 * math.log10(65025 / 9))
        assert psnr(a, b) == pytest.approx(38.59, abs=0.01)

    def test_from_expected_mse(self):
        assert 10 * math.log10(65025 / expected_pair_mse()) == pytest.approx(44.15, abs=0.01)

    def test_symmetric_and_monotone(self, rng):
        base = random_gray(rng, 16, 16)
        values = []
        for step in (1, 2, 5, 20):
            other = GrayImage(np.clip(base.array.astype(int) + step, 0, 255))
            assert psnr(base, other) == psnr(other, base)
            values.append(psnr(base, other))
        assert values == sorted(values, reverse=True)


class TestBer:
    def test_identical(self):
        assert ber([1, 0, 1], [1, 0, 1]) == 0

    def test_complement(self):
        assert ber([1, 0, 1, 1], [0, 1, 0, 0]) == 1.0

    def test_one_of_eight(self):
        assert ber(to_bits(b"\x00"), to_bits(b"\x01")) == 0.125

    def test_errors(self):
        with pytest.raises(LengthMismatchError):
            ber([1], [1, 0])
        with pytest.raises(EmptyInputError):
            ber([], [])

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=64), st.data())
    def test_metric_properties(self, a, data):
        n = len(a)
        b = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
        c = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
        assert ber(a, a) == 0
        assert ber(a, b) == ber(b, a)
        assert ber(a, c) <= ber(a, b) + ber(b, c) + 1e-12


class TestNormalizedCorrelation:
    def test_identical(self, rng):
        img = random_gray(rng, 8, 8)
        assert normalized_correlation(img, img) == pytest.approx(1.0)

    def test_negation(self, rng):
        img = random_gray(rng, 8, 8)
        assert normalized_correlation(img, GrayImage(255 - img.array)) == pytest.approx(-1.0)

    def test_independent_random(self, rng):
        hits = sum(
            abs(normalized_correlation(random_gray(rng, 64, 64), random_gray(rng, 64, 64))) <= 0.1
            for _ in range(200)
        )
        assert hits >= 198

    def test_zero_variance(self, rng):
        flat = GrayImage(np.full((4, 4), 7, np.uint8))
        with pytest.raises(ZeroVarianceError):
            normalized_correlation(flat, random_gray(rng, 4, 4))

    def test_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            normalized_correlation(random_gray(rng, 4, 4), random_gray(rng, 4, 5))

    def test_affine_invariance(self, rng):
        a = random_gray(rng, 16, 16)
        b = random_gray(rng, 16, 16)
        scaled = 2.0 * b.array.astype(np.float64) + 10  # unclamped arithmetic
        assert normalized_correlation(a.array, scaled) == pytest.approx(
            normalized_correlation(a, b), abs=1e-12
        )

    @given(st.lists(st.integers(0, 255), min_size=4, max_size=4), st.lists(st.integers(0, 255), min_size=4, max_size=4))
    def test_bounded(self, a, b):
        try:
            r = normalized_correlation(np.array(a), np.array(b))
        except ZeroVarianceError:
            return
        assert -1.0 <= r <= 1.0


def test_quality_report_pristine(rng):
    host = random_argb(rng, 8, 8)
    wm = random_gray(rng, 4, 4)
    report = QualityReport.measure(host, host, wm, wm)
    assert report.mse == 0 and report.psnr == math.inf
    assert report.ber == 0 and report.nc == pytest.approx(1.0)
