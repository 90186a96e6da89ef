"""Image quality and watermark recovery metrics (MSE, PSNR, BER, NC)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .images import ArgbImage, GrayImage

PEAK = 255.0


class MetricError(ValueError):
    pass


class DimensionMismatchError(MetricError):
    pass


class LengthMismatchError(MetricError):
    pass


class EmptyInputError(MetricError):
    pass


class ZeroVarianceError(MetricError):
    """Correlation is undefined because an input is constant."""


def _samples(img) -> np.ndarray:
    if isinstance(img, (ArgbImage, GrayImage)):
        return img.array
    return np.asarray(img)


def _paired(a, b) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, (ArgbImage, GrayImage)) and isinstance(b, (ArgbImage, GrayImage)):
        if type(a) is not type(b):
            raise DimensionMismatchError(
                f"cannot compare {type(a).__name__} with {type(b).__name__}"
            )
    x, y = _samples(a), _samples(b)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape {x.shape} != {y.shape}")
    return x.astype(np.float64), y.astype(np.float64)


def mse(a, b) -> float:
    """Mean squared difference over every channel sample.

    ARGB images contribute four samples per pixel, alpha included, because the
    modified method writes into alpha too.
    """
    x, y = _paired(a, b)
    return float(np.mean((x - y) ** 2))


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB with peak 255; ``math.inf`` if identical."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def to_bits(data) -> np.ndarray:
    """MSB-first bits of a byte string, gray image or uint8 array."""
    if isinstance(data, GrayImage):
        data = data.array
    if isinstance(data, (bytes, bytearray)):
        data = np.frombuffer(bytes(data), dtype=np.uint8)
    return np.unpackbits(np.asarray(data, dtype=np.uint8).ravel())


def ber(a, b) -> float:
    """Fraction of positions where two equal-length bit sequences differ."""
    x = np.asarray(a).ravel()
    y = np.asarray(b).ravel()
    if x.size != y.size:
        raise LengthMismatchError(f"bit sequences differ in length: {x.size} != {y.size}")
    if x.size == 0:
        raise EmptyInputError("bit error rate of empty sequences")
    return float(np.count_nonzero((x != 0) != (y != 0))) / x.size


def normalized_correlation(a, b) -> float:
    """Pearson correlation of the pixel sequences of two equal-size images.

    Raises :class:`ZeroVarianceError` when either input is constant; a flat
    image carries no structure to correlate against.
    """
    x, y = _paired(a, b)
    x = x.ravel() - x.mean()
    y = y.ravel() - y.mean()
    sx = math.sqrt(float(np.dot(x, x)))
    sy = math.sqrt(float(np.dot(y, y)))
    if sx == 0 or sy == 0:
        raise ZeroVarianceError("normalized correlation needs non-constant inputs")
    r = float(np.dot(x, y)) / (sx * sy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float
    ber: float
    nc: float

    @classmethod
    def measure(
        cls,
        host: ArgbImage,
        marked: ArgbImage,
        watermark: GrayImage,
        recovered: GrayImage,
    ) -> "QualityReport":
        """Host distortion plus watermark recovery quality in one record.

        ``nc`` is reported as 0.0 when either watermark is constant.
        """
        try:
            nc = normalized_correlation(watermark, recovered)
        except ZeroVarianceError:
            nc = 0.0
        return cls(
            mse=mse(host, marked),
            psnr=psnr(host, marked),
            ber=ber(to_bits(watermark), to_bits(recovered)),
            nc=nc,
        )
