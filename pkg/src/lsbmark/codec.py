"""Embedding and blind extraction of grayscale watermarks.

Two methods share one framing format:

* ``Method.MODIFIED`` stores a whole watermark byte in each selected host
  pixel, two bits per channel in a, r, g, b order (8 bits per pixel).
* ``Method.CLASSIC`` is the plain LSB baseline: one bit in each of r, g, b
  (3 bits per pixel), alpha untouched.

Every embedding starts with an 8-byte header (magic ``0x574D``, width,
height, CRC-16/CCITT-FALSE of the watermark bytes, all big-endian) so the
extractor needs nothing but the key. Header bytes come first in plan order,
followed by the watermark pixels in row-major order.
"""

from __future__ import annotations

import binascii
import enum
import struct
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .images import ArgbImage, GrayImage
from .keystream import plan_indices
from .metrics import ZeroVarianceError, normalized_correlation

MAGIC = 0x574D
HEADER_BYTES = 8
HEADER_BITS = 8 * HEADER_BYTES
MAX_SIDE = 0xFFFF

# nc >= this counts as "watermark present"; null scores for 64x64 references stay < 0.06
DEFAULT_THRESHOLD = 0.2


class CodecError(Exception):
    pass


class WatermarkTooLargeError(CodecError):
    def __init__(self, message, required_bits=None, available_bits=None):
        super().__init__(message)
        self.required_bits = required_bits
        self.available_bits = available_bits


class ReferenceTooLargeError(WatermarkTooLargeError):
    pass


class EmptyWatermarkError(CodecError):
    pass


class NoWatermarkFoundError(CodecError):
    """Header magic did not match: wrong key or no watermark."""


class CorruptHeaderError(CodecError):
    """Magic matched but the stored dimensions cannot fit in this host."""


class Method(str, enum.Enum):
    CLASSIC = "classic"
    MODIFIED = "modified"

    @property
    def bits_per_pixel(self) -> int:
        return 8 if self is Method.MODIFIED else 3


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection, no xorout)."""
    return binascii.crc_hqx(bytes(data), 0xFFFF)


@dataclass(frozen=True)
class PayloadHeader:
    magic: int
    wm_width: int
    wm_height: int
    checksum: int

    @classmethod
    def for_watermark(cls, watermark: GrayImage) -> "PayloadHeader":
        return cls(MAGIC, watermark.width, watermark.height,
                   crc16_ccitt_false(watermark.tobytes()))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PayloadHeader":
        return cls(*struct.unpack(">HHHH", bytes(raw)))

    def to_bytes(self) -> bytes:
        return struct.pack(">HHHH", self.magic, self.wm_width, self.wm_height, self.checksum)

    @property
    def magic_ok(self) -> bool:
        return self.magic == MAGIC

    @property
    def pixel_count(self) -> int:
        return self.wm_width * self.wm_height


@dataclass(frozen=True)
class ExtractionResult:
    watermark: GrayImage
    header_valid: bool
    checksum_valid: bool
    header: PayloadHeader


class Detection(NamedTuple):
    score: float
    detected: bool


def _method(method) -> Method:
    return method if isinstance(method, Method) else Method(str(method).lower())


def capacity(host: ArgbImage, method=Method.MODIFIED) -> int:
    """Payload bits available after the 64-bit header (never negative)."""
    n = host.pixel_count if isinstance(host, ArgbImage) else int(host)
    return max(_method(method).bits_per_pixel * n - HEADER_BITS, 0)


def max_watermark_pixels(host: ArgbImage, method=Method.MODIFIED) -> int:
    return capacity(host, method) // 8


def encode_byte_into_pixel(pixel, w: int) -> tuple[int, int, int, int]:
    """Store byte ``w`` in the two low bits of each channel.

    Bit pairs go MSB-first: (w7, w6) into alpha, (w5, w4) red, (w3, w2) green,
    (w1, w0) blue, the higher bit of each pair at channel bit 1.
    """
    w &= 0xFF
    return tuple(
        (int(c) & 0xFC) | ((w >> (6 - 2 * i)) & 0b11) for i, c in enumerate(pixel)
    )


def decode_byte_from_pixel(pixel) -> int:
    a, r, g, b = (int(c) for c in pixel)
    return (a & 3) << 6 | (r & 3) << 4 | (g & 3) << 2 | (b & 3)


# -- vectorised bit planes -------------------------------------------------

_PAIR_SHIFTS = np.array([6, 4, 2, 0], dtype=np.uint8)


def _write_bytes(flat: np.ndarray, plan: np.ndarray, data: np.ndarray):
    pairs = (data[:, None] >> _PAIR_SHIFTS) & 3
    flat[plan] = (flat[plan] & 0xFC) | pairs


def _read_bytes(flat: np.ndarray, plan: np.ndarray) -> np.ndarray:
    pairs = flat[plan] & 3
    return (pairs << _PAIR_SHIFTS).sum(axis=1, dtype=np.uint16).astype(np.uint8)


def _classic_pixels(nbits: int) -> int:
    return -(-nbits // 3)


def _write_bits(flat: np.ndarray, plan: np.ndarray, bits: np.ndarray):
    slots = np.arange(bits.size)
    rows = plan[slots // 3]
    cols = 1 + slots % 3  # r, g, b
    flat[rows, cols] = (flat[rows, cols] & 0xFE) | bits


def _read_bits(flat: np.ndarray, plan: np.ndarray, nbits: int) -> np.ndarray:
    slots = np.arange(nbits)
    return flat[plan[slots // 3], 1 + slots % 3] & 1


# -- embed / extract --------------------------------------------------------

def _as_watermark(watermark) -> GrayImage:
    if isinstance(watermark, GrayImage):
        return watermark
    arr = np.asarray(watermark)
    if arr.size == 0:
        raise EmptyWatermarkError("watermark has no pixels")
    return GrayImage(arr)


def _required_bits(wm_pixels: int) -> int:
    return 8 * wm_pixels


def embed(host: ArgbImage, watermark, key, method=Method.MODIFIED) -> ArgbImage:
    """Hide ``watermark`` in ``host`` at pixels chosen by ``key``.

    Only pixels in the key's selection plan change, and only in their low
    two bits (modified) or low bit (classic).
    """
    method = _method(method)
    wm = _as_watermark(watermark)
    if wm.size == 0:
        raise EmptyWatermarkError("watermark has no pixels")
    needed = _required_bits(wm.size)
    available = capacity(host, method)
    if wm.width > MAX_SIDE or wm.height > MAX_SIDE or needed > available:
        raise WatermarkTooLargeError(
            f"watermark {wm.width}x{wm.height} needs {needed} payload bits, "
            f"host {host.width}x{host.height} ({method.value}) offers {available}",
            required_bits=needed,
            available_bits=available,
        )

    frame = np.frombuffer(
        PayloadHeader.for_watermark(wm).to_bytes() + wm.tobytes(), dtype=np.uint8
    )
    n = host.pixel_count
    flat = host.array.reshape(-1, 4).copy()
    if method is Method.MODIFIED:
        plan = plan_indices(key, n, frame.size)
        _write_bytes(flat, plan, frame)
    else:
        bits = np.unpackbits(frame)
        plan = plan_indices(key, n, _classic_pixels(bits.size))
        _write_bits(flat, plan, bits)
    return ArgbImage(flat.reshape(host.array.shape))


def _read_frame(flat, key, method: Method, n: int, byte_count: int) -> np.ndarray:
    if method is Method.MODIFIED:
        return _read_bytes(flat, plan_indices(key, n, byte_count))
    nbits = 8 * byte_count
    plan = plan_indices(key, n, _classic_pixels(nbits))
    return np.packbits(_read_bits(flat, plan, nbits))


def _fits(method: Method, n: int, wm_pixels: int) -> bool:
    return wm_pixels >= 1 and _required_bits(wm_pixels) <= capacity(n, method)


def extract(image: ArgbImage, key, method=Method.MODIFIED, dimensions=None) -> ExtractionResult:
    """Recover a watermark using only the image and the key.

    The header is read first; a magic mismatch raises
    :class:`NoWatermarkFoundError`. A checksum mismatch does not raise, the
    decoded bytes are returned with ``checksum_valid=False``.

    ``dimensions=(width, height)`` overrides the stored size, which lets an
    owner read the payload when the header itself has been damaged; the
    magic check is then reported but not enforced.
    """
    method = _method(method)
    n = image.pixel_count
    flat = image.flat()
    if capacity(n, method) == 0 and dimensions is None:
        raise NoWatermarkFoundError("host is too small to hold a header")

    if capacity(n, method) == 0:
        header = PayloadHeader(0, 0, 0, 0)
    else:
        header = PayloadHeader.from_bytes(
            _read_frame(flat, key, method, n, HEADER_BYTES).tobytes()
        )
    if dimensions is None:
        if not header.magic_ok:
            raise NoWatermarkFoundError("no watermark found (wrong key or unmarked image)")
        width, height = header.wm_width, header.wm_height
        if not _fits(method, n, width * height):
            raise CorruptHeaderError(
                f"header claims a {width}x{height} watermark, "
                f"which cannot fit a {image.width}x{image.height} host"
            )
    else:
        width, height = (int(v) for v in dimensions)
        if width < 1 or height < 1:
            raise EmptyWatermarkError("watermark dimensions must be positive")
        if not _fits(method, n, width * height):
            raise ReferenceTooLargeError(
                f"a {width}x{height} watermark cannot fit a "
                f"{image.width}x{image.height} host ({method.value})",
                required_bits=_required_bits(width * height),
                available_bits=capacity(n, method),
            )

    frame = _read_frame(flat, key, method, n, HEADER_BYTES + width * height)
    payload = frame[HEADER_BYTES:]
    return ExtractionResult(
        watermark=GrayImage(payload.reshape(height, width)),
        header_valid=header.magic_ok,
        checksum_valid=crc16_ccitt_false(payload.tobytes()) == header.checksum,
        header=header,
    )


def detect(
    image: ArgbImage,
    key,
    reference: GrayImage,
    method=Method.MODIFIED,
    threshold: float = DEFAULT_THRESHOLD,
) -> Detection:
    """Non-blind presence test against the owner's reference watermark.

    Decodes the payload positions implied by the key and the reference size,
    ignoring the header, and correlates the result with ``reference``. A
    constant decoded payload scores 0.0; a constant reference raises
    :class:`~lsbmark.metrics.ZeroVarianceError`.
    """
    if np.all(reference.array == reference.array.flat[0]):
        raise ZeroVarianceError("reference watermark is constant")
    recovered = extract(image, key, method, dimensions=(reference.width, reference.height))
    try:
        score = normalized_correlation(recovered.watermark, reference)
    except ZeroVarianceError:
        score = 0.0
    return Detection(score, score >= threshold)
