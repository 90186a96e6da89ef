"""Blind spatial-domain LSB watermarking of ARGB images.

The modified method hides one 8-bit watermark pixel per host pixel (two bits
in each of a, r, g, b); the classic method hides three bits per pixel in the
low bit of r, g, b. Host pixels are chosen by a key-seeded shuffle.
"""

__version__ = "0.1.0"

from .attacks import AttackSpec, Rect, add_noise, crop, cut, parse_attack, zero_lsb
from .codec import (
    Detection,
    ExtractionResult,
    Method,
    PayloadHeader,
    capacity,
    decode_byte_from_pixel,
    detect,
    embed,
    encode_byte_into_pixel,
    extract,
)
from .images import ArgbImage, Channel, GrayImage, load_argb, load_gray, save_argb, save_gray
from .keystream import SecretKey, SelectionPlan, derive_permutation, seed_from_key
from .metrics import QualityReport, ber, mse, normalized_correlation, psnr

__all__ = [
    "ArgbImage", "AttackSpec", "Channel", "Detection", "ExtractionResult", "GrayImage",
    "Method", "PayloadHeader", "QualityReport", "Rect", "SecretKey", "SelectionPlan",
    "add_noise", "ber", "capacity", "crop", "cut", "decode_byte_from_pixel",
    "derive_permutation", "detect", "embed", "encode_byte_into_pixel", "extract",
    "load_argb", "load_gray", "mse", "normalized_correlation", "parse_attack", "psnr",
    "save_argb", "save_gray", "seed_from_key", "zero_lsb",
]
