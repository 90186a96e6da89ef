"""Pixel-exact image values and lossless file I/O.

Host images are 32-bit ARGB, watermarks are 8-bit grayscale. Pixels are kept
as read-only numpy arrays: ``(height, width, 4)`` in a, r, g, b order for
:class:`ArgbImage` and ``(height, width)`` for :class:`GrayImage`. The flat
pixel index used everywhere else is ``y * width + x``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PGM_SIGNATURE = b"P5"


class ImageError(Exception):
    """Base class for image I/O failures."""


class ImageNotFoundError(ImageError, FileNotFoundError):
    pass


class UnsupportedFormatError(ImageError):
    pass


class CorruptImageError(ImageError):
    pass


class ImageWriteError(ImageError, OSError):
    pass


class Channel(enum.IntEnum):
    """ARGB channels; the value is the index in the pixel array and the
    embedding order of the modified method."""

    ALPHA = 0
    RED = 1
    GREEN = 2
    BLUE = 3


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.uint8, copy=True, order="C")
    arr.setflags(write=False)
    return arr


def _check_range(values: np.ndarray):
    if values.size and (values.min() < 0 or values.max() > 255):
        raise ValueError("channel values must lie in [0, 255]")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image (the watermark payload)."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array)
        if arr.ndim != 2:
            raise ValueError(f"gray image needs a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("gray image must be at least 1x1")
        if arr.dtype != np.uint8:
            _check_range(arr)
        object.__setattr__(self, "array", _frozen(arr))

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels: Sequence[int]) -> "GrayImage":
        values = np.asarray(list(pixels), dtype=np.int64)
        if values.size != width * height:
            raise ValueError(
                f"expected {width * height} pixels for {width}x{height}, got {values.size}"
            )
        _check_range(values)
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def size(self) -> int:
        return self.array.size

    @property
    def pixels(self) -> list[int]:
        return self.array.ravel().tolist()

    def tobytes(self) -> bytes:
        return self.array.tobytes()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash((self.array.shape, self.array.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class ArgbImage:
    """32-bit host image, channels in a, r, g, b order."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ValueError(f"ARGB image needs shape (h, w, 4), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("ARGB image must be at least 1x1")
        if arr.dtype != np.uint8:
            _check_range(arr)
        object.__setattr__(self, "array", _frozen(arr))

    @classmethod
    def from_pixels(
        cls, width: int, height: int, pixels: Iterable[Sequence[int]]
    ) -> "ArgbImage":
        values = np.asarray(list(pixels), dtype=np.int64)
        if values.shape != (width * height, 4):
            raise ValueError(
                f"expected {width * height} (a, r, g, b) tuples, got array of shape {values.shape}"
            )
        _check_range(values)
        return cls(values.reshape(height, width, 4))

    @classmethod
    def filled(cls, width: int, height: int, argb: Sequence[int]) -> "ArgbImage":
        return cls(np.broadcast_to(np.asarray(argb, dtype=np.uint8), (height, width, 4)))

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    @property
    def pixels(self) -> list[tuple[int, int, int, int]]:
        return [tuple(p) for p in self.array.reshape(-1, 4).tolist()]

    def flat(self) -> np.ndarray:
        """Read-only ``(n, 4)`` view in row-major pixel order."""
        return self.array.reshape(-1, 4)

    def pixel(self, x: int, y: int) -> tuple[int, int, int, int]:
        return tuple(int(v) for v in self.array[y, x])

    def __eq__(self, other):
        if not isinstance(other, ArgbImage):
            return NotImplemented
        return np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash((self.array.shape, self.array.tobytes()))

    def __repr__(self):
        return f"ArgbImage({self.width}x{self.height})"


def _sniff(path: Path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read(8)
    except FileNotFoundError:
        raise ImageNotFoundError(f"no such file: {path}") from None
    except IsADirectoryError:
        raise ImageNotFoundError(f"not a file: {path}") from None


def _open_decoded(path: Path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except (OSError, SyntaxError, ValueError, EOFError, Image.DecompressionBombError) as exc:
        raise CorruptImageError(f"cannot decode {path}: {exc}") from None
    return img


def load_argb(path) -> ArgbImage:
    """Read a PNG host image. RGB and palette files get an opaque alpha."""
    path = Path(path)
    head = _sniff(path)
    if not head.startswith(PNG_SIGNATURE):
        raise UnsupportedFormatError(f"{path}: host images must be PNG")
    img = _open_decoded(path)
    if img.mode == "P":
        img = img.convert("RGBA")
    if img.mode == "RGB":
        rgb = np.asarray(img, dtype=np.uint8)
        alpha = np.full(rgb.shape[:2] + (1,), 255, dtype=np.uint8)
        return ArgbImage(np.concatenate([alpha, rgb], axis=2))
    if img.mode == "RGBA":
        rgba = np.asarray(img, dtype=np.uint8)
        return ArgbImage(rgba[:, :, [3, 0, 1, 2]])
    raise UnsupportedFormatError(
        f"{path}: PNG mode {img.mode!r} is not 8-bit RGB/RGBA"
    )


def _check_writable(path: Path):
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise ImageWriteError(f"directory does not exist: {parent}")


def save_argb(image: ArgbImage, path) -> None:
    """Write ``image`` as an 8-bit RGBA PNG (always keeps alpha)."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise UnsupportedFormatError(f"{path}: host images are written as .png only")
    _check_writable(path)
    rgba = image.array[:, :, [1, 2, 3, 0]]
    try:
        Image.fromarray(np.ascontiguousarray(rgba)).save(path, format="PNG")
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from None


def load_gray(path) -> GrayImage:
    """Read an 8-bit grayscale watermark from binary PGM (P5) or PNG."""
    path = Path(path)
    head = _sniff(path)
    if head.startswith(PNG_SIGNATURE):
        kind = "PNG"
    elif head.startswith(PGM_SIGNATURE):
        kind = "PGM"
    else:
        raise UnsupportedFormatError(f"{path}: watermarks must be PGM (P5) or PNG")
    img = _open_decoded(path)
    if img.mode != "L":
        # PGM with maxval > 255 decodes to I/I;16, PNG may be RGB etc.
        raise UnsupportedFormatError(f"{path}: {kind} is not 8-bit grayscale (mode {img.mode!r})")
    return GrayImage(np.asarray(img, dtype=np.uint8))


def save_gray(image: GrayImage, path) -> None:
    """Write ``image`` as binary PGM (``.pgm``) or grayscale PNG (``.png``)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".pgm", ".png"):
        raise UnsupportedFormatError(f"{path}: watermarks are written as .pgm or .png")
    _check_writable(path)
    try:
        if suffix == ".pgm":
            header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
            with open(path, "wb") as fh:
                fh.write(header)
                fh.write(image.tobytes())
        else:
            Image.fromarray(np.ascontiguousarray(image.array)).save(path, format="PNG")
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from None
