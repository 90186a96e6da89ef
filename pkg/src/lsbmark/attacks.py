"""Deterministic degradations applied to watermarked images.

All attacks keep the image geometry: cropping is modelled as destroying the
pixels outside a kept rectangle (or inside a cut-out), because the keyed plan
is defined over the original pixel grid.

Attack strings used by the CLI::

    zero-lsb:k=1
    crop:x=0,y=0,w=64,h=64,fill=0        keep the rectangle, fill the rest
    cut:x=16,y=16,w=32,h=32,fill=0       fill the rectangle, keep the rest
    noise:amp=4,seed=7
    none

``fill`` is a single 0-255 value for all channels or ``0xAARRGGBB``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .images import ArgbImage
from .keystream import keyed_stream


class AttackError(ValueError):
    pass


class AttackParseError(AttackError):
    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token


class RectangleOutOfBoundsError(AttackError):
    pass


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def check_inside(self, image: ArgbImage):
        if min(self.x, self.y, self.w, self.h) < 0 or (
            self.x + self.w > image.width or self.y + self.h > image.height
        ):
            raise RectangleOutOfBoundsError(
                f"rectangle x={self.x},y={self.y},w={self.w},h={self.h} "
                f"is outside the {image.width}x{image.height} image"
            )

    @property
    def area(self) -> int:
        return self.w * self.h


def _fill_tuple(fill) -> tuple[int, int, int, int]:
    if isinstance(fill, int):
        fill = (fill,) * 4
    fill = tuple(int(v) for v in fill)
    if len(fill) != 4 or any(not 0 <= v <= 255 for v in fill):
        raise AttackError(f"fill must be four 0-255 channel values, got {fill}")
    return fill


def zero_lsb(image: ArgbImage, k: int) -> ArgbImage:
    """Clear the ``k`` lowest bits of every channel."""
    if not 0 <= k <= 8:
        raise AttackError(f"k must be in 0..8, got {k}")
    mask = (0xFF << k) & 0xFF
    return ArgbImage(image.array & np.uint8(mask))


def crop(image: ArgbImage, keep: Rect, fill=0) -> ArgbImage:
    """Keep ``keep`` untouched and overwrite everything outside it with ``fill``."""
    keep.check_inside(image)
    out = np.empty_like(image.array)
    out[...] = _fill_tuple(fill)
    sl = np.s_[keep.y:keep.y + keep.h, keep.x:keep.x + keep.w]
    out[sl] = image.array[sl]
    return ArgbImage(out)


def cut(image: ArgbImage, region: Rect, fill=0) -> ArgbImage:
    """Overwrite ``region`` with ``fill``; the complement of :func:`crop`."""
    region.check_inside(image)
    out = image.array.copy()
    out[region.y:region.y + region.h, region.x:region.x + region.w] = _fill_tuple(fill)
    return ArgbImage(out)


def center_region(image: ArgbImage, fraction: float) -> Rect:
    """Centered rectangle covering ``fraction`` of the image area.

    Sides are scaled by ``sqrt(fraction)`` and rounded, so the area is exact
    only when the scaled sides are whole numbers (e.g. 0.25 on even sides).
    """
    scale = fraction ** 0.5
    w = int(round(image.width * scale))
    h = int(round(image.height * scale))
    return Rect((image.width - w) // 2, (image.height - h) // 2, w, h)


def add_noise(image: ArgbImage, amplitude: int, seed: int) -> ArgbImage:
    """Add uniform integer noise in ``[-amplitude, amplitude]`` to every channel.

    The keystream seeded with ``seed`` is consumed in row-major pixel order,
    channels a, r, g, b; each draw maps to ``value % (2*amp + 1) - amp``.
    Results are clamped to 0..255.
    """
    if not 0 <= amplitude <= 255:
        raise AttackError(f"amplitude must be in 0..255, got {amplitude}")
    if amplitude == 0:
        return image
    draws = keyed_stream(seed, image.array.size)
    delta = (draws % np.uint64(2 * amplitude + 1)).astype(np.int16) - amplitude
    noisy = image.array.astype(np.int16) + delta.reshape(image.array.shape)
    return ArgbImage(np.clip(noisy, 0, 255).astype(np.uint8))


class AttackKind(str, enum.Enum):
    NONE = "none"
    ZERO_LSB = "zero-lsb"
    CROP = "crop"
    CUT = "cut"
    NOISE = "noise"


_PARAMS = {
    AttackKind.NONE: (),
    AttackKind.ZERO_LSB: ("k",),
    AttackKind.CROP: ("x", "y", "w", "h", "fill"),
    AttackKind.CUT: ("x", "y", "w", "h", "fill"),
    AttackKind.NOISE: ("amp", "seed"),
}
_OPTIONAL = {"fill": 0}


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind is AttackKind.ZERO_LSB and not 0 <= p["k"] <= 8:
            raise AttackError(f"zero-lsb k must be in 0..8, got {p['k']}")
        if self.kind is AttackKind.NOISE and not 0 <= p["amp"] <= 255:
            raise AttackError(f"noise amp must be in 0..255, got {p['amp']}")
        if self.kind in (AttackKind.CROP, AttackKind.CUT):
            _fill_tuple(p["fill"])

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        return parse_attack(text)

    def apply(self, image: ArgbImage) -> ArgbImage:
        p = self.params
        if self.kind is AttackKind.NONE:
            return image
        if self.kind is AttackKind.ZERO_LSB:
            return zero_lsb(image, p["k"])
        if self.kind is AttackKind.NOISE:
            return add_noise(image, p["amp"], p["seed"])
        rect = Rect(p["x"], p["y"], p["w"], p["h"])
        if self.kind is AttackKind.CROP:
            return crop(image, rect, p["fill"])
        return cut(image, rect, p["fill"])

    def __str__(self):
        if not self.params:
            return self.kind.value
        parts = []
        for name in _PARAMS[self.kind]:
            value = self.params[name]
            if name == "fill" and not isinstance(value, int):
                a, r, g, b = value
                value = f"0x{a:02X}{r:02X}{g:02X}{b:02X}"
            parts.append(f"{name}={value}")
        return f"{self.kind.value}:{','.join(parts)}"


def _parse_fill(token: str, text: str):
    try:
        if token.lower().startswith("0x"):
            if len(token) != 10:
                raise ValueError
            v = int(token, 16)
            return ((v >> 24) & 0xFF, (v >> 16) & 0xFF, (v >> 8) & 0xFF, v & 0xFF)
        v = int(token, 10)
    except ValueError:
        raise AttackParseError(f"bad fill value {token!r} in {text!r}", token) from None
    if not 0 <= v <= 255:
        raise AttackParseError(f"fill {v} out of range 0..255 in {text!r}", token)
    return v


def parse_attack(text: str) -> AttackSpec:
    """Parse ``kind:name=value,...`` into an :class:`AttackSpec`."""
    raw = text.strip()
    name, _, rest = raw.partition(":")
    try:
        kind = AttackKind(name.strip().lower())
    except ValueError:
        raise AttackParseError(f"unknown attack {name!r} in {text!r}", name) from None
    allowed = _PARAMS[kind]
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in allowed:
            raise AttackParseError(f"unexpected token {item!r} in {text!r}", item)
        if key in params:
            raise AttackParseError(f"duplicate parameter {key!r} in {text!r}", item)
        value = value.strip()
        if key == "fill":
            params[key] = _parse_fill(value, text)
            continue
        try:
            params[key] = int(value, 10)
        except ValueError:
            raise AttackParseError(f"bad integer {value!r} in {text!r}", item) from None
    for key in allowed:
        if key not in params:
            if key in _OPTIONAL:
                params[key] = _OPTIONAL[key]
            else:
                raise AttackParseError(f"missing parameter {key!r} in {text!r}", key)
    return AttackSpec(kind, params)
