"""Regenerate tests/fixtures from scikit-image's bundled sample photos.

Run from the repo root:  python tools/make_fixtures.py

Needs scikit-image (not a package dependency). The watermarks and hosts are
natural photographs downsampled with Pillow; the interop files are written
by lsbmark itself and double-checked in tests against an independent
per-pixel encoder.
"""

from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

from lsbmark import ArgbImage, GrayImage, Method, embed, save_argb, save_gray

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

WATERMARKS = ["camera", "coins", "moon", "page", "text"]
HOSTS = ["astronaut", "coffee"]
INTEROP_KEY = "interop-key"


def square(arr: np.ndarray, side: int) -> Image.Image:
    h, w = arr.shape[:2]
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    img = Image.fromarray(np.ascontiguousarray(arr[top:top + s, left:left + s]))
    return img.resize((side, side), Image.LANCZOS)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name in WATERMARKS:
        img = square(getattr(data, name)(), 64)
        save_gray(GrayImage(np.asarray(img.convert("L"))), OUT / f"wm_{name}.pgm")
    for name in HOSTS:
        rgb = np.asarray(square(getattr(data, name)(), 128).convert("RGB"))
        alpha = np.full(rgb.shape[:2] + (1,), 255, np.uint8)
        save_argb(ArgbImage(np.concatenate([alpha, rgb], axis=2)), OUT / f"host_{name}.png")

    # small interop case: 32x32 host with random alpha, 16x16 watermark
    rng = np.random.default_rng(20240917)
    host = ArgbImage(rng.integers(0, 256, (32, 32, 4), dtype=np.uint8))
    wm = GrayImage(np.asarray(square(data.camera(), 16)))
    save_argb(host, OUT / "interop_host.png")
    save_gray(wm, OUT / "interop_wm.pgm")
    save_argb(embed(host, wm, INTEROP_KEY, Method.MODIFIED), OUT / "interop_modified.png")
    save_argb(embed(host, wm, INTEROP_KEY, Method.CLASSIC), OUT / "interop_classic.png")


if __name__ == "__main__":
    main()
