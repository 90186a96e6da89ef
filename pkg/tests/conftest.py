import sys
from pathlib import Path

import numpy as np
import pytest

from lsbmark import ArgbImage, GrayImage, load_argb, load_gray

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
NATURAL_WATERMARKS = ["camera", "coins", "moon", "page", "text"]

sys.path.insert(0, str(TESTS))  # for `import oracles`


def random_argb(rng, width, height):
    return ArgbImage(rng.integers(0, 256, (height, width, 4), dtype=np.uint8))


def random_gray(rng, width, height):
    return GrayImage(rng.integers(0, 256, (height, width), dtype=np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def natural_watermarks():
    return {name: load_gray(FIXTURES / f"wm_{name}.pgm") for name in NATURAL_WATERMARKS}


@pytest.fixture(scope="session")
def natural_host():
    return load_argb(FIXTURES / "host_astronaut.png")
