import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_matte(rng, shape):
    """Random alpha with a mix of flat and fractional regions."""
    base = rng.random(shape)
    hard = rng.random(shape) < 0.3
    base[hard] = np.round(base[hard])
    return base
