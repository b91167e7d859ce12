import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from locent.classes import HypothesisClass, PointDomain


def random_class(rng, max_points=8, max_rows=12) -> HypothesisClass:
    p = int(rng.integers(2, max_points + 1))
    want = int(rng.integers(2, max_rows + 1))
    rows = rng.choice(np.int8([-1, 1]), size=(want, p))
    uniq = {}
    for r in rows:
        uniq.setdefault(r.tobytes(), r)
    return HypothesisClass(PointDomain.of_size(p), np.array(list(uniq.values())))


@pytest.fixture
def rng():
    return np.random.default_rng(20240810)
