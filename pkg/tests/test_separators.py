"""The planar hull route must agree with the exact-rational LP on every labeling."""

from itertools import product

import numpy as np
import pytest

from locent.separators import _feasible, _to_fractions, is_affinely_separable


def lp_separable(coords, labels):
    return _feasible(_to_fractions(coords), list(labels)) is not None


@pytest.mark.parametrize("seed", range(12))
def test_hull_matches_lp_random(seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(-5, 6, size=(5, 2)).astype(float)
    for lab in product((1, -1), repeat=5):
        assert is_affinely_separable(pts, lab) == lp_separable(pts, lab)


def test_collinear_points():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert is_affinely_separable(pts, [1, 1, -1])
    assert not is_affinely_separable(pts, [1, -1, 1])  # middle point blocks


def test_coincident_points_conflict():
    pts = np.array([[1.0, 1.0], [1.0, 1.0]])
    assert not is_affinely_separable(pts, [1, -1])
    assert is_affinely_separable(pts, [1, 1])


def test_constant_labelings_always_feasible():
    pts = np.random.default_rng(1).normal(size=(6, 2))
    assert is_affinely_separable(pts, [1] * 6)
    assert is_affinely_separable(pts, [-1] * 6)


def test_three_dim_uses_lp():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    # 4 affinely independent points: every labeling separable
    for lab in product((1, -1), repeat=4):
        assert is_affinely_separable(pts, lab)
