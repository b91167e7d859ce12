"""Shared numeric helpers: truncated logarithm, Hamming kernels, seeded RNG."""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "tlog",
    "make_rng",
    "hamming_matrix",
    "hamming_to_all",
    "frozen_array",
    "env_budget",
]


def tlog(x: float) -> float:
    """Truncated natural logarithm ln(max(x, e)); always >= 1."""
    return math.log(max(x, math.e))


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for (seed, key...); independent across keys."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def frozen_array(values, dtype=None) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _as_sign_f32(patterns: np.ndarray) -> np.ndarray:
    a = np.asarray(patterns)
    if a.dtype != np.float32:
        a = a.astype(np.float32)
    return a


def hamming_matrix(patterns: np.ndarray, weights=None) -> np.ndarray:
    """Pairwise (weighted) Hamming distances between +-1 rows.

    Computed with one BLAS product on +-1 float32 entries; all intermediate
    values are integers below 2**24, so the result is exact for total weight
    up to 2**24.
    """
    a = _as_sign_f32(patterns)
    if weights is None:
        total = a.shape[1]
        gram = a @ a.T
    else:
        w = np.asarray(weights, dtype=np.float32)
        total = float(w.sum())
        gram = (a * w) @ a.T
    if total >= 2**24:  # exactness guard for float32 integer arithmetic
        a64 = a.astype(np.float64)
        gram = (a64 * weights) @ a64.T if weights is not None else a64 @ a64.T
    return np.rint((total - gram) / 2.0).astype(np.int32)


def hamming_to_all(pattern: np.ndarray, patterns: np.ndarray, weights=None) -> np.ndarray:
    """(Weighted) Hamming distance from one +-1 row to each row of `patterns`."""
    a = _as_sign_f32(patterns)
    v = _as_sign_f32(pattern)
    if weights is None:
        total = a.shape[1]
        dots = a @ v
    else:
        w = np.asarray(weights, dtype=np.float32)
        total = float(w.sum())
        dots = a @ (v * w)
    return np.rint((total - dots) / 2.0).astype(np.int64)


def env_budget(name: str, default: int) -> int:
    """Integer budget knob overridable via the LOCENT_<NAME> environment variable."""
    raw = os.environ.get(f"LOCENT_{name}")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"LOCENT_{name} must be an integer, got {raw!r}") from exc
