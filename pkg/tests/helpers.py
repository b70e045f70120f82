"""Shared seeded generators for the test suite."""

import numpy as np

from psdfact.rng import SplitMix64, random_pd, random_sym


def pd_stack(rng: SplitMix64, count: int, dim: int) -> np.ndarray:
    out = np.empty((count, dim, dim))
    for k in range(count):
        out[k] = random_pd(rng, dim)
    return out


def nonneg_matrix(rng: SplitMix64, m: int, n: int) -> np.ndarray:
    out = rng.uniform_array(m, n)
    out += 0.05
    return out


def rel_close(a, b, tol):
    a = np.asarray(a)
    b = np.asarray(b)
    scale = 1.0 + max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return np.max(np.abs(a - b), initial=0.0) <= tol * scale


__all__ = ["SplitMix64", "random_pd", "random_sym", "pd_stack", "nonneg_matrix", "rel_close"]
