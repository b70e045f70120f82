"""Seeded problem-instance generators."""

import numpy as np

from . import _kernels
from .rng import SplitMix64, random_pd, substream_seed
from .solver import FactorPair
from .tensor import TensorFactors, tensor_eval


def distance_matrix(points) -> np.ndarray:
    """Squared-difference matrix M_ij = (v_i - v_j)^2 of scalar points."""
    v = np.ascontiguousarray(points, dtype=np.float64)
    d = v[:, None] - v[None, :]
    return d * d


def distance_exact_factors(points) -> FactorPair:
    """Closed-form rank-2 factors reproducing distance_matrix exactly.

    A_i = (1, v_i)(1, v_i)^T and B_j = (-v_j, 1)(-v_j, 1)^T give
    tr(A_i B_j) = (v_i - v_j)^2.
    """
    v = np.ascontiguousarray(points, dtype=np.float64)
    n = v.shape[0]
    a = np.empty((n, 2, 2))
    b = np.empty((n, 2, 2))
    for i in range(n):
        u = np.array([1.0, v[i]])
        w = np.array([-v[i], 1.0])
        a[i] = np.outer(u, u)
        b[i] = np.outer(w, w)
    return FactorPair(a, b)


def gen_distance(n: int, seed: int = 0) -> np.ndarray:
    """Distance matrix of n standard-normal points drawn from the seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = SplitMix64(seed)
    return distance_matrix(rng.normal_array(n))


def _pd_stack(rng: SplitMix64, count, r, blocks) -> np.ndarray:
    out = np.zeros((count, r, r))
    sizes = blocks if blocks is not None else (r,)
    for i in range(count):
        lo = 0
        for w in sizes:
            out[i, lo : lo + w, lo : lo + w] = random_pd(rng, w)
            lo += w
    return out


def gen_planted(
    m: int, n: int, r: int, seed: int = 0, blocks: tuple[int, ...] | None = None
) -> tuple[np.ndarray, FactorPair]:
    """Nonnegative matrix with a known exact factorization.

    Factors follow the solver's init recipe (G G^T + 0.1 I per factor, or
    per block when blocks is given); X_ij = tr(A_i B_j) exactly as
    computed, so the planted pair attains objective zero.
    """
    if m < 1 or n < 1 or r < 1:
        raise ValueError("m, n, r must be at least 1")
    if blocks is not None and sum(blocks) != r:
        raise ValueError(f"block sizes {blocks} do not sum to r={r}")
    rng = SplitMix64(substream_seed(seed, 0))
    a = _pd_stack(rng, m, r, blocks)
    b = _pd_stack(rng, n, r, blocks)
    fp = FactorPair(a, b, tuple(blocks) if blocks is not None else None)
    x = np.ascontiguousarray(_kernels.gram_rows(a, b))
    return x, fp


def gen_planted_tensor(d: int, r: int, seed: int = 0) -> tuple[np.ndarray, TensorFactors]:
    """Cubic nonnegative tensor with a known exact three-mode factorization."""
    if d < 1 or r < 1:
        raise ValueError("d and r must be at least 1")
    rng = SplitMix64(substream_seed(seed, 0))
    stacks = []
    for _ in range(3):
        s = np.empty((d, r, r))
        for i in range(d):
            s[i] = random_pd(rng, r)
        stacks.append(s)
    tf = TensorFactors(*stacks)
    return tensor_eval(tf), tf
