"""Deterministic random numbers for instance generation and initialization.

All randomness in the library flows through :class:`SplitMix64`, a 64-bit
mixing generator with a one-word state, so that every run is reproducible
from a single integer seed across platforms. Standard normals come from
Box-Muller applied to the uniform stream; the uniform for the log factor is
taken in (0, 1] so the logarithm is always finite.

Independent substreams (one per restart) are seeded with consecutive raw
outputs of a generator seeded by the run seed: substream k uses the
(k+1)-th output of ``SplitMix64(seed)``.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


class SplitMix64:
    """SplitMix64 generator with Box-Muller normal deviates.

    Arguments
    ---------
    seed : int
        Any Python integer; reduced mod 2**64.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK
        self._spare = None

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1), 53 random bits."""
        return (self.next_u64() >> 11) / _TWO53

    def uniform_pos(self) -> float:
        """Uniform double in (0, 1]; safe under log()."""
        return ((self.next_u64() >> 11) + 1) / _TWO53

    def normal(self) -> float:
        """Standard normal deviate (Box-Muller, second deviate cached)."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = self.uniform_pos()
        u2 = self.uniform()
        rad = math.sqrt(-2.0 * math.log(u1))
        ang = 2.0 * math.pi * u2
        self._spare = rad * math.sin(ang)
        return rad * math.cos(ang)

    def normal_array(self, *shape: int) -> np.ndarray:
        out = np.empty(int(np.prod(shape)) if shape else 1)
        for i in range(out.size):
            out[i] = self.normal()
        return out.reshape(shape)

    def uniform_array(self, *shape: int) -> np.ndarray:
        out = np.empty(int(np.prod(shape)) if shape else 1)
        for i in range(out.size):
            out[i] = self.uniform()
        return out.reshape(shape)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] via rejection-free modular draw.

        The range is tiny compared to 2**64 in every use here, so modulo
        bias is far below anything observable.
        """
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)


def substream_seed(seed: int, index: int) -> int:
    """Seed for independent substream `index` of a run seeded with `seed`."""
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    g = SplitMix64(seed)
    out = 0
    for _ in range(index + 1):
        out = g.next_u64()
    return out


def random_pd(rng: SplitMix64, dim: int) -> np.ndarray:
    """Random positive definite matrix G G^T + 0.1 I with standard-normal G."""
    g = rng.normal_array(dim, dim)
    m = g @ g.T
    m += 0.1 * np.eye(dim)
    return 0.5 * (m + m.T)


def random_sym(rng: SplitMix64, dim: int) -> np.ndarray:
    """Random symmetric matrix (G + G^T) / 2 with standard-normal G."""
    g = rng.normal_array(dim, dim)
    return 0.5 * (g + g.T)
