"""Block-diagonal and diagonal specializations.

When every factor is block diagonal with a common partition, the update
arithmetic in the solver kernel touches only the blocks, so the structure
is preserved exactly (off-block entries stay bitwise zero). With all
blocks of size 1 the factors are diagonal matrices and the scheme reduces
entrywise to the classical multiplicative nonnegative matrix factorization
updates; both forms live here so tests can compare them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, DivisionByZero
from .solver import FactorPair, RunHistory, SolverConfig, factorize


@dataclass(frozen=True)
class BlockStructure:
    """Common block partition sizes (s_1, ..., s_k) of the factor side."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(v) for v in self.sizes)
        if not s or any(v < 1 for v in s):
            raise ValueError("block sizes must be positive integers")
        object.__setattr__(self, "sizes", s)

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    @property
    def starts(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.sizes:
            out.append(acc)
            acc += s
        return tuple(out)

    @classmethod
    def diagonal(cls, r: int) -> "BlockStructure":
        return cls((1,) * r)

    def mask(self) -> np.ndarray:
        """Boolean matrix, True inside the blocks."""
        m = np.zeros((self.dim, self.dim), dtype=bool)
        for lo, w in zip(self.starts, self.sizes):
            m[lo : lo + w, lo : lo + w] = True
        return m


def conforms(mat, structure: BlockStructure) -> bool:
    """True when every entry outside the blocks is exactly zero."""
    a = np.asarray(mat, dtype=np.float64)
    if a.shape != (structure.dim, structure.dim):
        raise DimMismatch(f"matrix shape {a.shape} vs structure dim {structure.dim}")
    return not np.any(a[~structure.mask()])


def pair_conforms(fp: FactorPair, structure: BlockStructure) -> bool:
    """True when every factor of both families conforms."""
    return all(conforms(m, structure) for m in fp.A) and all(
        conforms(m, structure) for m in fp.B
    )


def blockwise_factorize(
    x, cfg: SolverConfig
) -> tuple[FactorPair, RunHistory]:
    """Factorize with block-diagonal factors; cfg.blocks must be set.

    Identical to factorize, which already routes all arithmetic through
    the block partition; this entry point only insists the structure is
    explicit. A single block of size r reproduces the unstructured run
    bit for bit.
    """
    if cfg.blocks is None:
        raise ValueError("blockwise_factorize requires cfg.blocks")
    return factorize(x, cfg)


@dataclass
class NmfFactors:
    """Classical NMF factors, a (m, r) and b (r, n), entries positive."""

    a: np.ndarray
    b: np.ndarray

    def product(self) -> np.ndarray:
        return self.a @ self.b


def _check_nmf(x, f: NmfFactors):
    xx = np.ascontiguousarray(x, dtype=np.float64)
    a = np.ascontiguousarray(f.a, dtype=np.float64)
    b = np.ascontiguousarray(f.b, dtype=np.float64)
    if xx.ndim != 2 or a.ndim != 2 or b.ndim != 2:
        raise ValueError("expected 2-D arrays")
    if a.shape[1] != b.shape[0] or xx.shape != (a.shape[0], b.shape[1]):
        raise DimMismatch(
            f"shapes do not compose: x {xx.shape}, a {a.shape}, b {b.shape}"
        )
    return xx, a, b


def lee_seung_step(x, factors: NmfFactors) -> NmfFactors:
    """One round of the classical multiplicative NMF updates.

    Updates a with b frozen, then b with the new a:
    a <- a * (x b^T) / (a b b^T), b <- b * (a^T x) / (a^T a b).

    Raises
    ------
    DivisionByZero
        If any denominator entry is zero or negative.
    """
    xx, a, b = _check_nmf(x, factors)
    den_a = a @ (b @ b.T)
    if np.min(den_a) <= 0.0:
        raise DivisionByZero("row-factor denominator has a nonpositive entry")
    a = a * (xx @ b.T) / den_a
    den_b = (a.T @ a) @ b
    if np.min(den_b) <= 0.0:
        raise DivisionByZero("column-factor denominator has a nonpositive entry")
    b = b * (a.T @ xx) / den_b
    return NmfFactors(a, b)


def diagonal_mmu_update(avecs, bvec, x) -> np.ndarray:
    """Multiplicative update of one diagonal factor, as a diagonal matrix.

    avecs holds the diagonals of the frozen family as rows (m, r), bvec
    the current factor's diagonal (r,), x the data column (m,). Entry k of
    the result is bvec_k * (sum_i x_i avecs_ik) / (sum_i <avecs_i, bvec>
    avecs_ik), the scalar form of W (adjoint x) W.
    """
    av = np.ascontiguousarray(avecs, dtype=np.float64)
    bv = np.ascontiguousarray(bvec, dtype=np.float64)
    xv = np.ascontiguousarray(x, dtype=np.float64)
    if av.ndim != 2 or bv.ndim != 1 or xv.ndim != 1:
        raise ValueError("expected avecs (m, r), bvec (r,), x (m,)")
    if av.shape != (xv.shape[0], bv.shape[0]):
        raise DimMismatch(
            f"shapes do not compose: avecs {av.shape}, bvec {bv.shape}, x {xv.shape}"
        )
    den = av.T @ (av @ bv)
    if np.min(den) <= 0.0:
        raise DivisionByZero("update denominator has a nonpositive entry")
    return np.diag(bv * (av.T @ xv) / den)
