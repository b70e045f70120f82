"""Alternating multiplicative-update solver for approximate PSD
factorizations X_ij ~ tr(A_i B_j) of a nonnegative matrix X.

Each sweep updates the row family A (one least-squares subproblem per row
of X, with the column family frozen) and then the column family B. A
subproblem update replaces the trailing factor by W (adjoint x) W where W
is the geometric mean of the inverted normal-equation operator and the
current iterate; the data-fit objective never increases under it. A small
multiple of the identity is added to every updated factor to keep iterates
positive definite.

The spelled-out gradient form of the same update,
B - W (ata(B) - adjoint(x)) W, is intentionally not used here; tests
rebuild it independently and check the two agree.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimMismatch, NotPd, Singular, ZeroData
from .measurement import MeasurementMap
from .rng import SplitMix64, random_pd, substream_seed
from .symmat import as_symmetric, default_psd_tol, eig_sym

FREEZE_FLOOR = 1e-12


@dataclass
class SolverConfig:
    """Settings for a factorization run.

    Arguments
    ---------
    r : int
        Side length of the factor matrices.
    max_sweeps : int
        Full A-then-B sweeps per restart.
    damping : float
        Multiple of the identity added to every updated factor.
    restarts : int
        Independent random initializations; the best final objective wins.
    seed : int
        Base seed; restart k draws from a derived substream.
    rel_tol : float
        Stop a restart early when the objective improves by less than
        rel_tol * (1 + previous objective) over a full sweep. 0 disables.
    blocks : tuple[int, ...] | None
        Common block-diagonal structure imposed on every factor. None for
        dense factors; (1,) * r for diagonal ones.
    """

    r: int
    max_sweeps: int = 500
    damping: float = 1e-8
    restarts: int = 1
    seed: int = 0
    rel_tol: float = 0.0
    blocks: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.damping < 0 or not np.isfinite(self.damping):
            raise ValueError("damping must be finite and nonnegative")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.blocks is not None:
            b = tuple(int(s) for s in self.blocks)
            if not b or any(s < 1 for s in b):
                raise ValueError("block sizes must be positive")
            if sum(b) != self.r:
                raise ValueError(f"block sizes {b} do not sum to r={self.r}")
            self.blocks = b


@dataclass
class FactorPair:
    """Stacked factor families A (m, r, r) and B (n, r, r)."""

    A: np.ndarray
    B: np.ndarray
    blocks: tuple[int, ...] | None = None

    @property
    def r(self) -> int:
        return self.A.shape[1]

    def copy(self) -> "FactorPair":
        return FactorPair(self.A.copy(), self.B.copy(), self.blocks)


@dataclass
class RunHistory:
    """Per-sweep diagnostics of one restart.

    objective/err/kkt_a/kkt_b are aligned with `sweep` and describe the
    damped iterates at the end of each full sweep. mono_before/mono_after
    hold the objective immediately before and after each family update,
    measured before damping is added; matrix runs record two entries per
    sweep (A half, B half), tensor runs three (modes 1, 2, 3).
    """

    sweep: np.ndarray
    objective: np.ndarray
    err: np.ndarray
    kkt_a: np.ndarray
    kkt_b: np.ndarray
    mono_before: np.ndarray
    mono_after: np.ndarray
    seconds: float
    restart: int
    frozen_rows: tuple[int, ...] = ()
    frozen_cols: tuple[int, ...] = ()

    @property
    def n_sweeps(self) -> int:
        return int(self.sweep.shape[0])

    @property
    def final_objective(self) -> float:
        return float(self.objective[-1])


def _check_data(x) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D data matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("data matrix has non-finite entries")
    if np.min(a, initial=0.0) < 0.0:
        raise ValueError("data matrix has negative entries")
    return a


def _partition(r: int, blocks: tuple[int, ...] | None):
    sizes = np.array(blocks if blocks is not None else (r,), dtype=np.int64)
    starts = np.zeros_like(sizes)
    starts[1:] = np.cumsum(sizes)[:-1]
    return starts, sizes


def _random_block_stack(rng: SplitMix64, count, r, starts, sizes) -> np.ndarray:
    out = np.zeros((count, r, r))
    for i in range(count):
        for lo, w in zip(starts, sizes):
            out[i, lo : lo + w, lo : lo + w] = random_pd(rng, int(w))
    return out


def init_factors(x, cfg: SolverConfig, restart: int = 0) -> FactorPair:
    """Random positive definite starting factors matched to the data scale.

    Each factor (each diagonal block when cfg.blocks is set) is G G^T +
    0.1 I with standard-normal G, drawn A_1..A_m then B_1..B_n from the
    restart's substream. Both families are then rescaled by a common factor
    so the mean of tr(A_i B_j) equals the mean of x.
    """
    a = _check_data(x)
    if not np.any(a):
        raise ZeroData("data matrix is identically zero")
    m, n = a.shape
    starts, sizes = _partition(cfg.r, cfg.blocks)
    rng = SplitMix64(substream_seed(cfg.seed, restart))
    fa = _random_block_stack(rng, m, cfg.r, starts, sizes)
    fb = _random_block_stack(rng, n, cfg.r, starts, sizes)
    mean_fit = float(np.mean(_kernels.gram_rows(fa, fb)))
    scale = np.sqrt(float(np.mean(a)) / mean_fit)
    fa *= scale
    fb *= scale
    return FactorPair(fa, fb, cfg.blocks)


def objective(x, fp: FactorPair) -> float:
    """Squared data-fit error sum_ij (x_ij - tr(A_i B_j))^2."""
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.shape != (fp.A.shape[0], fp.B.shape[0]):
        raise DimMismatch(
            f"data shape {a.shape} vs factor counts "
            f"({fp.A.shape[0]}, {fp.B.shape[0]})"
        )
    return float(_kernels.sq_diff(a, _kernels.gram_rows(fp.A, fp.B)))


def normalized_error(x, fp: FactorPair) -> float:
    """Objective divided by sum_ij x_ij^2."""
    a = np.ascontiguousarray(x, dtype=np.float64)
    ssx = float(np.sum(a * a))
    if ssx == 0.0:
        raise ZeroData("cannot normalize by an identically zero data matrix")
    return objective(a, fp) / ssx


def kkt_residual(x, fp: FactorPair) -> tuple[float, float]:
    """Stationarity residuals (row family, column family).

    The row-family residual is the largest, over rows i, Frobenius norm of
    adjoint_B(X_i:) - ata_B(A_i); the column-family residual mirrors it
    with the roles swapped. Both are normalized by 1 + ||x||_F. Zero at
    interior stationary points of the alternating scheme.
    """
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.shape != (fp.A.shape[0], fp.B.shape[0]):
        raise DimMismatch("data and factor shapes are inconsistent")
    at = np.ascontiguousarray(a.T)
    scale = 1.0 + float(_kernels.fro(a))
    res_a = float(_kernels.kkt_from_rows(a, fp.B, fp.A)) / scale
    res_b = float(_kernels.kkt_from_rows(at, fp.A, fp.B)) / scale
    return res_a, res_b


def subproblem_update(m: MeasurementMap, x, b_old) -> np.ndarray:
    """One multiplicative update of a single least-squares subproblem.

    Minimizes a majorizer of ||x - apply(B)||^2 at b_old: returns
    W (adjoint x) W with W = mmu_scaler(m, b_old). The objective at the
    result never exceeds the objective at b_old.
    """
    xx = np.ascontiguousarray(x, dtype=np.float64)
    if xx.ndim != 1 or xx.shape[0] != len(m):
        raise DimMismatch(f"data length {xx.shape} vs map size {len(m)}")
    if not np.all(np.isfinite(xx)):
        raise ValueError("data vector has non-finite entries")
    if np.min(xx, initial=0.0) < 0.0:
        raise ValueError("data vector has negative entries")
    bb = as_symmetric(b_old)
    if bb.shape[0] != m.dim:
        raise DimMismatch(f"map dimension {m.dim} vs factor dimension {bb.shape[0]}")
    w = eig_sym(bb).eigenvalues
    if w[0] <= default_psd_tol(w):
        raise NotPd("b_old is not positive definite")
    try:
        return _kernels.sub_update(m.mats, xx, bb)
    except ValueError as e:
        raise Singular(f"normal-equation operator is singular: {e}") from e


def _half_sweep(xrows, mats, targ, blocks, eps):
    starts, sizes = _partition(targ.shape[1], blocks)
    try:
        return _kernels.half_sweep_rows(
            xrows, mats, targ, starts, sizes, float(eps), FREEZE_FLOOR
        )
    except ValueError as e:
        raise Singular(f"subproblem scaler failed: {e}") from e


def half_sweep_a(x, fp: FactorPair, eps: float) -> FactorPair:
    """Update every row factor A_i against frozen B; returns a new pair."""
    a = _check_data(x)
    out = fp.copy()
    _half_sweep(a, out.B, out.A, fp.blocks, eps)
    return out


def half_sweep_b(x, fp: FactorPair, eps: float) -> FactorPair:
    """Update every column factor B_j against frozen A; returns a new pair."""
    a = _check_data(x)
    out = fp.copy()
    _half_sweep(np.ascontiguousarray(a.T), out.A, out.B, fp.blocks, eps)
    return out


def _run_one(x, xt, cfg: SolverConfig, restart: int):
    t0 = time.perf_counter()
    fp = init_factors(x, cfg, restart)
    starts, sizes = _partition(cfg.r, cfg.blocks)
    eps = float(cfg.damping)
    ssx = float(np.sum(x * x))
    scale = 1.0 + float(_kernels.fro(x))

    max_s = cfg.max_sweeps
    obj = np.empty(max_s)
    err = np.empty(max_s)
    kkt_a = np.empty(max_s)
    kkt_b = np.empty(max_s)
    mono_before = np.empty(2 * max_s)
    mono_after = np.empty(2 * max_s)

    prev = float(_kernels.sq_diff(x, _kernels.gram_rows(fp.A, fp.B)))
    done = 0
    for s in range(max_s):
        try:
            fb, fa = _kernels.half_sweep_rows(
                x, fp.B, fp.A, starts, sizes, eps, FREEZE_FLOOR
            )
            mono_before[2 * s] = fb
            mono_after[2 * s] = fa
            fb, fa = _kernels.half_sweep_rows(
                xt, fp.A, fp.B, starts, sizes, eps, FREEZE_FLOOR
            )
            mono_before[2 * s + 1] = fb
            mono_after[2 * s + 1] = fa
        except ValueError as e:
            raise Singular(f"sweep {s + 1} of restart {restart}: {e}") from e

        f_now = float(_kernels.sq_diff(x, _kernels.gram_rows(fp.A, fp.B)))
        obj[s] = f_now
        err[s] = f_now / ssx
        kkt_a[s] = float(_kernels.kkt_from_rows(x, fp.B, fp.A)) / scale
        kkt_b[s] = float(_kernels.kkt_from_rows(xt, fp.A, fp.B)) / scale
        done = s + 1
        if cfg.rel_tol > 0.0 and prev - f_now <= cfg.rel_tol * (1.0 + prev):
            break
        prev = f_now

    if eps == 0.0:
        frozen_rows = tuple(int(i) for i in np.flatnonzero(~x.any(axis=1)))
        frozen_cols = tuple(int(j) for j in np.flatnonzero(~x.any(axis=0)))
    else:
        frozen_rows = ()
        frozen_cols = ()
    hist = RunHistory(
        sweep=np.arange(1, done + 1, dtype=np.int64),
        objective=obj[:done].copy(),
        err=err[:done].copy(),
        kkt_a=kkt_a[:done].copy(),
        kkt_b=kkt_b[:done].copy(),
        mono_before=mono_before[: 2 * done].copy(),
        mono_after=mono_after[: 2 * done].copy(),
        seconds=time.perf_counter() - t0,
        restart=restart,
        frozen_rows=frozen_rows,
        frozen_cols=frozen_cols,
    )
    return fp, hist


def factorize(x, cfg: SolverConfig) -> tuple[FactorPair, RunHistory]:
    """Approximate PSD factorization of a nonnegative matrix.

    Runs cfg.restarts independent initializations for cfg.max_sweeps
    alternating sweeps each and keeps the run with the smallest final
    objective (ties go to the lowest restart index).

    Returns
    -------
    (FactorPair, RunHistory)
        Best factors and the diagnostics of the restart that produced them.

    Raises
    ------
    ZeroData
        If x is identically zero.
    Singular
        If a subproblem's normal-equation operator degenerates, which can
        happen only with damping 0.
    """
    a = _check_data(x)
    if not np.any(a):
        raise ZeroData("data matrix is identically zero")
    at = np.ascontiguousarray(a.T)
    best: tuple[FactorPair, RunHistory] | None = None
    for k in range(cfg.restarts):
        fp, hist = _run_one(a, at, cfg, k)
        if best is None or hist.final_objective < best[1].final_objective:
            best = (fp, hist)
    assert best is not None
    return best
