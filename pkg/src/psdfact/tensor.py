"""Symmetric PSD factorization of cubic 3-mode tensors.

A d x d x d nonnegative tensor T is fit by three families of r x r PSD
matrices, one matrix per index of each mode, through
T[i1, i2, i3] ~ sum of the entrywise (Schur) product of the three chosen
matrices. Fixing two families turns each slice of the remaining mode into
an ordinary measurement-map subproblem whose map matrices are the d^2
pairwise Schur products, themselves PSD, so the matrix solver's update
applies unchanged. Modes are cycled 1 -> 2 -> 3 within every sweep.

Slice data vectors are laid out with the first participating mode fastest,
matching the Schur stack's enumeration.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import Singular, ZeroData
from .measurement import MeasurementMap
from .rng import SplitMix64, random_pd, substream_seed
from .solver import FREEZE_FLOOR, RunHistory, SolverConfig


@dataclass
class TensorFactors:
    """Per-mode factor stacks c1, c2, c3, each of shape (d, r, r)."""

    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray

    @property
    def d(self) -> int:
        return self.c1.shape[0]

    @property
    def r(self) -> int:
        return self.c1.shape[1]

    def mode(self, k: int) -> np.ndarray:
        return (self.c1, self.c2, self.c3)[k - 1]

    def copy(self) -> "TensorFactors":
        return TensorFactors(self.c1.copy(), self.c2.copy(), self.c3.copy())


def _check_tensor(t) -> np.ndarray:
    a = np.ascontiguousarray(t, dtype=np.float64)
    if a.ndim != 3 or len(set(a.shape)) != 1:
        raise ValueError(f"expected a cubic 3-mode tensor, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("tensor has non-finite entries")
    if np.min(a) < 0.0:
        raise ValueError("tensor has negative entries")
    return a


def tensor_eval(tf: TensorFactors) -> np.ndarray:
    """Evaluate the model tensor sum(c1_i * c2_j * c3_k) entry by entry."""
    return _kernels.tensor_gram(tf.c1, tf.c2, tf.c3)


def schur_map(ca, cb) -> MeasurementMap:
    """Measurement map of all pairwise Schur products of two PSD stacks.

    Entry q * len(ca) + p is ca_p * cb_q (first family fastest). Schur
    products of PSD matrices are PSD, so the map is valid by construction.
    """
    sa = np.ascontiguousarray(ca, dtype=np.float64)
    sb = np.ascontiguousarray(cb, dtype=np.float64)
    return MeasurementMap(_kernels.schur_stack(sa, sb))


def _mode_rows(t: np.ndarray, mode: int) -> np.ndarray:
    # Row i holds slice i of the mode, remaining modes vectorized with the
    # lower-numbered one fastest.
    d = t.shape[0]
    axes = {1: (0, 2, 1), 2: (1, 2, 0), 3: (2, 1, 0)}[mode]
    return np.ascontiguousarray(np.transpose(t, axes).reshape(d, d * d))


def _mode_mats(tf: TensorFactors, mode: int) -> np.ndarray:
    if mode == 1:
        return _kernels.schur_stack(tf.c2, tf.c3)
    if mode == 2:
        return _kernels.schur_stack(tf.c1, tf.c3)
    return _kernels.schur_stack(tf.c1, tf.c2)


def tensor_mode_update(t, tf: TensorFactors, mode: int, eps: float) -> TensorFactors:
    """Update every factor of one mode against the two frozen families.

    Returns a new TensorFactors; the input is not modified. mode is 1, 2,
    or 3.
    """
    a = _check_tensor(t)
    if mode not in (1, 2, 3):
        raise ValueError("mode must be 1, 2, or 3")
    out = tf.copy()
    starts = np.zeros(1, dtype=np.int64)
    sizes = np.array([tf.r], dtype=np.int64)
    try:
        _kernels.half_sweep_rows(
            _mode_rows(a, mode),
            _mode_mats(out, mode),
            out.mode(mode),
            starts,
            sizes,
            float(eps),
            FREEZE_FLOOR,
        )
    except ValueError as e:
        raise Singular(f"mode {mode} update failed: {e}") from e
    return out


def init_tensor_factors(t, cfg: SolverConfig, restart: int = 0) -> TensorFactors:
    """Random PD factors for all three modes, matched to the data scale.

    Same recipe as the matrix case (G G^T + 0.1 I per factor, drawn mode 1
    then 2 then 3); all three families share one scale factor chosen so the
    mean model entry equals the mean of t.
    """
    a = _check_tensor(t)
    if not np.any(a):
        raise ZeroData("tensor is identically zero")
    d = a.shape[0]
    rng = SplitMix64(substream_seed(cfg.seed, restart))
    stacks = []
    for _ in range(3):
        s = np.empty((d, cfg.r, cfg.r))
        for i in range(d):
            s[i] = random_pd(rng, cfg.r)
        stacks.append(s)
    tf = TensorFactors(*stacks)
    mean_fit = float(np.mean(tensor_eval(tf)))
    scale = (float(np.mean(a)) / mean_fit) ** (1.0 / 3.0)
    tf.c1 *= scale
    tf.c2 *= scale
    tf.c3 *= scale
    return tf


def _run_one_tensor(a: np.ndarray, cfg: SolverConfig, restart: int):
    t0 = time.perf_counter()
    tf = init_tensor_factors(a, cfg, restart)
    rows = {k: _mode_rows(a, k) for k in (1, 2, 3)}
    starts = np.zeros(1, dtype=np.int64)
    sizes = np.array([cfg.r], dtype=np.int64)
    eps = float(cfg.damping)
    sst = float(np.sum(a * a))
    scale = 1.0 + float(_kernels.fro(a))

    max_s = cfg.max_sweeps
    obj = np.empty(max_s)
    err = np.empty(max_s)
    kkt_a = np.empty(max_s)
    kkt_b = np.empty(max_s)
    mono_before = np.empty(3 * max_s)
    mono_after = np.empty(3 * max_s)

    prev = float(np.sum((a - tensor_eval(tf)) ** 2))
    done = 0
    for s in range(max_s):
        for j, mode in enumerate((1, 2, 3)):
            try:
                fb, fa = _kernels.half_sweep_rows(
                    rows[mode],
                    _mode_mats(tf, mode),
                    tf.mode(mode),
                    starts,
                    sizes,
                    eps,
                    FREEZE_FLOOR,
                )
            except ValueError as e:
                raise Singular(
                    f"sweep {s + 1}, mode {mode} of restart {restart}: {e}"
                ) from e
            mono_before[3 * s + j] = fb
            mono_after[3 * s + j] = fa

        f_now = float(np.sum((a - tensor_eval(tf)) ** 2))
        obj[s] = f_now
        err[s] = f_now / sst
        res = [
            float(_kernels.kkt_from_rows(rows[k], _mode_mats(tf, k), tf.mode(k)))
            / scale
            for k in (1, 2, 3)
        ]
        kkt_a[s] = res[0]
        kkt_b[s] = max(res[1], res[2])
        done = s + 1
        if cfg.rel_tol > 0.0 and prev - f_now <= cfg.rel_tol * (1.0 + prev):
            break
        prev = f_now

    hist = RunHistory(
        sweep=np.arange(1, done + 1, dtype=np.int64),
        objective=obj[:done].copy(),
        err=err[:done].copy(),
        kkt_a=kkt_a[:done].copy(),
        kkt_b=kkt_b[:done].copy(),
        mono_before=mono_before[: 3 * done].copy(),
        mono_after=mono_after[: 3 * done].copy(),
        seconds=time.perf_counter() - t0,
        restart=restart,
    )
    return tf, hist


def tensor_factorize(t, cfg: SolverConfig) -> tuple[TensorFactors, RunHistory]:
    """Approximate PSD factorization of a cubic nonnegative tensor.

    Sweeps cycle the three modes in order; restarts and early stopping
    behave as in the matrix solver. In the returned history kkt_a is the
    mode-1 stationarity residual and kkt_b the worse of modes 2 and 3,
    each normalized by 1 + the data norm.
    """
    a = _check_tensor(t)
    if not np.any(a):
        raise ZeroData("tensor is identically zero")
    if cfg.blocks is not None:
        raise ValueError("tensor factors are unstructured; cfg.blocks must be None")
    best: tuple[TensorFactors, RunHistory] | None = None
    for k in range(cfg.restarts):
        tf, hist = _run_one_tensor(a, cfg, k)
        if best is None or hist.final_objective < best[1].final_objective:
            best = (tf, hist)
    assert best is not None
    return best


def tensor_normalized_error(t, tf: TensorFactors) -> float:
    """Squared fit error divided by the squared data norm."""
    a = np.ascontiguousarray(t, dtype=np.float64)
    sst = float(np.sum(a * a))
    if sst == 0.0:
        raise ZeroData("cannot normalize by an identically zero tensor")
    return float(np.sum((a - tensor_eval(tf)) ** 2)) / sst
