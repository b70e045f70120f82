"""Trace measurement maps built from stacks of PSD matrices.

A map A = (A_1, ..., A_m) sends a symmetric matrix Z to the vector of
trace inner products (tr(A_1 Z), ..., tr(A_m Z)). Its adjoint sends a
weight vector x to sum_k x_k A_k, and the composition ata(B) =
adjoint(apply(B)) is the normal-equation operator of the least-squares
subproblem. The stack is stored as one C-contiguous (m, r, r) array.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimMismatch, NotPd, NotPsd, Singular
from .symmat import as_symmetric, default_psd_tol, eig_sym


@dataclass(frozen=True)
class MeasurementMap:
    """Stack of symmetric PSD matrices defining a trace measurement map."""

    mats: np.ndarray = field(repr=False)

    def __post_init__(self):
        stack = np.asarray(self.mats, dtype=np.float64)
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise ValueError(f"expected a (m, r, r) stack, got {stack.shape}")
        if stack.shape[0] < 1:
            raise ValueError("measurement map needs at least one matrix")
        fixed = np.empty_like(stack)
        for k in range(stack.shape[0]):
            a = as_symmetric(stack[k])
            w = np.linalg.eigvalsh(a)
            if w[0] < -default_psd_tol(w):
                raise NotPsd(f"matrix {k} of the map is not PSD")
            fixed[k] = a
        object.__setattr__(self, "mats", fixed)

    def __len__(self) -> int:
        return self.mats.shape[0]

    @property
    def dim(self) -> int:
        return self.mats.shape[1]


def _check_dim(m: MeasurementMap, z: np.ndarray):
    if z.shape[0] != m.dim:
        raise DimMismatch(f"map dimension {m.dim} vs operand dimension {z.shape[0]}")


def apply(m: MeasurementMap, z) -> np.ndarray:
    """Vector of trace inner products of each map matrix with z."""
    zz = as_symmetric(z)
    _check_dim(m, zz)
    return _kernels.map_apply(m.mats, zz)


def adjoint(m: MeasurementMap, x) -> np.ndarray:
    """Weighted sum of the map matrices, sum_k x_k A_k."""
    xx = np.ascontiguousarray(x, dtype=np.float64)
    if xx.ndim != 1 or xx.shape[0] != len(m):
        raise DimMismatch(f"weight vector length {xx.shape} vs map size {len(m)}")
    if not np.all(np.isfinite(xx)):
        raise ValueError("weight vector has non-finite entries")
    return _kernels.map_adjoint(m.mats, xx)


def ata(m: MeasurementMap, b) -> np.ndarray:
    """Normal-equation operator sum_k tr(A_k b) A_k; equals adjoint(apply(b))."""
    bb = as_symmetric(b)
    _check_dim(m, bb)
    return _kernels.map_ata(m.mats, bb)


def mmu_scaler(m: MeasurementMap, b_old) -> np.ndarray:
    """Congruence scaler W = geometric mean of ata(b_old)^{-1} and b_old.

    This is the W of the multiplicative update W (adjoint x) W. b_old must
    be positive definite; the map must make ata(b_old) invertible.

    Raises
    ------
    NotPd
        If b_old is not positive definite.
    Singular
        If ata(b_old) is singular to working precision.
    """
    bb = as_symmetric(b_old)
    _check_dim(m, bb)
    w = eig_sym(bb).eigenvalues
    if w[0] <= default_psd_tol(w):
        raise NotPd("b_old is not positive definite")
    s = _kernels.map_ata(m.mats, bb)
    try:
        return _kernels.scaler_from_ata(s, bb)
    except ValueError as e:
        raise Singular(f"normal-equation operator is singular: {e}") from e


def domination_gap(m: MeasurementMap, b, z) -> float:
    """Slack of the quadratic domination bound at b in direction z.

    Returns <z, V z V> - <z, ata(z)> with V the geometric mean of ata(b)
    and b^{-1}. The bound states this is nonnegative for every symmetric z
    whenever b is positive definite; the returned value is its slack
    (nonnegative up to roundoff, zero in tight directions).
    """
    bb = as_symmetric(b)
    zz = as_symmetric(z)
    _check_dim(m, bb)
    _check_dim(m, zz)
    w = eig_sym(bb).eigenvalues
    if w[0] <= default_psd_tol(w):
        raise NotPd("b is not positive definite")
    s = _kernels.map_ata(m.mats, bb)
    try:
        v = _kernels.geomean_pd(s, _kernels.inv_pd(bb))
    except ValueError as e:
        raise Singular(f"normal-equation operator is singular: {e}") from e
    vzv = v @ zz @ v
    lhs = float(np.sum(zz * vzv))
    rhs = float(np.sum(zz * _kernels.map_ata(m.mats, zz)))
    return lhs - rhs


def trace_cs_gap(x, y) -> float:
    """Slack tr(x^2) tr(y^2) - tr(xy)^2 of the trace Cauchy-Schwarz bound."""
    xx = as_symmetric(x)
    yy = as_symmetric(y)
    if xx.shape != yy.shape:
        raise DimMismatch(f"operand shapes differ: {xx.shape} vs {yy.shape}")
    t_xx = float(np.sum(xx * xx))
    t_yy = float(np.sum(yy * yy))
    t_xy = float(np.sum(xx * yy))
    return t_xx * t_yy - t_xy * t_xy
