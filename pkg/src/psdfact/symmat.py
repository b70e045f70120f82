"""Dense symmetric-matrix primitives: eigendecomposition, square root,
inverse, geometric mean, and definiteness classification.

Matrices are plain float64 ndarrays. Public functions symmetrize their
input (after checking it is symmetric to begin with) so downstream kernels
can rely on bitwise-symmetric storage.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import DimMismatch, IterationFailure, NotPd, NotPsd, Singular


class Psdness(Enum):
    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (nondecreasing) and matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


def as_symmetric(m, tol: float = 1e-8) -> np.ndarray:
    """Validate and return a C-contiguous, bitwise-symmetric float64 copy.

    Accepts matrices symmetric up to `tol` relative to their magnitude;
    anything worse is a caller bug, not roundoff.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > tol * (1.0 + scale):
        raise ValueError("matrix is not symmetric")
    return np.ascontiguousarray(0.5 * (a + a.T))


def default_psd_tol(eigenvalues: np.ndarray) -> float:
    """Scale-relative definiteness tolerance 1e-10 * (1 + max |eigenvalue|)."""
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return 1e-10 * (1.0 + top)


def eig_sym(m) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues sorted nondecreasing, eigenvectors in matching columns.

    Raises
    ------
    IterationFailure
        If the underlying symmetric eigensolver fails to converge.
    """
    a = as_symmetric(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as e:
        raise IterationFailure(f"symmetric eigensolver failed: {e}") from e
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def classify_psd(m, tol: float | None = None) -> Psdness:
    """Classify a symmetric matrix as PD, PSD, or indefinite.

    With `tol` omitted the scale-relative default is used. Eigenvalues
    above tol mean definite, within [-tol, tol] count as semidefinite.
    """
    w = eig_sym(m).eigenvalues
    if tol is None:
        tol = default_psd_tol(w)
    lo = float(w[0]) if w.size else 0.0
    if lo > tol:
        return Psdness.POSITIVE_DEFINITE
    if lo >= -tol:
        return Psdness.POSITIVE_SEMIDEFINITE
    return Psdness.INDEFINITE


def sym_sqrt(m, tol: float | None = None) -> np.ndarray:
    """Symmetric PSD square root.

    Eigenvalues in [-tol, 0) are treated as roundoff and clamped to zero;
    an eigenvalue below -tol raises NotPsd. Exactly diagonal input takes a
    closed-form path, so sym_sqrt(I) == I bitwise.
    """
    a = as_symmetric(m)
    if np.count_nonzero(a - np.diag(np.diagonal(a))) == 0:
        d = np.diagonal(a).copy()
        t = default_psd_tol(d) if tol is None else tol
        if np.min(d, initial=0.0) < -t:
            raise NotPsd(f"diagonal entry {d.min():.3e} below -{t:.3e}")
        return np.diag(np.sqrt(np.maximum(d, 0.0)))
    dec = eig_sym(a)
    t = default_psd_tol(dec.eigenvalues) if tol is None else tol
    if dec.eigenvalues[0] < -t:
        raise NotPsd(f"eigenvalue {dec.eigenvalues[0]:.3e} below -{t:.3e}")
    return _kernels.sqrt_psd(a)


def sym_inv(m, tol: float | None = None) -> np.ndarray:
    """Inverse of a positive definite matrix.

    Raises Singular if the smallest eigenvalue is at or below tol (the
    scale-relative default when omitted).
    """
    a = as_symmetric(m)
    w = eig_sym(a).eigenvalues
    t = default_psd_tol(w) if tol is None else tol
    if w[0] <= t:
        raise Singular(
            f"smallest eigenvalue {w[0]:.3e} not above {t:.3e}; cannot invert"
        )
    return _kernels.inv_pd(a)


def geometric_mean(c, d, tol: float | None = None) -> np.ndarray:
    """Matrix geometric mean c^{1/2} (c^{-1/2} d c^{-1/2})^{1/2} c^{1/2}.

    Both arguments must be positive definite. The result X is the unique
    positive definite solution of the Riccati equation X c^{-1} X = d; it
    is symmetric in (c, d) and satisfies the inversion identity
    geometric_mean(c, d)^{-1} = geometric_mean(c^{-1}, d^{-1}).

    Raises
    ------
    NotPd
        If either argument fails the positive definite check.
    """
    cc = as_symmetric(c)
    dd = as_symmetric(d)
    if cc.shape != dd.shape:
        raise DimMismatch(f"operand shapes differ: {cc.shape} vs {dd.shape}")
    for name, a in (("first", cc), ("second", dd)):
        w = eig_sym(a).eigenvalues
        t = default_psd_tol(w) if tol is None else tol
        if w[0] <= t:
            raise NotPd(f"{name} operand is not positive definite")
    return _kernels.geomean_pd(cc, dd)
