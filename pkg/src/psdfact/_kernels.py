"""Hot numerical kernels shared by both backends.

Every function here is written in the numba-supported subset of numpy and is
compiled with ``njit(cache=True)`` when the numba backend is active (see
:mod:`psdfact.backend`). Callers must pass C-contiguous float64 arrays;
symmetric matrices are stored dense and kept bitwise symmetric. Stacked
families of r x r matrices have shape (count, r, r), and a stack reshaped to
(count, r*r) turns trace inner products into ordinary matrix products.

Kernels do not validate domain preconditions (that is the public API's job);
they raise ValueError with a fixed message only where continuing would emit
NaNs, and drivers translate that into the typed errors of the package.
"""

import numpy as np

from .backend import maybe_jit


@maybe_jit
def fro(m):
    """Frobenius norm."""
    return np.sqrt(np.sum(m * m))


@maybe_jit
def sqrt_psd(m):
    """Symmetric square root, eigenvalues clamped at zero from below."""
    w, v = np.linalg.eigh(m)
    s = np.sqrt(np.maximum(w, 0.0))
    out = np.dot(v * s, v.T)
    return 0.5 * (out + out.T)


@maybe_jit
def inv_pd(m):
    """Inverse of a positive definite matrix via its eigendecomposition."""
    w, v = np.linalg.eigh(m)
    if w[0] <= 0.0:
        raise ValueError("matrix is singular or indefinite")
    out = np.dot(v * (1.0 / w), v.T)
    return 0.5 * (out + out.T)


@maybe_jit
def geomean_pd(c, d):
    """Geometric mean c^{1/2} (c^{-1/2} d c^{-1/2})^{1/2} c^{1/2}.

    c must be positive definite; d may be semidefinite (tiny negative
    eigenvalues of the congruence are clamped).
    """
    wc, vc = np.linalg.eigh(c)
    if wc[0] <= 0.0:
        raise ValueError("matrix is singular or indefinite")
    sq = np.sqrt(wc)
    c_half = np.dot(vc * sq, vc.T)
    c_nhalf = np.dot(vc * (1.0 / sq), vc.T)
    mid = np.dot(c_nhalf, np.dot(d, c_nhalf))
    mid = 0.5 * (mid + mid.T)
    out = np.dot(c_half, np.dot(sqrt_psd(mid), c_half))
    return 0.5 * (out + out.T)


@maybe_jit
def scaler_from_ata(s, b):
    """Geometric mean of s^{-1} and b, from one eigendecomposition of s.

    Equals geomean_pd(inv_pd(s), b): with s = u diag(w) u^T the two half
    powers of s^{-1} are read off the same factorization.
    """
    w, u = np.linalg.eigh(s)
    if w[0] <= 0.0:
        raise ValueError("matrix is singular or indefinite")
    sq = np.sqrt(w)
    s_half = np.dot(u * sq, u.T)
    s_nhalf = np.dot(u * (1.0 / sq), u.T)
    mid = np.dot(s_half, np.dot(b, s_half))
    mid = 0.5 * (mid + mid.T)
    out = np.dot(s_nhalf, np.dot(sqrt_psd(mid), s_nhalf))
    return 0.5 * (out + out.T)


@maybe_jit
def map_apply(mats, z):
    """Vector of trace inner products (tr(mats_k z))_k."""
    m, r = mats.shape[0], mats.shape[1]
    return np.dot(mats.reshape(m, r * r), np.ascontiguousarray(z).reshape(r * r))


@maybe_jit
def map_adjoint(mats, x):
    """Weighted sum sum_k x_k mats_k; bitwise symmetric for symmetric mats."""
    m, r = mats.shape[0], mats.shape[1]
    out = np.dot(np.ascontiguousarray(x), mats.reshape(m, r * r))
    return out.reshape(r, r)


@maybe_jit
def map_ata(mats, b):
    """sum_k tr(mats_k b) mats_k, the normal-equation operator at b."""
    m, r = mats.shape[0], mats.shape[1]
    m2 = mats.reshape(m, r * r)
    coeffs = np.dot(m2, np.ascontiguousarray(b).reshape(r * r))
    return np.dot(coeffs, m2).reshape(r, r)


@maybe_jit
def sub_update(mats, x, b_old):
    """One multiplicative update W (adjoint x) W with W = (ata)^{-1} # b_old."""
    w = scaler_from_ata(map_ata(mats, b_old), b_old)
    out = np.dot(w, np.dot(map_adjoint(mats, x), w))
    return 0.5 * (out + out.T)


@maybe_jit
def gram_rows(targ, mats):
    """Matrix of trace inner products G[j, k] = tr(targ_j mats_k)."""
    nt, r = targ.shape[0], targ.shape[1]
    m = mats.shape[0]
    return np.dot(targ.reshape(nt, r * r), mats.reshape(m, r * r).T)


@maybe_jit
def sq_diff(x, g):
    """Sum of squared differences."""
    d = x - g
    return np.sum(d * d)


@maybe_jit
def half_sweep_rows(xrows, mats, targ, starts, sizes, eps, floor):
    """Update every matrix in `targ` against the frozen family `mats`.

    xrows[j] is the data vector for target j. Arithmetic is block-local over
    the partition (starts, sizes) of the side length r: off-block entries of
    targ are never written, so block sparsity is preserved exactly. Damping
    eps * I is added to each updated matrix after the post-update objective
    is measured. A target whose data row is identically zero is frozen at
    floor * I when eps == 0 (its natural update is the zero matrix).

    Returns (objective before, objective after) measured without damping;
    targ is modified in place.
    """
    nt, r = targ.shape[0], targ.shape[1]
    m = mats.shape[0]
    nblocks = starts.shape[0]
    t2 = targ.reshape(nt, r * r)
    m2 = mats.reshape(m, r * r)

    g0 = np.dot(t2, m2.T)
    f_before = sq_diff(xrows, g0)

    for j in range(nt):
        xmax = 0.0
        for k in range(m):
            a = abs(xrows[j, k])
            if a > xmax:
                xmax = a
        if xmax == 0.0:
            targ[j, :, :] = 0.0
            if eps == 0.0:
                for d in range(r):
                    targ[j, d, d] = floor
            continue
        coeffs = g0[j]
        s_full = np.dot(coeffs, m2).reshape(r, r)
        y_full = np.dot(xrows[j], m2).reshape(r, r)
        for b in range(nblocks):
            lo = starts[b]
            hi = lo + sizes[b]
            sb = np.ascontiguousarray(s_full[lo:hi, lo:hi])
            bb = np.ascontiguousarray(targ[j, lo:hi, lo:hi])
            yb = np.ascontiguousarray(y_full[lo:hi, lo:hi])
            w = scaler_from_ata(sb, bb)
            nb = np.dot(w, np.dot(yb, w))
            targ[j, lo:hi, lo:hi] = 0.5 * (nb + nb.T)

    g1 = np.dot(t2, m2.T)
    f_after = sq_diff(xrows, g1)

    if eps > 0.0:
        for j in range(nt):
            for d in range(r):
                targ[j, d, d] += eps

    return f_before, f_after


@maybe_jit
def kkt_from_rows(xrows, mats, targ):
    """Max over targets of ||adjoint(x_j) - ata(targ_j)||_F, unnormalized.

    Zero at exact stationary points of every target's subproblem.
    """
    nt, r = targ.shape[0], targ.shape[1]
    m = mats.shape[0]
    t2 = targ.reshape(nt, r * r)
    m2 = mats.reshape(m, r * r)
    resid = np.dot(xrows - np.dot(t2, m2.T), m2)
    worst = 0.0
    for j in range(nt):
        v = np.sqrt(np.sum(resid[j] * resid[j]))
        if v > worst:
            worst = v
    return worst


@maybe_jit
def schur_stack(ca, cb):
    """Stack of entrywise products ca_p * cb_q, index q * len(ca) + p.

    The first family varies fastest, matching the vectorization order of
    tensor slices.
    """
    na, r = ca.shape[0], ca.shape[1]
    nb = cb.shape[0]
    out = np.empty((na * nb, r, r))
    for q in range(nb):
        for p in range(na):
            out[q * na + p] = ca[p] * cb[q]
    return out


@maybe_jit
def tensor_gram(c1, c2, c3):
    """Evaluation tensor: out[i,j,k] = sum of the triple Schur product."""
    d1, r = c1.shape[0], c1.shape[1]
    d2 = c2.shape[0]
    d3 = c3.shape[0]
    c3f = c3.reshape(d3, r * r)
    out = np.empty((d1, d2, d3))
    for i in range(d1):
        for j in range(d2):
            h = np.ascontiguousarray(c1[i] * c2[j]).reshape(r * r)
            out[i, j, :] = np.dot(c3f, h)
    return out
