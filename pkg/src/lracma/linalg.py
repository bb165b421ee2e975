"""Dense symmetric linear algebra for small covariance matrices.

All routines operate on full square numpy arrays that are assumed (and kept)
symmetric.  Eigenvalues below ``EIG_FLOOR_REL`` times the largest eigenvalue
are clamped to that floor before taking square roots, inverses, or
determinants, so that a shrinking covariance degenerates into the explicit
step-size termination check of the run loop instead of into a hard failure.
"""

import numpy as np

from .errors import InvalidMatrix, NotPositiveDefinite, NumericalRange

EIG_FLOOR_REL = 1e-20


def symmetrize(a):
    """Return (a + a.T) / 2."""
    return 0.5 * (a + a.T)


def sym_eig(a):
    """Eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in nondecreasing
    order and orthonormal eigenvectors in the columns.  Deterministic for
    identical input bits.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    vals, vecs = np.linalg.eigh(a)
    return vals, vecs


def clamped_eig(a):
    """Eigendecomposition with the relative eigenvalue floor applied.

    Raises NotPositiveDefinite when even the largest eigenvalue is
    nonpositive, i.e. clamping cannot produce an SPD matrix.
    """
    vals, vecs = sym_eig(a)
    top = vals[-1]
    if not top > 0.0:
        raise NotPositiveDefinite("largest eigenvalue is nonpositive")
    return np.maximum(vals, EIG_FLOOR_REL * top), vecs


def spd_sqrt(a):
    """Symmetric square root of an SPD matrix (after clamping)."""
    vals, vecs = clamped_eig(a)
    return symmetrize((vecs * np.sqrt(vals)) @ vecs.T)


def spd_inv_sqrt(a):
    """Symmetric inverse square root of an SPD matrix (after clamping)."""
    vals, vecs = clamped_eig(a)
    return symmetrize((vecs / np.sqrt(vals)) @ vecs.T)


def spd_det(a):
    """Determinant as the product of clamped eigenvalues."""
    vals, _ = clamped_eig(a)
    det = float(np.prod(vals))
    if not np.isfinite(det) or det <= 0.0:
        raise NumericalRange("determinant over- or underflowed")
    return det


def spd_clamp(a):
    """Nearest-SPD repair: rebuild from clamped eigenvalues."""
    vals, vecs = clamped_eig(a)
    return symmetrize((vecs * vals) @ vecs.T)
