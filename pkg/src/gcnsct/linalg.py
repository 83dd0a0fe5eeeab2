"""Dense symmetric eigendecomposition with validated inputs.

All matrices are plain float64 numpy arrays. The solver is LAPACK's
symmetric eigensolver; callers get eigenvalues sorted in descending
order and orthonormal eigenvectors as columns.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError

DEFAULT_SYMMETRY_TOL = 1e-10


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(a * b))


def symmetric_eigendecomposition(
    m: np.ndarray, tol: float = DEFAULT_SYMMETRY_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues descending and
    eigenvector ``i`` in column ``i``. The input must be square and symmetric
    up to ``tol`` (absolute, relative to the largest entry magnitude); it is
    symmetrised before factorisation so round-off asymmetry cannot leak into
    the result.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > tol * scale:
        raise InputError(
            f"matrix is not symmetric: max|M - M^T| = {asym:.3e} exceeds tol {tol:.1e}"
        )
    sym = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(sym)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]
