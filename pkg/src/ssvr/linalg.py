"""Small dense linear algebra used by the Newton solver.

Matrices and vectors are plain float64 numpy arrays.  The SPD solve goes
through LAPACK's Cholesky (``potrf``/``potrs``) with an explicit pivot check.
"""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

PIVOT_RTOL = 1e-12


class DimensionMismatch(ValueError):
    pass


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot is nonpositive or negligibly small."""


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def matvec(M, v) -> np.ndarray:
    M, v = as_matrix(M), as_vector(v)
    if M.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"matrix has {M.shape[1]} columns, vector has length {v.shape[0]}")
    return M @ v


def cholesky(H) -> np.ndarray:
    """Lower Cholesky factor of ``H``; raises :class:`NotPositiveDefinite`.

    A pivot ``L[k, k]**2`` at or below ``PIVOT_RTOL * max(diag(H))`` counts as
    failure.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if H.shape[1] != n:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    scale = np.max(np.diag(H)) if n else 1.0
    if not scale > 0:
        raise NotPositiveDefinite("nonpositive diagonal")
    try:
        L, _ = cho_factor(H, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    L = np.tril(L)
    pivots = np.diag(L) ** 2
    bad = np.flatnonzero(pivots <= PIVOT_RTOL * scale)
    if bad.size:
        raise NotPositiveDefinite(f"pivot {bad[0]} is {pivots[bad[0]]:.3e}")
    return L


def spd_solve(H, g) -> np.ndarray:
    """Solve ``H d = g`` for symmetric positive definite ``H``."""
    H, g = as_matrix(H), as_vector(g)
    if H.shape[0] != g.shape[0]:
        raise DimensionMismatch(f"matrix is {H.shape}, right-hand side has length {g.shape[0]}")
    asym = np.max(np.abs(H - H.T)) if H.size else 0.0
    if asym > 1e-10 * max(1.0, np.max(np.abs(H))):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    L = cholesky(H)
    return cho_solve((L, True), g, check_finite=False)
