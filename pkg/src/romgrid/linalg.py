"""Dense complex linear algebra kernel.

Everything downstream funnels its factorizations and basis growth through
this module: LU with an explicit singularity threshold, block solves with
plain-transpose support, and append-only orthonormalization with deflation.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, SingularMatrixError

__all__ = ["LUFactorization", "lu_factor", "orthonormalize_append", "gram_deviation"]

_EPS = np.finfo(np.float64).eps


def _as_complex_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-d, got shape {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


class LUFactorization:
    """LU factorization with partial pivoting of a square complex matrix.

    Holds the packed factors and exposes block solves for ``A X = B`` and,
    with ``transpose=True``, for ``A^T X = B`` (plain transpose, no
    conjugation), so one factorization serves both a system and its dual.
    """

    def __init__(self, lu, piv, dim, max_abs):
        self._lu = lu
        self._piv = piv
        self.dim = dim
        self.max_abs = max_abs

    def solve(self, rhs, transpose=False):
        """Solve ``A X = rhs`` (or ``A^T X = rhs``) for a vector or block."""
        rhs = np.asarray(rhs)
        squeeze = rhs.ndim == 1
        b = _as_complex_matrix(rhs, "right-hand side")
        if b.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"right-hand side has {b.shape[0]} rows, factorization has dimension {self.dim}"
            )
        x = scipy.linalg.lu_solve((self._lu, self._piv), b, trans=1 if transpose else 0)
        return x[:, 0] if squeeze else x


def lu_factor(a):
    """Factor a square matrix, raising SingularMatrixError on rank loss.

    The factorization is rejected when the smallest pivot magnitude falls
    below ``dim * eps * max|A|``, which catches exact and numerical
    singularity alike (scipy alone only warns on exact zero pivots).
    """
    a = _as_complex_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionMismatchError(f"cannot factor a {n}x{m} matrix")
    max_abs = float(np.max(np.abs(a))) if a.size else 0.0
    if n == 0:
        return LUFactorization(np.zeros((0, 0), dtype=np.complex128), np.zeros(0, dtype=np.int32), 0, 0.0)
    if max_abs == 0.0:
        raise SingularMatrixError(f"matrix of dimension {n} is identically zero")
    with np.errstate(all="ignore"), warnings.catch_warnings():
        # exact zero pivots are reported through the exception below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    min_pivot = float(np.min(np.abs(np.diag(lu))))
    threshold = n * _EPS * max_abs
    if not np.isfinite(min_pivot) or min_pivot < threshold:
        raise SingularMatrixError(
            f"matrix of dimension {n} is singular to working precision "
            f"(min pivot {min_pivot:.3e} < threshold {threshold:.3e})"
        )
    return LUFactorization(lu, piv, n, max_abs)


def orthonormalize_append(basis, block, deflation_tol=1e-10):
    """Extend an orthonormal basis by the directions a block adds.

    Modified Gram-Schmidt with one re-orthogonalization pass. Existing
    columns of ``basis`` are returned unchanged; each column of ``block``
    is orthogonalized against everything accepted so far and dropped when
    its remaining norm is at most ``deflation_tol`` times its original
    norm. ``basis`` may be None or have zero columns.

    Returns the extended matrix with unitarily orthonormal columns
    (``V^H V = I``).
    """
    block = _as_complex_matrix(block, "block")
    n = block.shape[0]
    if basis is None:
        basis = np.zeros((n, 0), dtype=np.complex128)
    else:
        basis = _as_complex_matrix(basis, "basis")
        if basis.shape[0] != n:
            raise DimensionMismatchError(
                f"basis has {basis.shape[0]} rows, block has {n}"
            )
    columns = [basis[:, j] for j in range(basis.shape[1])]
    n_existing = len(columns)
    for j in range(block.shape[1]):
        v = block[:, j].copy()
        original_norm = np.linalg.norm(v)
        if original_norm == 0.0:
            continue
        for _ in range(2):
            for u in columns:
                v -= (u.conj() @ v) * u
        remaining = np.linalg.norm(v)
        if remaining <= deflation_tol * original_norm:
            continue
        columns.append(v / remaining)
    if len(columns) == n_existing:
        return basis
    return np.column_stack(columns)


def gram_deviation(v):
    """Max-magnitude deviation of ``V^H V`` from the identity."""
    v = _as_complex_matrix(v, "basis")
    r = v.shape[1]
    if r == 0:
        return 0.0
    g = v.conj().T @ v
    return float(np.max(np.abs(g - np.eye(r))))
