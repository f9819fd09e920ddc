"""Dense real linear algebra used by the solvers and the certificates.

Matrices are plain 2-D ``numpy`` float arrays and index sets are sorted
tuples of ints.  Everything here is a pure function of its inputs.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, RankDeficient

RANK_TOL = 1e-10


def as_dense(a):
    """Return `a` as a finite 2-D float64 array, or raise ``ValueError``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def index_set(indices, n=None):
    """Normalize `indices` to a strictly increasing tuple of distinct ints.

    If `n` is given, every index must lie in ``[0, n)``.
    """
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices in {idx}")
    idx.sort()
    if n is not None and idx and (idx[0] < 0 or idx[-1] >= n):
        raise ValueError(f"indices {idx} out of range [0, {n})")
    return tuple(idx)


def _qr_checked(A):
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() <= RANK_TOL * diag.max():
        raise RankDeficient(
            f"column rank check failed: min |R_ii| = {diag.min():.3e}, "
            f"max |R_ii| = {diag.max():.3e}")
    return Q, R


def orth_basis(A):
    """Orthonormal basis of range(A) for a full-column-rank `A` (may be empty)."""
    A = np.asarray(A, dtype=float)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    return _qr_checked(A)[0]


def least_squares(A, y):
    """Solve ``min_x ||y - A x||_2`` through a Householder QR factorization.

    Raises
    ------
    RankDeficient
        If the smallest diagonal entry of R is not above ``1e-10`` times the
        largest one.
    """
    A = as_dense(A)
    y = np.asarray(y, dtype=float)
    if A.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[0]} rows but y has {y.shape[0]}")
    if A.shape[1] == 0:
        return np.zeros((0,) + y.shape[1:])
    Q, R = _qr_checked(A)
    return solve_triangular(R, Q.T @ y)


def project(A, v):
    """Orthogonal projection of `v` onto range(A); zero map for empty `A`."""
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2 or A.shape[1] == 0:
        return np.zeros_like(v)
    Q = orth_basis(A)
    return Q @ (Q.T @ v)


def project_orth(A, v):
    """Projection of `v` onto the orthogonal complement of range(A)."""
    v = np.asarray(v, dtype=float)
    return v - project(A, v)


def pseudoinverse_apply(A, B):
    """Compute ``pinv(A) @ B`` for full-column-rank `A` without forming pinv(A)."""
    A = as_dense(A)
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    return least_squares(A, B)


def norm_11(A):
    """Maximum absolute column sum."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=0).max())


def norm_inf_inf(A):
    """Maximum absolute row sum."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=1).max())


def spectral_norm(A):
    """Largest singular value (LAPACK SVD, deterministic)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _block_spectral_norms(A, d_row, d_col):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if d_row < 1 or d_col < 1 or m % d_row or n % d_col:
        raise DimensionMismatch(
            f"block sizes ({d_row}, {d_col}) do not divide shape {A.shape}")
    blocks = A.reshape(m // d_row, d_row, n // d_col, d_col).transpose(0, 2, 1, 3)
    if d_row == 1 or d_col == 1:
        # a row or column vector's spectral norm is its Euclidean norm
        return np.sqrt((blocks ** 2).sum(axis=(2, 3)))
    return np.linalg.norm(blocks, ord=2, axis=(2, 3))


def rho_c(A, d_row, d_col):
    """Max over block-columns of the summed per-block spectral norms."""
    if np.size(A) == 0:
        return 0.0
    return float(_block_spectral_norms(A, d_row, d_col).sum(axis=0).max())


def rho_r(A, d_row, d_col):
    """Max over block-rows of the summed per-block spectral norms."""
    if np.size(A) == 0:
        return 0.0
    return float(_block_spectral_norms(A, d_row, d_col).sum(axis=1).max())


# --- matrix files ---------------------------------------------------------
# First line "rows,cols", then one comma-separated row per line.  repr() of a
# float is the shortest string that round-trips, so values survive exactly.

def write_matrix(path, A):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    lines = [f"{A.shape[0]},{A.shape[1]}"]
    lines += [",".join(repr(float(x)) for x in row) for row in A]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        rows, cols = (int(t) for t in lines[0].split(","))
    except ValueError as exc:
        raise ValueError(f"{path}: bad header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != rows:
        raise DimensionMismatch(f"{path}: header says {rows} rows, found {len(body)}")
    data = np.array([[float(t) for t in ln.split(",")] for ln in body], dtype=float)
    if data.shape != (rows, cols):
        raise DimensionMismatch(f"{path}: header says {rows}x{cols}, found {data.shape}")
    return as_dense(data)


def read_vector(path):
    """Read a vector stored as an n x 1 (or 1 x n) matrix file."""
    a = read_matrix(path)
    if 1 not in a.shape:
        raise DimensionMismatch(f"{path}: expected a vector, got shape {a.shape}")
    return a.ravel()
