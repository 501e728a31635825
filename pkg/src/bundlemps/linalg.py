"""Dense symmetric eigensolver and SVD with fixed ordering and sign conventions.

Both decompositions are thin wrappers around LAPACK (``syevd`` through
``numpy.linalg.eigh`` and ``gesvd`` through ``scipy.linalg.svd``).  What this
module adds is determinism: eigenvalues ascend, singular values descend, and
every vector is sign-fixed so that its largest-magnitude entry is positive.
The SVD never forms ``A.T @ A``; small singular values survive down to
machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, RankZeroError, SymmetryError, ValidationError

# entries within this relative distance of the largest magnitude count as tied
_TIE_RTOL = 1e-10
# relative eigenvalue spacing treated as a degeneracy when ordering vectors
_DEGENERACY_RTOL = 1e-12
_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class EigDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


@dataclass(frozen=True, eq=False)
class SvdDecomposition:
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    """Right singular vectors as columns, so ``A = u @ diag(s) @ v.T``."""

    def __iter__(self):
        yield self.u
        yield self.s
        yield self.v

    @property
    def rank(self) -> int:
        return self.s.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a 2-D float64 array, rejecting NaN/Inf."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def _pivot_index(vectors: np.ndarray) -> np.ndarray:
    """Row index of the first entry (per column) tied for largest magnitude."""
    mag = np.abs(vectors)
    top = mag.max(axis=0)
    return np.argmax(mag >= top * (1.0 - _TIE_RTOL), axis=0)


def sign_fix(vectors: np.ndarray) -> np.ndarray:
    """Signs (+1/-1 per column) that make each column's pivot entry positive."""
    if vectors.size == 0:
        return np.ones(vectors.shape[1])
    piv = _pivot_index(vectors)
    signs = np.sign(vectors[piv, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def _order_degenerate(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Column order: ascending values, ties broken lexicographically (descending)."""
    n = values.shape[0]
    order = np.arange(n)
    if n < 2:
        return order
    scale = max(1.0, float(np.abs(values).max()))
    gaps = np.diff(values) > _DEGENERACY_RTOL * scale
    starts = np.concatenate(([0], np.nonzero(gaps)[0] + 1, [n]))
    for lo, hi in zip(starts[:-1], starts[1:]):
        if hi - lo < 2:
            continue
        block = np.round(vectors[:, lo:hi], 12)
        # lexsort sorts by the last key first; feed rows in reverse order
        keys = -block[::-1, :]
        order[lo:hi] = lo + np.lexsort(keys)
    return order


def sym_eig(a) -> EigDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    Eigenvalues ascend.  Each eigenvector has its largest-magnitude component
    positive; inside a degenerate cluster vectors are ordered lexicographically
    by their (sign-fixed) components, largest first.
    """
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"sym_eig needs a square matrix, got {arr.shape}")
    scale = max(1.0, float(np.abs(arr).max())) if arr.size else 1.0
    if arr.size and np.abs(arr - arr.T).max() > _SYMMETRY_RTOL * scale:
        raise SymmetryError("sym_eig needs a symmetric matrix")
    w, v = np.linalg.eigh(arr)
    v = v * sign_fix(v)
    order = _order_degenerate(w, v)
    # values inside a cluster agree to the tie tolerance, so keep them ascending
    return EigDecomposition(w, np.ascontiguousarray(v[:, order]))


def svd(a) -> SvdDecomposition:
    """Thin SVD with descending singular values and sign-fixed left vectors."""
    arr = as_matrix(a)
    k = min(arr.shape)
    if k == 0:
        return SvdDecomposition(
            np.zeros((arr.shape[0], 0)), np.zeros(0), np.zeros((arr.shape[1], 0))
        )
    u, s, vt = scipy.linalg.svd(
        arr, full_matrices=False, lapack_driver="gesvd", check_finite=False
    )
    signs = sign_fix(u)
    return SvdDecomposition(u * signs, s, vt.T * signs)


def truncated_svd(a, cutoff: float = 0.0, max_rank: int | None = None):
    """SVD keeping ``s_k > cutoff * s_1``, at most ``max_rank`` values.

    Returns ``(SvdDecomposition, discarded_weight)`` where the discarded
    weight is the sum of squared dropped singular values.  Raises
    ``RankZeroError`` if nothing survives (e.g. a zero matrix).
    """
    if cutoff < 0:
        raise ValidationError("cutoff must be nonnegative")
    full = svd(a)
    s = full.s
    if s.size == 0 or s[0] <= 0.0:
        raise RankZeroError("every singular value was discarded")
    keep = int(np.count_nonzero(s > cutoff * s[0]))
    if max_rank is not None:
        if max_rank < 1:
            raise RankZeroError("max_rank < 1 discards every singular value")
        keep = min(keep, max_rank)
    discarded = float(np.sum(s[keep:] ** 2))
    kept = SvdDecomposition(full.u[:, :keep], s[:keep], full.v[:, :keep])
    return kept, discarded
