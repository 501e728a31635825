"""Matrix product states and bundled MPS built by sequential reshapes and SVDs.

Every site tensor is stored as a 4-index array ``(left, phys, right, bundle)``.
The bundle leg has size 1 everywhere except on the orthogonality centre,
where it carries the excitation index xi of size g.  Sites are 1-based.

A bundle of g states is decomposed from the ``d^N x g`` coefficient matrix
scaled by ``1/sqrt(g)``, so the singular values at every bond satisfy
``sum s^2 = 1``.  :func:`reconstruct` undoes the scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, ValidationError
from .linalg import SvdDecomposition, sign_fix, svd, truncated_svd

PHYS_DIM = 2
_NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BundledMPS:
    tensors: tuple
    center: int
    g: int
    state_indices: tuple = ()
    discarded: tuple = field(default=(), compare=False)
    """Discarded weight per SVD performed during construction."""

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def center_tensor(self) -> np.ndarray:
        return self.tensors[self.center - 1]


@dataclass(frozen=True, eq=False)
class BondData:
    bond: int
    left_basis: np.ndarray
    singular_values: np.ndarray
    right_basis: np.ndarray
    """Rows index (right configuration, xi) with xi fastest."""

    def partial_density_left(self) -> np.ndarray:
        """``rho_L = U D^2 U^T`` over the left configurations."""
        return (self.left_basis * self.singular_values**2) @ self.left_basis.T


def _n_sites(length: int, d: int) -> int:
    n = int(round(math.log(length, d))) if length > 1 else 0
    if n < 1 or d**n != length:
        raise DimensionError(f"length {length} is not a power of {d}")
    return n


def max_bond_dimension(n: int, d: int = PHYS_DIM, g: int = 1, center: int | None = None) -> list[int]:
    """Exact-case bond dimension bound per bond, with ``d -> g*d`` at the centre.

    Bond i (between sites i and i+1) gets
    ``min(prod_{x<=i} d'_x, prod_{x>i} d'_x)``.
    """
    if center is None:
        center = n
    if not 1 <= center <= n:
        raise ValidationError(f"center {center} outside 1..{n}")
    dims = [d * g if x == center else d for x in range(1, n + 1)]
    out = []
    for i in range(1, n):
        out.append(min(math.prod(dims[:i]), math.prod(dims[i:])))
    return out


def _split(matrix: np.ndarray, cutoff: float):
    """Truncated SVD keeping ``s > cutoff * s_1``; a zero block keeps rank 1."""
    if not np.any(matrix):
        k = 1
        u = np.zeros((matrix.shape[0], k))
        u[0, 0] = 1.0
        v = np.zeros((matrix.shape[1], k))
        v[0, 0] = 1.0
        return SvdDecomposition(u, np.zeros(k), v), 0.0
    return truncated_svd(matrix, cutoff)


def bundled_mps_from_vectors(coeffs, cutoff: float = 0.0, center: int | None = None,
                             state_indices=()) -> BundledMPS:
    """Decompose a ``d^N x g`` matrix of normalized columns into a bundled MPS.

    Sweeps left to right up to ``center`` with xi grouped with the
    right-hand indices, then right to left down to ``center``.  The centre
    defaults to ``ceil(N/2)``.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.ndim != 2 or c.shape[1] == 0:
        raise ValidationError("need a 2-D coefficient matrix with at least one column")
    if not np.all(np.isfinite(c)):
        raise ValidationError("coefficients must be finite")
    norms = np.linalg.norm(c, axis=0)
    if np.any(np.abs(norms - 1.0) > _NORM_TOL):
        raise ValidationError("every bundled state must be normalized")
    d = PHYS_DIM
    n = _n_sites(c.shape[0], d)
    g = c.shape[1]
    if center is None:
        center = (n + 1) // 2
    if not 1 <= center <= n:
        raise ValidationError(f"center {center} outside 1..{n}")

    # rest[a, sigma_i..sigma_N, xi]
    rest = (c / math.sqrt(g)).reshape(1, -1, g)
    tensors = []
    discarded = []
    for i in range(1, center):
        a = rest.shape[0]
        mat = rest.reshape(a * d, -1)
        dec, lost = _split(mat, cutoff)
        discarded.append(lost)
        k = dec.rank
        tensors.append(dec.u.reshape(a, d, k, 1))
        rest = (dec.s[:, None] * dec.v.T).reshape(k, -1, g)

    right = []
    # rest[a, sigma_center..sigma_j, xi, b] during the right sweep
    rest = rest.reshape(rest.shape[0], -1, g, 1)
    for j in range(n, center, -1):
        a, _, _, b = rest.shape
        # group (a, sigma_center..sigma_{j-1}, xi) | (sigma_j, b)
        t = rest.reshape(a, -1, d, g, b).transpose(0, 1, 3, 2, 4)
        left_dim = t.shape[0] * t.shape[1] * g
        mat = t.reshape(left_dim, d * b)
        dec, lost = _split(mat, cutoff)
        discarded.append(lost)
        k = dec.rank
        right.append(dec.v.T.reshape(k, d, b, 1))
        rest = (dec.u * dec.s).reshape(a, -1, g, k)
    a, _, _, b = rest.shape
    tensors.append(rest.reshape(a, d, g, b).transpose(0, 1, 3, 2).copy())
    tensors.extend(reversed(right))
    return BundledMPS(tuple(tensors), center, g, tuple(state_indices), tuple(discarded))


def mps_from_vector(vector, cutoff: float = 0.0, state_index=None) -> BundledMPS:
    """Left-to-right reshape+SVD of a single state; the centre ends on site N."""
    c = np.asarray(vector, dtype=np.float64).ravel()
    n = _n_sites(c.size, PHYS_DIM)
    idx = () if state_index is None else (state_index,)
    return bundled_mps_from_vectors(c[:, None], cutoff, center=n, state_indices=idx)


def reconstruct(mps: BundledMPS) -> np.ndarray:
    """Contract the chain back to the ``d^N x g`` coefficient matrix."""
    acc = np.ones((1, 1, 1))  # (configs, bond, xi)
    for t in mps.tensors:
        l, d, r, b = t.shape
        nxt = np.einsum("cax,adrb->cdrxb", acc, t)
        # exactly one of x, b is nontrivial
        nxt = nxt.reshape(acc.shape[0] * d, r, acc.shape[2] * b)
        acc = nxt
    out = acc.reshape(acc.shape[0], acc.shape[2])
    return out * math.sqrt(mps.g)


def _move_right(mps: BundledMPS, cutoff: float) -> BundledMPS:
    i = mps.center - 1
    t = mps.tensors[i]
    l, d, r, g = t.shape
    mat = t.transpose(0, 1, 3, 2).reshape(l * d, g * r)
    dec, _ = _split(mat, cutoff)
    k = dec.rank
    left = dec.u.reshape(l, d, k, 1)
    carry = (dec.s[:, None] * dec.v.T).reshape(k, g, r)
    nxt = mps.tensors[i + 1][..., 0]  # (r, d', r')
    center = np.einsum("kgr,rds->kdsg", carry, nxt)
    tensors = list(mps.tensors)
    tensors[i] = left
    tensors[i + 1] = center
    return replace(mps, tensors=tuple(tensors), center=mps.center + 1)


def _move_left(mps: BundledMPS, cutoff: float) -> BundledMPS:
    i = mps.center - 1
    t = mps.tensors[i]
    l, d, r, g = t.shape
    mat = t.transpose(0, 3, 1, 2).reshape(l * g, d * r)
    dec, _ = _split(mat, cutoff)
    k = dec.rank
    right = dec.v.T.reshape(k, d, r, 1)
    carry = (dec.u * dec.s).reshape(l, g, k)
    prv = mps.tensors[i - 1][..., 0]  # (l', d', l)
    center = np.einsum("pdl,lgk->pdkg", prv, carry)
    tensors = list(mps.tensors)
    tensors[i] = right
    tensors[i - 1] = center
    return replace(mps, tensors=tuple(tensors), center=mps.center - 1)


def gauge_center(mps: BundledMPS, target: int, cutoff: float = 0.0) -> BundledMPS:
    """Move the orthogonality centre (with its xi leg) to site ``target``."""
    if not 1 <= target <= mps.n_sites:
        raise ValidationError(f"target {target} outside 1..{mps.n_sites}")
    while mps.center < target:
        mps = _move_right(mps, cutoff)
    while mps.center > target:
        mps = _move_left(mps, cutoff)
    return mps


def left_normalization_error(tensor: np.ndarray) -> float:
    """``max |sum_{a,s} A[a,s,b] A[a,s,b'] - delta_bb'|`` for a left tensor."""
    l, d, r, _ = tensor.shape
    a = tensor[..., 0].reshape(l * d, r)
    return float(np.abs(a.T @ a - np.eye(r)).max())


def right_normalization_error(tensor: np.ndarray) -> float:
    l, d, r, _ = tensor.shape
    b = tensor[..., 0].reshape(l, d * r)
    return float(np.abs(b @ b.T - np.eye(l)).max())


def canonical_error(mps: BundledMPS) -> float:
    """Largest normalization defect over all non-centre tensors."""
    errs = [0.0]
    for site, t in enumerate(mps.tensors, start=1):
        if site < mps.center:
            errs.append(left_normalization_error(t))
        elif site > mps.center:
            errs.append(right_normalization_error(t))
    return max(errs)


def _left_block(mps: BundledMPS, upto: int) -> np.ndarray:
    """Contract sites 1..upto (all left-normalized) into (configs, bond)."""
    acc = np.ones((1, 1))
    for t in mps.tensors[:upto]:
        l, d, r, _ = t.shape
        acc = np.einsum("ca,adr->cdr", acc, t[..., 0]).reshape(-1, r)
    return acc


def _right_block(mps: BundledMPS, start: int) -> np.ndarray:
    """Contract sites start..N (all right-normalized) into (bond, configs)."""
    acc = np.ones((1, 1))
    for t in reversed(mps.tensors[start - 1:]):
        l, d, r, _ = t.shape
        acc = np.einsum("ldr,rc->ldc", t[..., 0], acc).reshape(l, -1)
    return acc


def bond_decomposition(mps: BundledMPS, bond: int) -> BondData:
    """Schmidt decomposition at bond ``bond`` (between sites bond, bond+1).

    The xi leg is folded into the right index group.  Left basis vectors are
    sign-fixed on the full ``d^bond`` configuration space.
    """
    n = mps.n_sites
    if not 1 <= bond <= n - 1:
        raise ValidationError(f"bond {bond} outside 1..{n - 1}")
    gauged = gauge_center(mps, bond)
    t = gauged.center_tensor
    l, d, r, g = t.shape
    dec = svd(t.reshape(l * d, r * g))
    keep = dec.s > 0.0
    keep[0] = True
    s = dec.s[keep]
    u_loc = dec.u[:, keep]
    v_loc = dec.v[:, keep].reshape(r, g, -1)
    left = _left_block(gauged, bond - 1)
    u = np.einsum("ca,adk->cdk", left, u_loc.reshape(l, d, -1)).reshape(-1, s.size)
    right = _right_block(gauged, bond + 1)
    v = np.einsum("rc,rxk->cxk", right, v_loc).reshape(-1, s.size)
    signs = sign_fix(u)
    return BondData(bond, u * signs, s, v * signs)
