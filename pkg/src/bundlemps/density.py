"""One-body reduced density matrices, natural orbitals and truncation errors.

For spin-1/2 chains the one-body RDM is ``rho_ij = <psi| S+_i S-_j |psi>``.
It is real symmetric PSD for real states and its trace is the expected
number of up spins.  Two evaluation routes are provided and must agree:
applying the operators directly, or summing amplitude products over all
spectator sites.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, TraceMismatchError, ValidationError
from .linalg import as_matrix, sym_eig
from .models import lowering_operators, raising_operators

_NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    trace: float
    basis_label: str = "site"

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise DimensionError("density matrix must be square")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise ValidationError("density matrix is not symmetric")
        if abs(float(np.trace(m)) - self.trace) > 1e-12 * scale:
            raise ValidationError("recorded trace does not match the matrix")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, basis_label: str = "site", check_psd: bool = True):
        m = as_matrix(matrix, "density matrix")
        m = 0.5 * (m + m.T)
        if check_psd and m.size and np.linalg.eigvalsh(m)[0] < -1e-10:
            raise ValidationError("density matrix has a negative eigenvalue")
        return cls(m, float(np.trace(m)), basis_label)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class NaturalOrbitalSet:
    occupations: np.ndarray
    orbitals: np.ndarray
    source_state: object = None

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    @property
    def trace(self) -> float:
        return float(self.occupations.sum())

    def handle(self, m: int):
        """Identity of the top-m subspace, used to pair truncation errors."""
        digest = hashlib.sha1(np.ascontiguousarray(self.orbitals[:, :m]).tobytes())
        return (self.source_state, m, digest.hexdigest())


@dataclass(frozen=True)
class TruncationError:
    """A truncation error tagged with the basis (state, m) it was computed in."""

    value: float
    basis: tuple

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class SimilarityVerdict:
    verdict: str
    off_block_mass: float
    m: int
    tolerance: float

    @property
    def similar(self) -> bool:
        return self.verdict == "similar"


def _check_state(state) -> tuple[np.ndarray, int]:
    psi = np.asarray(state, dtype=np.float64).ravel()
    n = int(round(np.log2(psi.size))) if psi.size else 0
    if psi.size < 2 or 2**n != psi.size:
        raise DimensionError(f"state length {psi.size} is not a power of two")
    if abs(np.linalg.norm(psi) - 1.0) > _NORM_TOL:
        raise ValidationError("state is not normalized")
    return psi, n


def _rdm_operator_form(psi, n):
    lowered = [op @ psi for op in lowering_operators(n)]
    raising = raising_operators(n)
    rho = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            rho[i, j] = psi @ (raising[i] @ lowered[j])
            rho[j, i] = rho[i, j]
    return rho


def _rdm_contraction_form(psi, n):
    w = psi.reshape((2,) * n)
    rho = np.empty((n, n))
    for i in range(n):
        single = np.moveaxis(w, i, 0).reshape(2, -1)
        rho[i, i] = single[0] @ single[0]
        for j in range(i + 1, n):
            pair = np.moveaxis(w, (i, j), (0, 1)).reshape(4, -1)
            # spectator-summed two-site matrix W[(s_i s_j), (s_i' s_j')]
            two_site = pair @ pair.T
            # <up_i down_j | W | down_i up_j>; index = 2*s_i + s_j, up = 0
            rho[i, j] = rho[j, i] = two_site[1, 2]
    return rho


def one_body_rdm(state, method: str = "operator_form", label: str = "site") -> DensityMatrix:
    """``rho_ij = <psi|S+_i S-_j|psi>`` for a normalized real state.

    ``method`` is ``"operator_form"`` (apply the operators) or
    ``"contraction_form"`` (contract amplitudes over spectator sites).
    """
    psi, n = _check_state(state)
    if method in ("operator_form", "operator"):
        rho = _rdm_operator_form(psi, n)
    elif method in ("contraction_form", "contraction"):
        rho = _rdm_contraction_form(psi, n)
    else:
        raise ValidationError(f"unknown RDM method {method!r}")
    return DensityMatrix(rho, float(np.trace(rho)), label)


def mixed_rdm(states, weights=None, label: str = "site") -> DensityMatrix:
    """Weighted sum of one-body RDMs (uniform weights 1/g by default)."""
    states = np.asarray(states, dtype=np.float64)
    g = states.shape[1]
    if weights is None:
        weights = np.full(g, 1.0 / g)
    rho = sum(w * one_body_rdm(states[:, k]).matrix for k, w in enumerate(weights))
    return DensityMatrix(rho, float(np.trace(rho)), label)


def natural_orbitals(rho: DensityMatrix, source_state=None) -> NaturalOrbitalSet:
    """Occupations (descending) and sign-fixed natural orbitals of ``rho``."""
    eig = sym_eig(rho.matrix)
    occ = eig.eigenvalues[::-1].copy()
    orb = np.ascontiguousarray(eig.eigenvectors[:, ::-1])
    return NaturalOrbitalSet(occ, orb, source_state)


def _check_rank(basis: NaturalOrbitalSet, m: int):
    if not 0 <= m <= basis.dim:
        raise ValidationError(f"m={m} outside 0..{basis.dim}")


def rotated(rho: DensityMatrix, basis: NaturalOrbitalSet, m: int | None = None) -> np.ndarray:
    """``Phi_m^T rho Phi_m``: rho written in the top-m orbitals of ``basis``."""
    if rho.dim != basis.dim:
        raise DimensionError("density matrix and basis have different dimensions")
    phi = basis.orbitals if m is None else basis.orbitals[:, :m]
    return phi.T @ rho.matrix @ phi


def truncated_trace(rho: DensityMatrix, basis: NaturalOrbitalSet, m: int) -> float:
    """``sum_{k<=m} <Phi_k|rho|Phi_k>`` over the top-m orbitals of ``basis``."""
    _check_rank(basis, m)
    if rho.dim != basis.dim:
        raise DimensionError("density matrix and basis have different dimensions")
    phi = basis.orbitals[:, :m]
    return float(np.einsum("ik,ij,jk->", phi, rho.matrix, phi))


def truncation_error(rho: DensityMatrix, basis: NaturalOrbitalSet, m: int) -> TruncationError:
    """Trace weight of ``rho`` outside the top-m orbitals of ``basis``."""
    delta = rho.trace - truncated_trace(rho, basis, m)
    if m == basis.dim:
        delta = 0.0
    return TruncationError(float(delta), basis.handle(m))


def relative_truncation(delta_a, delta_b) -> float:
    """``|delta_a - delta_b|``; tagged inputs must share the same basis."""
    if isinstance(delta_a, TruncationError) and isinstance(delta_b, TruncationError):
        if delta_a.basis != delta_b.basis:
            raise ValidationError(
                "truncation errors were evaluated in different bases "
                f"({delta_a.basis[:2]} vs {delta_b.basis[:2]})"
            )
    return abs(float(delta_a) - float(delta_b))


def smallest_rank(rho: DensityMatrix, basis: NaturalOrbitalSet, max_error: float = 1e-3) -> int:
    """Smallest m whose truncation error of ``rho`` in ``basis`` is below ``max_error``."""
    for m in range(basis.dim + 1):
        if truncation_error(rho, basis, m).value < max_error:
            return m
    return basis.dim


def connecting_unitary(phi_a: NaturalOrbitalSet, phi_b: NaturalOrbitalSet,
                       trace_tol: float = 1e-8) -> np.ndarray:
    """``U = Phi_a^T Phi_b``, defined when both density matrices share a trace."""
    if phi_a.dim != phi_b.dim:
        raise DimensionError("natural orbital sets have different dimensions")
    if abs(phi_a.trace - phi_b.trace) > trace_tol:
        raise TraceMismatchError(
            "natural orbitals are related by a unitary only for density matrices "
            f"of equal trace (got {phi_a.trace:.12g} and {phi_b.trace:.12g})"
        )
    return phi_a.orbitals.T @ phi_b.orbitals


def off_block_mass(u: np.ndarray, m: int) -> float:
    return float(np.sum(u[:m, m:] ** 2) + np.sum(u[m:, :m] ** 2))


def similarity_classifier(u, m: int, tol: float = 0.1) -> SimilarityVerdict:
    """Similar iff the unitary is nearly block diagonal ``W (+) P`` at size m."""
    u = as_matrix(u, "unitary")
    dim = u.shape[0]
    if u.shape != (dim, dim):
        raise DimensionError("unitary must be square")
    if not 0 < m < dim:
        raise ValidationError(f"m={m} must satisfy 0 < m < {dim}")
    if np.abs(u.T @ u - np.eye(dim)).max() > 1e-8:
        raise ValidationError("matrix is not orthogonal")
    mass = off_block_mass(u, m)
    return SimilarityVerdict("similar" if mass < tol else "dissimilar", mass, m, tol)
