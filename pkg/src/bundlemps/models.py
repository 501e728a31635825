"""Spin-chain Hamiltonians built from Pauli strings, plus full spectra.

Conventions: site 1 is the leftmost Kronecker factor, ``|up> = (1, 0)`` is
the +1 eigenvector of sigma^z, and ``S+ = [[0, 1], [0, 0]]`` raises a down
spin.  Boundaries are open.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from .errors import PhaseError, ValidationError
from .linalg import sym_eig

MAX_SITES = 14

# iY = i*sigma^y is real; sigma^y factors are tracked as iY plus a phase
_SINGLE_SITE = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "iy": np.array([[0.0, 1.0], [-1.0, 0.0]]),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]]),
    "plus": np.array([[0.0, 1.0], [0.0, 0.0]]),
    "minus": np.array([[0.0, 0.0], [1.0, 0.0]]),
    "identity": np.eye(2),
}
_ALIASES = {"i": "identity", "id": "identity", "+": "plus", "-": "minus"}

PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    sites: int
    transverse_field: float | None = None
    anisotropy: float | None = None
    boundary: str = "open"

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in ("tfim", "xxz"):
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if not 1 <= self.sites <= MAX_SITES:
            raise ValidationError(f"sites must be in 1..{MAX_SITES}, got {self.sites}")
        if kind == "tfim" and self.transverse_field is None:
            raise ValidationError("a TFIM spec needs transverse_field")
        if kind == "xxz" and self.anisotropy is None:
            raise ValidationError("an XXZ spec needs anisotropy")
        if self.boundary != "open":
            raise ValidationError("only open boundaries are supported")

    @property
    def dim(self) -> int:
        return 2**self.sites

    def key(self) -> str:
        """Filesystem-safe identifier used for cache file names."""
        if self.kind == "tfim":
            return f"tfim_N{self.sites}_hx{self.transverse_field!r}"
        return f"xxz_N{self.sites}_delta{self.anisotropy!r}"


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    spec: ModelSpec
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class Spectrum:
    model: ModelSpec
    energies: np.ndarray
    states: np.ndarray

    @property
    def size(self) -> int:
        return self.energies.shape[0]

    def _column(self, k: int) -> int:
        if not 1 <= k <= self.size:
            raise ValidationError(f"state index {k} outside 1..{self.size}")
        return k - 1

    def state(self, k: int) -> np.ndarray:
        """Eigenvector of the k-th lowest energy (1-based)."""
        return self.states[:, self._column(k)]

    def energy(self, k: int) -> float:
        return float(self.energies[self._column(k)])

    def bundle(self, indices) -> np.ndarray:
        """The ``2^N x g`` matrix whose columns are the requested states."""
        cols = [self._column(k) for k in indices]
        if not cols:
            raise ValidationError("empty bundle")
        return np.ascontiguousarray(self.states[:, cols])


def _normalize_factors(factors, n: int):
    seen = set()
    out = []
    for site, op in factors:
        name = _ALIASES.get(str(op).lower(), str(op).lower())
        if name not in ("x", "y", "z", "plus", "minus", "identity"):
            raise ValidationError(f"unknown single-site operator {op!r}")
        if not 1 <= site <= n:
            raise ValidationError(f"site {site} outside 1..{n}")
        if site in seen:
            raise ValidationError(f"site {site} appears twice")
        seen.add(site)
        out.append((site, name))
    return dict(out)


def _kron_chain(mats):
    out = sps.identity(1, format="csr", dtype=mats[0].dtype)
    for m in mats:
        out = sps.kron(out, sps.csr_matrix(m), format="csr")
    return out


def pauli_string_sparse(factors, n: int, real: bool = True):
    """Sparse version of :func:`pauli_string`."""
    ops = _normalize_factors(factors, n)
    n_y = sum(1 for name in ops.values() if name == "y")
    if real:
        if n_y % 2:
            raise PhaseError("odd number of y factors gives an imaginary operator")
        mats = [_SINGLE_SITE["iy" if ops.get(i) == "y" else ops.get(i, "identity")]
                for i in range(1, n + 1)]
        # sigma^y = -i (i sigma^y), so k factors carry (-i)^k = (-1)^(k/2)
        return _kron_chain(mats) * (-1.0) ** (n_y // 2)
    mats = [PAULI_Y if ops.get(i) == "y" else _SINGLE_SITE[ops.get(i, "identity")]
            for i in range(1, n + 1)]
    return _kron_chain([m.astype(complex) for m in mats])


def pauli_string(factors, n: int, real: bool = True) -> np.ndarray:
    """Dense ``2^n x 2^n`` Kronecker product of single-site operators.

    ``factors`` is an iterable of ``(site, op)`` with 1-based sites and ``op``
    one of ``x, y, z, plus, minus, identity``.  Unlisted sites get the
    identity.  With ``real=True`` (default) an odd number of ``y`` factors
    raises :class:`PhaseError`; pass ``real=False`` for a complex result.
    """
    return pauli_string_sparse(factors, n, real=real).toarray()


def _check_chain(n: int):
    if n < 2:
        raise ValidationError(f"a chain needs at least 2 sites, got {n}")
    if n > MAX_SITES:
        raise ValidationError(f"at most {MAX_SITES} sites are supported, got {n}")


def build_tfim(n: int, hx: float) -> Hamiltonian:
    """``H = sum_i sz_i sz_{i+1} + hx sum_i sx_i`` with open boundaries."""
    _check_chain(n)
    h = sps.csr_matrix((2**n, 2**n))
    for i in range(1, n):
        h = h + pauli_string_sparse([(i, "z"), (i + 1, "z")], n)
    for i in range(1, n + 1):
        h = h + hx * pauli_string_sparse([(i, "x")], n)
    spec = ModelSpec("tfim", n, transverse_field=float(hx))
    return Hamiltonian(spec, h.toarray())


def build_xxz(n: int, delta: float = 1.0) -> Hamiltonian:
    """``H = sum_i Sx Sx + Sy Sy + delta Sz Sz`` on neighbours, S = sigma/2."""
    _check_chain(n)
    h = sps.csr_matrix((2**n, 2**n))
    for i in range(1, n):
        hop = (pauli_string_sparse([(i, "plus"), (i + 1, "minus")], n)
               + pauli_string_sparse([(i, "minus"), (i + 1, "plus")], n))
        h = h + 0.5 * hop + 0.25 * delta * pauli_string_sparse([(i, "z"), (i + 1, "z")], n)
    spec = ModelSpec("xxz", n, anisotropy=float(delta))
    return Hamiltonian(spec, h.toarray())


def build(spec: ModelSpec) -> Hamiltonian:
    if spec.kind == "tfim":
        return build_tfim(spec.sites, spec.transverse_field)
    return build_xxz(spec.sites, spec.anisotropy)


def full_spectrum(ham: Hamiltonian) -> Spectrum:
    eig = sym_eig(ham.matrix)
    return Spectrum(ham.spec, eig.eigenvalues, eig.eigenvectors)


@lru_cache(maxsize=None)
def lowering_operators(n: int):
    """Sparse S-_j for j = 1..n (cached; used by the RDM operator form)."""
    return tuple(pauli_string_sparse([(j, "minus")], n) for j in range(1, n + 1))


@lru_cache(maxsize=None)
def raising_operators(n: int):
    return tuple(pauli_string_sparse([(j, "plus")], n) for j in range(1, n + 1))


def total_sz(n: int) -> np.ndarray:
    """Dense ``sum_i S^z_i``."""
    out = sps.csr_matrix((2**n, 2**n))
    for i in range(1, n + 1):
        out = out + 0.5 * pauli_string_sparse([(i, "z")], n)
    return out.toarray()
