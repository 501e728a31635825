"""Overlaps of left/right Schmidt bases and the weighted overlap matrix Gamma.

For two bundles A and B cut at the same bond,

    Gamma_kl = s_k^A <u_k^A | u_l^B> s_l^B

where u are left Schmidt vectors and s the singular values (each bundle's
xi leg folded into the right index group).  Rows or columns whose entries
are all below a cutoff can be dropped from a shared bond basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .mps import BondData, BundledMPS, bond_decomposition

# singular values below this fraction of the largest count as zero
ZERO_SINGULAR_RTOL = 1e-14
DEFAULT_CUTOFF = 1e-8
DEFAULT_THRESHOLD_LOG10 = -8.0
DEFAULT_FLOOR_LOG10 = -16.0


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    entries: np.ndarray
    bond: int
    bundle_a: tuple = ()
    bundle_b: tuple = ()
    normalization: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class TruncatabilityReport:
    cutoff: float
    kept_rows: int
    kept_cols: int
    mask: np.ndarray
    high_weight_count: int

    @property
    def truncatable_rows(self) -> int:
        return self.mask.shape[0] - self.kept_rows

    @property
    def truncatable_cols(self) -> int:
        return self.mask.shape[1] - self.kept_cols

    def summary(self) -> str:
        rows, cols = self.mask.shape
        return (f"shape: {rows} x {cols}\n"
                f"cutoff: {self.cutoff:g}\n"
                f"kept rows: {self.kept_rows} (truncatable {self.truncatable_rows})\n"
                f"kept cols: {self.kept_cols} (truncatable {self.truncatable_cols})\n"
                f"high-weight entries: {self.high_weight_count}")


def _entries(gamma) -> np.ndarray:
    return gamma.entries if isinstance(gamma, OverlapMatrix) else np.asarray(gamma, dtype=float)


def _check_pair(a: BondData, b: BondData):
    if a.bond != b.bond:
        raise ValidationError(f"bond mismatch: {a.bond} vs {b.bond}")
    if a.left_basis.shape[0] != b.left_basis.shape[0]:
        raise DimensionError("left bases live on different configuration spaces")


def left_overlap(bond_a: BondData, bond_b: BondData) -> np.ndarray:
    """``rho^(L)_kl = <u_k^A|u_l^B>`` summed over left configurations."""
    _check_pair(bond_a, bond_b)
    return bond_a.left_basis.T @ bond_b.left_basis


def right_overlap(bond_a: BondData, bond_b: BondData) -> np.ndarray:
    """``rho^(R)_kl = <v_k^A|v_l^B>``; needs equal bundle sizes."""
    _check_pair(bond_a, bond_b)
    if bond_a.right_basis.shape[0] != bond_b.right_basis.shape[0]:
        raise DimensionError("right bases differ in size (unequal bundle sizes)")
    return bond_a.right_basis.T @ bond_b.right_basis


def drop_zero_singular(bond: BondData, rtol: float = ZERO_SINGULAR_RTOL) -> BondData:
    s = bond.singular_values
    keep = s >= rtol * s[0]
    return BondData(bond.bond, bond.left_basis[:, keep], s[keep], bond.right_basis[:, keep])


def overlap_from_bonds(bond_a: BondData, bond_b: BondData) -> np.ndarray:
    return bond_a.singular_values[:, None] * left_overlap(bond_a, bond_b) * bond_b.singular_values[None, :]


def weighted_overlap(bundle_a: BundledMPS, bundle_b: BundledMPS, bond: int,
                     zero_rtol: float = ZERO_SINGULAR_RTOL) -> OverlapMatrix:
    """Gamma between two bundles at ``bond``, zero singular values removed."""
    if bundle_a.n_sites != bundle_b.n_sites:
        raise ValidationError("bundles have different numbers of sites")
    a = drop_zero_singular(bond_decomposition(bundle_a, bond), zero_rtol)
    b = drop_zero_singular(bond_decomposition(bundle_b, bond), zero_rtol)
    norm = {"a": 1.0 / np.sqrt(bundle_a.g), "b": 1.0 / np.sqrt(bundle_b.g)}
    return OverlapMatrix(overlap_from_bonds(a, b), bond, bundle_a.state_indices,
                         bundle_b.state_indices, norm)


def truncatability_report(gamma, cutoff: float = DEFAULT_CUTOFF,
                          threshold_log10: float = DEFAULT_THRESHOLD_LOG10) -> TruncatabilityReport:
    """Rows/columns with every ``|entry| < cutoff`` are discardable."""
    if cutoff <= 0:
        raise ValidationError("cutoff must be positive")
    mag = np.abs(_entries(gamma))
    mask = mag >= cutoff
    high = int(np.count_nonzero(mag > 10.0**threshold_log10))
    return TruncatabilityReport(cutoff, int(mask.any(axis=1).sum()),
                                int(mask.any(axis=0).sum()), mask, high)


def log_abs_matrix(gamma, floor_log10: float = DEFAULT_FLOOR_LOG10) -> np.ndarray:
    """``max(log10|Gamma_kl|, floor)``, zeros mapped to the floor."""
    mag = np.abs(_entries(gamma))
    out = np.full(mag.shape, float(floor_log10))
    nz = mag > 0
    out[nz] = np.maximum(np.log10(mag[nz]), floor_log10)
    return out
