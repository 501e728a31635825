"""Bundled matrix product states for sets of excitations of spin chains.

Exact spectra of small TFIM / XXZ chains, bundled MPS with a shared
excitation leg, one-body density matrices and natural orbitals, truncation
and energy metrics, and weighted overlap matrices of Schmidt bases.
"""

from .density import (DensityMatrix, NaturalOrbitalSet, SimilarityVerdict, TruncationError,
                      connecting_unitary, natural_orbitals, off_block_mass, one_body_rdm,
                      relative_truncation, similarity_classifier, smallest_rank,
                      truncated_trace, truncation_error)
from .energy import (LocalCouplings, MetricReport, energy_difference_truncated,
                     frobenius_bound_check, metric_axiom_suite)
from .errors import (CacheIntegrityError, DimensionError, NormalizationError, PhaseError,
                     RankZeroError, ResourceError, SymmetryError, TraceMismatchError,
                     ValidationError)
from .linalg import svd, sym_eig, truncated_svd
from .models import (Hamiltonian, ModelSpec, Spectrum, build, build_tfim, build_xxz,
                     full_spectrum, pauli_string)
from .mps import (BondData, BundledMPS, bond_decomposition, bundled_mps_from_vectors,
                  gauge_center, max_bond_dimension, mps_from_vector, reconstruct)
from .overlap import (OverlapMatrix, TruncatabilityReport, log_abs_matrix,
                      truncatability_report, weighted_overlap)

__version__ = "0.1.0"
