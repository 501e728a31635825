"""Experiment drivers shared by the command line and the scripts.

Figure presets reproduce the bundle pairs of the overlap heatmaps: 12-site
TFIM at h_x = 0.01 (``fig3``) and h_x = 1 (``fig4``), and the 12-site
Heisenberg chain (``fig5``).
"""

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .density import (connecting_unitary, natural_orbitals, one_body_rdm,
                      relative_truncation, similarity_classifier, smallest_rank,
                      truncation_error)
from .energy import (LocalCouplings, MetricReport, energy_difference_truncated,
                     frobenius_bound_check, metric_axiom_suite)
from .errors import CacheIntegrityError, ResourceError, TraceMismatchError, ValidationError
from .models import MAX_SITES, ModelSpec, Spectrum, build, full_spectrum
from .mps import bundled_mps_from_vectors
from .overlap import (DEFAULT_CUTOFF, DEFAULT_FLOOR_LOG10, DEFAULT_THRESHOLD_LOG10,
                      OverlapMatrix, TruncatabilityReport, log_abs_matrix,
                      truncatability_report, weighted_overlap)

log = logging.getLogger(__name__)


def _r(a, b):
    return tuple(range(a, b + 1))


_ISING_PAIRS = {
    "a": ((1, 2), (1, 3)),
    "b": ((1, 2), (29, 30)),
    "c": ((1, 2), (4095, 4096)),
    "d": ((28, 29), (29, 30)),
    "e": ((4095, 4096), (4093, 4094)),
}

PRESETS = {}
for _panel, _pair in _ISING_PAIRS.items():
    PRESETS[f"fig3{_panel}"] = (ModelSpec("tfim", 12, transverse_field=0.01), *_pair)
    PRESETS[f"fig4{_panel}"] = (ModelSpec("tfim", 12, transverse_field=1.0), *_pair)
for _panel, _pair in {
    "a": (_r(1, 10), _r(11, 20)),
    "b": (_r(2048, 2058), _r(1, 10)),
    "c": (_r(2048, 2058), _r(2059, 2068)),
    "d": (_r(4086, 4096), _r(4076, 4085)),
}.items():
    PRESETS[f"fig5{_panel}"] = (ModelSpec("xxz", 12, anisotropy=1.0), *_pair)


def preset_panels(name: str) -> list[str]:
    """Expand ``fig3`` into ``fig3a..fig3e``; a panel name maps to itself."""
    if name in PRESETS:
        return [name]
    panels = sorted(p for p in PRESETS if p.startswith(name) and len(p) == len(name) + 1)
    if not panels:
        raise ValidationError(f"unknown preset {name!r}; choose from fig3, fig4, fig5 or a panel")
    return panels


def default_cache_dir() -> Path:
    return Path(os.environ.get("BUNDLEMPS_CACHE", Path.home() / ".cache" / "bundlemps"))


class SpectrumCache:
    """Full spectra keyed by model parameters, stored as SPEC1 files."""

    def __init__(self, directory=None, enabled: bool = True):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.enabled = enabled
        self._memory: dict[ModelSpec, Spectrum] = {}

    def path(self, model: ModelSpec) -> Path:
        return self.directory / f"{model.key()}.spec1"

    def get(self, model: ModelSpec) -> Spectrum:
        if model.sites > MAX_SITES:
            raise ResourceError(f"{model.sites} sites exceed the dense limit of {MAX_SITES}")
        if model in self._memory:
            return self._memory[model]
        path = self.path(model)
        spec = None
        if self.enabled and path.exists():
            spec = io.load_spectrum(path)
            if spec.model != model:
                raise CacheIntegrityError(f"{path}: cached model {spec.model} != {model}")
        if spec is None:
            log.info("diagonalizing %s (dimension %d)", model.key(), model.dim)
            spec = full_spectrum(build(model))
            if self.enabled:
                io.save_spectrum(spec, path)
        self._memory[model] = spec
        return spec


def middle_bond(n: int) -> int:
    return n // 2


@dataclass
class OverlapResult:
    gamma: OverlapMatrix
    report: TruncatabilityReport
    log_matrix: np.ndarray
    energies_a: list
    energies_b: list
    notes: list = field(default_factory=list)


def run_overlap(spectrum: Spectrum, bundle_a, bundle_b, bond: int | None = None,
                cutoff: float = DEFAULT_CUTOFF,
                threshold_log10: float = DEFAULT_THRESHOLD_LOG10,
                floor_log10: float = DEFAULT_FLOOR_LOG10) -> OverlapResult:
    """Build both bundles at zero cutoff and compare them at ``bond``."""
    n = spectrum.model.sites
    bond = middle_bond(n) if bond is None else bond
    mps_a = bundled_mps_from_vectors(spectrum.bundle(bundle_a), 0.0, state_indices=bundle_a)
    mps_b = bundled_mps_from_vectors(spectrum.bundle(bundle_b), 0.0, state_indices=bundle_b)
    gamma = weighted_overlap(mps_a, mps_b, bond)
    report = truncatability_report(gamma, cutoff, threshold_log10)
    return OverlapResult(gamma, report, log_abs_matrix(gamma, floor_log10),
                         [spectrum.energy(k) for k in bundle_a],
                         [spectrum.energy(k) for k in bundle_b])


def overlap_report_text(model: ModelSpec, result: OverlapResult, threshold_log10: float,
                        floor_log10: float) -> str:
    g = result.gamma
    lines = [f"model: {model.key()}", f"bond: {g.bond}",
             f"bundle A: {list(g.bundle_a)}", f"bundle B: {list(g.bundle_b)}"]
    lines += [f"note: {n}" for n in result.notes]
    lines += [f"energies A: {' '.join(format(e, '.12g') for e in result.energies_a)}",
              f"energies B: {' '.join(format(e, '.12g') for e in result.energies_b)}",
              f"high-weight threshold (log10): {threshold_log10:g}",
              f"heatmap floor (log10): {floor_log10:g}",
              result.report.summary()]
    return "\n".join(lines) + "\n"


def write_overlap_outputs(out_dir, model: ModelSpec, result: OverlapResult,
                          threshold_log10: float, floor_log10: float):
    out = Path(out_dir)
    io.write_csv(result.gamma.entries, out / "gamma.csv")
    io.write_csv(result.log_matrix, out / "gamma_log10.csv")
    io.write_pgm(result.log_matrix, out / "gamma.pgm", floor_log10,
                 comment=f"log10|Gamma| {model.key()} bond {result.gamma.bond}")
    io.atomic_write(out / "report.txt",
                    overlap_report_text(model, result, threshold_log10, floor_log10))


def preset_notes(bundle_a, bundle_b) -> list[str]:
    notes = []
    for label, b in (("A", bundle_a), ("B", bundle_b)):
        if len(b) not in (2, 10):
            notes.append(f"bundle {label} has {len(b)} states; index ranges are taken "
                         "verbatim from the figure labels although groups of 10 are described")
    return notes


# --- pairwise metrics -------------------------------------------------------

METRIC_COLUMNS = ["alpha", "beta", "delta_alpha", "delta_beta", "r", "abs_dE_exact",
                  "dE_m", "frob_lhs", "frob_rhs", "frob_holds", "off_block_mass", "verdict"]


@dataclass
class MetricsResult:
    basis_state: int
    m: int
    rows: list
    r_report: MetricReport | None
    energy_report: MetricReport | None
    truncated_energy_report: MetricReport | None

    def table_csv(self) -> str:
        lines = [",".join(METRIC_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(
                format(row[c], ".17g") if isinstance(row[c], float) else str(row[c])
                for c in METRIC_COLUMNS))
        return "\n".join(lines) + "\n"

    def report_text(self) -> str:
        parts = [f"basis state: {self.basis_state}", f"m: {self.m}"]
        for title, rep in (("relative truncation r", self.r_report),
                           ("|E_a - E_b| (exact)", self.energy_report),
                           ("|dE_m| (truncated, recorded only)", self.truncated_energy_report)):
            parts.append(f"[{title}]")
            parts.append("skipped (fewer than three states)" if rep is None else rep.summary())
        return "\n".join(parts) + "\n"


def run_metrics(spectrum: Spectrum, states, basis_state: int | None = None,
                m: int | None = None, couplings: LocalCouplings | None = None,
                ultralocal: bool = True, similarity_tol: float = 0.1) -> MetricsResult:
    """Pairwise truncation / energy metrics for one-body RDMs of ``states``."""
    states = list(states)
    if not states:
        raise ValidationError("need at least one state")
    basis_state = states[0] if basis_state is None else basis_state
    rdms = {k: one_body_rdm(spectrum.state(k)) for k in set(states) | {basis_state}}
    basis = natural_orbitals(rdms[basis_state], source_state=basis_state)
    if m is None:
        m = smallest_rank(rdms[basis_state], basis)
    deltas = {k: truncation_error(rdms[k], basis, m) for k in states}
    nos = {k: natural_orbitals(rdms[k], source_state=k) for k in states}

    def r(a, b):
        return relative_truncation(deltas[a], deltas[b])

    def de_exact(a, b):
        return abs(spectrum.energy(a) - spectrum.energy(b))

    def de_m(a, b):
        return abs(energy_difference_truncated(rdms[a], rdms[b], basis, m, couplings, ultralocal))

    rows = []
    for a, b in itertools.combinations(states, 2):
        bound = frobenius_bound_check(rdms[a], rdms[b], basis, m, couplings, ultralocal)
        try:
            u = connecting_unitary(nos[a], nos[b])
            k = min(max(m, 1), basis.dim - 1)
            verdict = similarity_classifier(u, k, similarity_tol)
            mass, label = verdict.off_block_mass, verdict.verdict
        except TraceMismatchError:
            mass, label = float("nan"), "n/a (trace mismatch)"
        rows.append({
            "alpha": a, "beta": b,
            "delta_alpha": deltas[a].value, "delta_beta": deltas[b].value,
            "r": r(a, b), "abs_dE_exact": de_exact(a, b),
            "dE_m": energy_difference_truncated(rdms[a], rdms[b], basis, m, couplings, ultralocal),
            "frob_lhs": bound.lhs, "frob_rhs": bound.rhs, "frob_holds": bound.holds,
            "off_block_mass": mass, "verdict": label,
        })
    reports = (None, None, None)
    if len(states) >= 3:
        reports = (metric_axiom_suite(states, r), metric_axiom_suite(states, de_exact),
                   metric_axiom_suite(states, de_m))
    return MetricsResult(basis_state, m, rows, *reports)
