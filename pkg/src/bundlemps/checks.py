"""Invariant suites run by ``bundlemps verify``.

Each suite is a list of named checks.  A check returns normally on success
and raises (usually ``AssertionError``) on failure; the runner records the
failing invariant by name.  Quick mode stays at N <= 8; full mode adds the
12-site spectra and the figure orderings.
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .density import (DensityMatrix, connecting_unitary, natural_orbitals, one_body_rdm,
                      relative_truncation, truncation_error)
from .energy import frobenius_bound_check, metric_axiom_suite
from .errors import CacheIntegrityError, ValidationError
from .linalg import svd, sym_eig
from .models import ModelSpec, build, build_tfim, build_xxz, full_spectrum, total_sz
from .mps import (bond_decomposition, bundled_mps_from_vectors, canonical_error,
                  gauge_center, max_bond_dimension, mps_from_vector, reconstruct)
from .overlap import truncatability_report, weighted_overlap

Check = Callable[[], None]


@dataclass
class SuiteResult:
    name: str
    passed: list = field(default_factory=list)
    failed: list = field(default_factory=list)  # (check name, message)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failed


def _rng():
    return np.random.default_rng(20240611)


def _random_state(rng, n):
    v = rng.standard_normal(2**n)
    return v / np.linalg.norm(v)


def _random_density(rng, n):
    a = rng.standard_normal((n, n))
    rho = a @ a.T
    return DensityMatrix.from_matrix(rho / np.trace(rho) * n / 2)


# --- quick suites -------------------------------------------------------------

def _linalg_checks():
    def eig_residual():
        rng = _rng()
        for n in (1, 3, 8, 20):
            a = rng.standard_normal((n, n))
            a = a + a.T
            vals, vecs = sym_eig(a)
            assert np.all(np.diff(vals) >= 0), "eigenvalues not ascending"
            assert np.abs(a @ vecs - vecs * vals).max() <= 1e-10 * max(1, np.abs(a).max())
            assert np.abs(vecs.T @ vecs - np.eye(n)).max() <= 1e-12

    def svd_reconstruct():
        rng = _rng()
        for shape in ((3, 5), (6, 2), (7, 7)):
            a = rng.standard_normal(shape)
            dec = svd(a)
            assert np.abs(dec.reconstruct() - a).max() <= 1e-12
            assert np.all(np.diff(dec.s) <= 0)

    return [("eigen residual and orthonormality", eig_residual),
            ("svd reconstruction", svd_reconstruct)]


def _model_checks():
    def tfim_anchors():
        e = full_spectrum(build_tfim(2, 0.0)).energies
        assert np.array_equal(e, [-1.0, -1.0, 1.0, 1.0]), e
        e = full_spectrum(build_tfim(2, 1.0)).energies
        assert abs(e[0] + math.sqrt(5)) <= 1e-12, e

    def xxz_anchors():
        e = full_spectrum(build_xxz(2)).energies
        assert np.allclose(e, [-0.75, 0.25, 0.25, 0.25], atol=1e-12), e
        assert abs(full_spectrum(build_xxz(3)).energies[0] + 1.0) <= 1e-12

    def sum_rule():
        for n in range(2, 9):
            for ham in (build_tfim(n, 0.3), build_xxz(n)):
                vals = np.linalg.eigvalsh(ham.matrix)
                tr = np.trace(ham.matrix)
                assert abs(vals.sum() - tr) <= 1e-8 * max(1.0, abs(tr), np.abs(vals).sum())

    def field_reflection():
        for n in (3, 6):
            a = np.linalg.eigvalsh(build_tfim(n, 0.7).matrix)
            b = np.linalg.eigvalsh(build_tfim(n, -0.7).matrix)
            assert np.abs(np.sort(a) - np.sort(b)).max() <= 1e-10

    def sz_conservation():
        for n in (4, 7):
            h = build_xxz(n).matrix
            sz = total_sz(n)
            assert np.abs(h @ sz - sz @ h).max() <= 1e-12

    def eigen_pairs():
        spec = full_spectrum(build_tfim(8, 0.01))
        h = build_tfim(8, 0.01).matrix
        res = np.abs(h @ spec.states - spec.states * spec.energies).max()
        assert res <= 1e-9 * np.linalg.norm(h), res
        assert np.abs(spec.states.T @ spec.states - np.eye(256)).max() <= 1e-10

    return [("TFIM N=2 anchors", tfim_anchors), ("XXZ N=2,3 anchors", xxz_anchors),
            ("energy sum rule N<=8", sum_rule), ("TFIM h -> -h spectrum", field_reflection),
            ("XXZ total Sz conservation", sz_conservation),
            ("eigenpair residual and orthonormality", eigen_pairs)]


def _density_checks():
    def two_forms():
        rng = _rng()
        for n in range(2, 9):
            for _ in range(10):
                psi = _random_state(rng, n)
                a = one_body_rdm(psi, "operator_form").matrix
                b = one_body_rdm(psi, "contraction_form").matrix
                assert np.abs(a - b).max() <= 1e-12

    def triplet():
        psi = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
        rho = one_body_rdm(psi)
        assert np.allclose(rho.matrix, 0.5, atol=1e-15)
        occ = natural_orbitals(rho).occupations
        assert np.allclose(occ, [1.0, 0.0], atol=1e-14)

    def truncation_properties():
        rng = _rng()
        rho = one_body_rdm(_random_state(rng, 6))
        basis = natural_orbitals(rho)
        errs = [truncation_error(rho, basis, m).value for m in range(7)]
        assert all(e >= -1e-10 for e in errs)
        assert np.all(np.diff(errs) <= 1e-12), "truncation error not monotone"
        assert abs(errs[-1]) <= 1e-10

    def connecting_orthogonal():
        spec = full_spectrum(build_tfim(6, 0.3))
        a = natural_orbitals(one_body_rdm(spec.state(1)))
        b = natural_orbitals(one_body_rdm(spec.state(2)))
        if abs(a.trace - b.trace) <= 1e-8:
            u = connecting_unitary(a, b)
            assert np.abs(u.T @ u - np.eye(u.shape[0])).max() <= 1e-10

    return [("operator vs contraction RDM", two_forms), ("triplet RDM", triplet),
            ("truncation error monotone and complete", truncation_properties),
            ("connecting unitary orthogonal", connecting_orthogonal)]


def _energy_checks():
    def frobenius():
        rng = _rng()
        for _ in range(200):
            n = int(rng.integers(2, 9))
            a, b = _random_density(rng, n), _random_density(rng, n)
            basis = natural_orbitals(a)
            m = int(rng.integers(0, n + 1))
            assert frobenius_bound_check(a, b, basis, m).holds

    def axioms():
        spec = full_spectrum(build_tfim(6, 0.01))
        states = [1, 2, 3, 10, 20]
        rhos = {k: one_body_rdm(spec.state(k)) for k in states}
        basis = natural_orbitals(rhos[1], source_state=1)
        deltas = {k: truncation_error(rhos[k], basis, 3) for k in states}
        rep = metric_axiom_suite(states, lambda x, y: relative_truncation(deltas[x], deltas[y]))
        assert rep.ok, rep.summary()
        rep = metric_axiom_suite(states, lambda x, y: abs(spec.energy(x) - spec.energy(y)))
        assert rep.ok, rep.summary()

    return [("Frobenius bound on random pairs", frobenius), ("metric axioms N=6", axioms)]


def _mps_checks():
    def single_state():
        rng = _rng()
        for n in range(2, 9):
            psi = _random_state(rng, n)
            mps = mps_from_vector(psi)
            assert np.abs(reconstruct(mps)[:, 0] - psi).max() <= 1e-10
            assert mps.bond_dims == max_bond_dimension(n), (mps.bond_dims, n)

    def bundles():
        spec = full_spectrum(build_xxz(8))
        for g in (1, 2, 4, 10):
            idx = tuple(range(1, g + 1))
            mps = bundled_mps_from_vectors(spec.bundle(idx), state_indices=idx)
            for target in (1, 8, mps.center):
                moved = gauge_center(mps, target)
                assert np.abs(reconstruct(moved) - spec.bundle(idx)).max() <= 1e-9
                assert canonical_error(moved) <= 1e-10

    def schmidt_weights():
        rng = _rng()
        c = np.linalg.qr(rng.standard_normal((64, 3)))[0]
        mps = bundled_mps_from_vectors(c)
        for bond in range(1, 6):
            s = bond_decomposition(mps, bond).singular_values
            assert abs((s**2).sum() - 1.0) <= 1e-12

    return [("single-state reconstruction and bond dims", single_state),
            ("bundle reconstruction after gauge sweep", bundles),
            ("bond weights sum to one", schmidt_weights)]


def _overlap_checks():
    def self_overlap():
        spec = full_spectrum(build_tfim(8, 1.0))
        mps = bundled_mps_from_vectors(spec.bundle((1,)), state_indices=(1,))
        gamma = weighted_overlap(mps, mps, 4).entries
        assert np.abs(gamma - np.diag(np.diag(gamma))).max() <= 1e-12
        assert abs(np.trace(gamma) - 1.0) <= 1e-12

    def report_counts():
        gamma = np.array([[1.0, 1e-12], [1e-12, 1e-9]])
        rep = truncatability_report(gamma, 1e-8)
        assert (rep.kept_rows, rep.kept_cols, rep.high_weight_count) == (1, 1, 1)

    return [("Gamma(A, A) diagonal with unit trace", self_overlap),
            ("truncatability counts", report_counts)]


def _io_checks(cache_dir: Path | None):
    def spectrum_roundtrip():
        spec = full_spectrum(build_tfim(3, 0.5))
        back = io.spectrum_from_bytes(io.spectrum_to_bytes(spec))
        assert back.model == spec.model
        assert np.array_equal(back.energies, spec.energies)
        assert np.array_equal(back.states, spec.states)

    def corruption_detected():
        blob = bytearray(io.spectrum_to_bytes(full_spectrum(build_tfim(2, 0.5))))
        blob[40] ^= 0xFF
        try:
            io.spectrum_from_bytes(bytes(blob))
        except CacheIntegrityError:
            return
        raise AssertionError("flipped byte not detected")

    def cache_files_intact():
        if cache_dir is None or not cache_dir.exists():
            return
        for path in sorted(cache_dir.glob("*.spec1")):
            io.load_spectrum(path)  # raises CacheIntegrityError naming the file

    return [("SPEC1 round trip", spectrum_roundtrip),
            ("corrupted blob rejected", corruption_detected),
            ("cache integrity", cache_files_intact)]


# --- full suites ----------------------------------------------------------------

def _figure_checks(cache):
    from .experiments import run_overlap

    tfim = {hx: ModelSpec("tfim", 12, transverse_field=hx) for hx in (0.01, 1.0)}
    xxz = ModelSpec("xxz", 12, anisotropy=1.0)

    def spectra_valid():
        for model in (*tfim.values(), xxz):
            spec = cache.get(model)
            h = build(model).matrix
            tr = np.trace(h)
            assert abs(spec.energies.sum() - tr) <= 1e-8 * max(1.0, np.abs(spec.energies).sum())
            cols = [0, 1, 2047, 4095]
            res = np.abs(h @ spec.states[:, cols] - spec.states[:, cols] * spec.energies[cols]).max()
            assert res <= 1e-9 * np.linalg.norm(h), f"{model.key()}: residual {res:.2e}"

    def mps_faithful():
        spec = cache.get(tfim[0.01])
        for k in np.linspace(1, 4096, 20).astype(int):
            mps = mps_from_vector(spec.state(int(k)))
            assert np.abs(reconstruct(mps)[:, 0] - spec.state(int(k))).max() <= 1e-10
            assert mps.bond_dims == max_bond_dimension(12)

    def ising_ordering():
        for hx, model in tfim.items():
            spec = cache.get(model)
            counts = [run_overlap(spec, (1, 2), b).report.high_weight_count
                      for b in ((1, 3), (29, 30), (4095, 4096))]
            assert counts[0] <= counts[1] <= counts[2], \
                f"h_x={hx}: high-weight counts {counts} not weakly increasing"

    def criticality():
        counts = []
        for model in (tfim[0.01], tfim[1.0]):
            mps = mps_from_vector(cache.get(model).state(1))
            s = bond_decomposition(mps, 6).singular_values
            counts.append(int(np.count_nonzero(s > 1e-12)))
        assert counts[1] > counts[0], counts

    def xxz_ordering():
        spec = cache.get(xxz)
        small = run_overlap(spec, tuple(range(1, 11)), tuple(range(11, 21))).report
        large = run_overlap(spec, tuple(range(2048, 2059)), tuple(range(1, 11))).report
        assert small.truncatable_rows > large.truncatable_rows, \
            (small.truncatable_rows, large.truncatable_rows)

    return [("N=12 spectra", spectra_valid), ("N=12 MPS faithfulness", mps_faithful),
            ("Ising high-weight ordering", ising_ordering),
            ("criticality bond count", criticality), ("XXZ truncatable-row ordering", xxz_ordering)]


def suites(quick: bool = True, cache=None) -> dict[str, list]:
    cache_dir = getattr(cache, "directory", None)
    out = {
        "linalg_core": _linalg_checks(),
        "spin_models": _model_checks(),
        "density_analysis": _density_checks(),
        "energy_metrics": _energy_checks(),
        "mps_bundle": _mps_checks(),
        "overlap_analysis": _overlap_checks(),
        "io": _io_checks(cache_dir),
    }
    if not quick:
        if cache is None:
            raise ValidationError("full verification needs a spectrum cache")
        out["figures_n12"] = _figure_checks(cache)
    return out


def run_suites(quick: bool = True, cache=None, log=print) -> list[SuiteResult]:
    results = []
    for name, checks in suites(quick, cache).items():
        res = SuiteResult(name)
        t0 = time.perf_counter()
        for check_name, fn in checks:
            try:
                fn()
            except CacheIntegrityError as exc:
                res.failed.append((check_name, f"cache integrity failure: {exc}"))
            except Exception as exc:  # noqa: BLE001 - report every failure by name
                msg = str(exc) or type(exc).__name__
                res.failed.append((check_name, msg))
                if not isinstance(exc, AssertionError):
                    res.failed[-1] = (check_name, f"{type(exc).__name__}: {msg}\n"
                                      + traceback.format_exc(limit=2))
            else:
                res.passed.append(check_name)
        res.seconds = time.perf_counter() - t0
        results.append(res)
        status = "ok" if res.ok else "FAIL"
        log(f"[{status}] {name}: {len(res.passed)} passed, {len(res.failed)} failed "
            f"({res.seconds:.1f} s)")
        for check_name, msg in res.failed:
            log(f"    failed invariant: {check_name}: {msg}")
    return results
