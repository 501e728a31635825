"""Acceptance criteria, one test per criterion.

Each criterion is a plain function returning ``(passed, detail)``; the
pytest wrappers print a ``CRITERION n: PASS|FAIL`` line and then assert.
Run ``python tests/test_acceptance.py`` for the summary lines alone.
"""

import itertools
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bundlemps.cli import main as cli_main  # noqa: E402
from bundlemps.density import DensityMatrix, natural_orbitals, one_body_rdm  # noqa: E402
from bundlemps.density import relative_truncation, truncation_error  # noqa: E402
from bundlemps.energy import LocalCouplings, frobenius_bound_check, metric_axiom_suite  # noqa: E402
from bundlemps.experiments import SpectrumCache, run_overlap  # noqa: E402
from bundlemps.models import ModelSpec, build_tfim, full_spectrum  # noqa: E402
from bundlemps.mps import (bond_decomposition, bundled_mps_from_vectors, gauge_center,  # noqa: E402
                           max_bond_dimension, mps_from_vector, reconstruct)

GOLDEN = Path(__file__).parent / "golden"
TFIM_WEAK = ModelSpec("tfim", 12, transverse_field=0.01)
TFIM_CRITICAL = ModelSpec("tfim", 12, transverse_field=1.0)
XXZ = ModelSpec("xxz", 12, anisotropy=1.0)

_cache = None


def spectra():
    global _cache
    if _cache is None:
        _cache = SpectrumCache()
    return _cache


def _random_state(rng, n):
    v = rng.standard_normal(2**n)
    return v / np.linalg.norm(v)


def criterion_1():
    """Two RDM forms agree on 100 random states for each N in 2..8, under 30 s."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 9):
        for _ in range(100):
            psi = _random_state(rng, n)
            a = one_body_rdm(psi, "operator_form").matrix
            b = one_body_rdm(psi, "contraction_form").matrix
            worst = max(worst, float(np.abs(a - b).max()))
    secs = time.perf_counter() - t0
    return worst <= 1e-12 and secs < 30, f"max diff {worst:.1e}, {secs:.1f} s"


def criterion_2():
    """Zero-cutoff MPS of random and TFIM states: exact and at the maximal bond dims."""
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst, dims_ok = 0.0, True
    vectors = [_random_state(rng, 10) for _ in range(50)]
    spec = spectra().get(TFIM_WEAK)
    sampled = np.linspace(1, 4096, 20).round().astype(int)
    vectors += [spec.state(int(k)) for k in sampled]
    for psi in vectors:
        n = int(round(math.log2(psi.size)))
        mps = mps_from_vector(psi)
        worst = max(worst, float(np.abs(reconstruct(mps)[:, 0] - psi).max()))
        dims_ok &= mps.bond_dims == max_bond_dimension(n)
    secs = time.perf_counter() - t0
    ok = worst <= 1e-10 and dims_ok and secs < 120
    return ok, f"max error {worst:.1e}, bond dims maximal: {dims_ok}, {secs:.1f} s"


def criterion_3():
    """Bundles g in {1,2,4,10} reconstruct after a full sweep; left bonds match single MPS."""
    worst, left_ok = 0.0, True
    for model in (TFIM_WEAK, XXZ):
        spec = spectra().get(model)
        for g in (1, 2, 4, 10):
            for first in (1, 2000):
                idx = tuple(range(first, first + g))
                c = spec.bundle(idx)
                mps = bundled_mps_from_vectors(c, state_indices=idx)
                single = mps_from_vector(c[:, 0])
                left_ok &= mps.bond_dims[:mps.center - 1] == single.bond_dims[:mps.center - 1]
                for target in list(range(mps.center, 13)) + list(range(12, 0, -1)):
                    mps = gauge_center(mps, target)
                worst = max(worst, float(np.abs(reconstruct(mps) - c).max()))
    return worst <= 1e-9 and left_ok, f"max error {worst:.1e}, left bonds equal: {left_ok}"


def criterion_4():
    """r at (gamma=1, m=6) and |dE| over TFIM states {1,2,3,29,30} are metrics."""
    spec = spectra().get(TFIM_WEAK)
    states = [1, 2, 3, 29, 30]
    rho = {k: one_body_rdm(spec.state(k)) for k in states}
    basis = natural_orbitals(rho[1], source_state=1)
    delta = {k: truncation_error(rho[k], basis, 6) for k in states}
    rep_r = metric_axiom_suite(states, lambda x, y: relative_truncation(delta[x], delta[y]),
                               tol=1e-10)
    rep_e = metric_axiom_suite(states, lambda x, y: abs(spec.energy(x) - spec.energy(y)),
                               tol=1e-10)
    n_bad = len(rep_r.violations) + len(rep_e.violations)
    return n_bad == 0, f"violations r={len(rep_r.violations)} dE={len(rep_e.violations)}"


def criterion_5():
    """Frobenius bound on 1000 random PSD pairs and all TFIM pairs from {1,2,30,4096}."""
    rng = np.random.default_rng(505)
    n_checked = n_bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        mats = []
        for _ in range(3):
            a = rng.standard_normal((n, int(rng.integers(1, n + 1))))
            mats.append(DensityMatrix.from_matrix(a @ a.T))
        m = int(rng.integers(0, n + 1))
        couplings = LocalCouplings(rng.uniform(-2, 2, n))
        ultralocal = bool(rng.integers(0, 2))
        check = frobenius_bound_check(mats[0], mats[1], natural_orbitals(mats[2]), m,
                                      couplings, ultralocal)
        n_checked += 1
        n_bad += not check.holds
    spec = spectra().get(TFIM_WEAK)
    states = (1, 2, 30, 4096)
    rho = {k: one_body_rdm(spec.state(k)) for k in states}
    for gamma in states:
        basis = natural_orbitals(rho[gamma], source_state=gamma)
        for a, b in itertools.combinations(states, 2):
            for m in range(13):
                n_checked += 1
                n_bad += not frobenius_bound_check(rho[a], rho[b], basis, m).holds
    return n_bad == 0, f"{n_checked} checks, {n_bad} violations"


def criterion_6():
    """high_weight_count weakly increases (1,2)x(1,3) -> (1,2)x(29,30) -> (1,2)x(4095,4096)."""
    details, ok = [], True
    for model in (TFIM_WEAK, TFIM_CRITICAL):
        spec = spectra().get(model)
        counts = [run_overlap(spec, (1, 2), b).report.high_weight_count
                  for b in ((1, 3), (29, 30), (4095, 4096))]
        ok &= counts[0] <= counts[1] <= counts[2]
        details.append(f"h_x={model.transverse_field}: {counts}")
    return ok, "; ".join(details)


def criterion_7():
    """Critical ground state has more middle-bond singular values above 1e-12."""
    counts = []
    for model in (TFIM_WEAK, TFIM_CRITICAL):
        s = bond_decomposition(mps_from_vector(spectra().get(model).state(1)), 6).singular_values
        counts.append(int(np.count_nonzero(s > 1e-12)))
    return counts[1] > counts[0], f"h_x=0.01: {counts[0]}, h_x=1: {counts[1]}"


def criterion_8():
    """XXZ: small-gap pair has more truncatable rows than the large-gap pair."""
    spec = spectra().get(XXZ)
    small = run_overlap(spec, tuple(range(1, 11)), tuple(range(11, 21)), cutoff=1e-8).report
    large = run_overlap(spec, tuple(range(2048, 2059)), tuple(range(1, 11)), cutoff=1e-8).report
    ok = small.truncatable_rows > large.truncatable_rows
    return ok, f"truncatable rows {small.truncatable_rows} vs {large.truncatable_rows}"


def criterion_9():
    """fig3a gamma.csv / gamma.pgm are byte-identical across runs and to the golden files."""
    outs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("r1", "r2"):
            code = cli_main(["overlap", "--preset", "fig3a", "--out", str(Path(tmp) / run)])
            if code != 0:
                return False, f"CLI exit {code}"
            outs.append({name: (Path(tmp) / run / "fig3a" / name).read_bytes()
                         for name in ("gamma.csv", "gamma.pgm")})
    golden = {name: (GOLDEN / "fig3a" / name).read_bytes() for name in ("gamma.csv", "gamma.pgm")}
    stable = outs[0] == outs[1]
    matches = outs[0] == golden
    return stable and matches, f"run-to-run identical: {stable}, matches golden: {matches}"


def criterion_10():
    """TFIM N=2: h_x=0 spectrum exact; h_x=1 ground energy equals the 4x4 oracle."""
    e0 = full_spectrum(build_tfim(2, 0.0)).energies
    oracle = np.array([[1.0, 1.0, 1.0, 0.0],
                       [1.0, -1.0, 0.0, 1.0],
                       [1.0, 0.0, -1.0, 1.0],
                       [0.0, 1.0, 1.0, 1.0]])
    ground_oracle = np.linalg.eigvalsh(oracle)[0]
    e1 = full_spectrum(build_tfim(2, 1.0)).energies[0]
    ok = (np.array_equal(e0, [-1.0, -1.0, 1.0, 1.0]) and abs(e1 - ground_oracle) <= 1e-12
          and abs(e1 + math.sqrt(5)) <= 1e-12)
    return ok, f"h_x=0 {e0.tolist()}, ground(h_x=1) {e1:.15f} vs oracle {ground_oracle:.15f}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _line(number, ok, detail):
    return f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, capsys):
    ok, detail = CRITERIA[number - 1]()
    with capsys.disabled():
        print("\n" + _line(number, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        results.append(ok)
        print(_line(k, ok, detail), flush=True)
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
