import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bundlemps.density import (DensityMatrix, NaturalOrbitalSet, natural_orbitals, one_body_rdm,
                               relative_truncation, truncation_error)
from bundlemps.energy import (LocalCouplings, energy_difference_truncated, frobenius_bound_check,
                              metric_axiom_suite)
from bundlemps.errors import DimensionError, NormalizationError, ValidationError
from bundlemps.models import full_spectrum, pauli_string

from conftest import random_state


def random_psd(rng, n):
    a = rng.standard_normal((n, rng.integers(1, n + 1)))
    return DensityMatrix.from_matrix(a @ a.T)


def test_identical_states_give_zero(rng):
    rho = one_body_rdm(random_state(rng, 5))
    basis = natural_orbitals(rho)
    assert energy_difference_truncated(rho, rho, basis, 3) == 0.0
    assert frobenius_bound_check(rho, rho, basis, 3) == (0.0, 0.0, True)


def test_full_rank_unit_couplings_is_trace_difference(rng):
    spec = full_spectrum(_onsite_hamiltonian(np.ones(4)))
    a = one_body_rdm(random_state(rng, 4))
    b = one_body_rdm(random_state(rng, 4))
    basis = natural_orbitals(a)
    de = energy_difference_truncated(a, b, basis, 4)
    assert de == pytest.approx(a.trace - b.trace, abs=1e-12)
    assert spec.size == 16


def _onsite_hamiltonian(c):
    """``H = sum_i C_i n_i`` with ``n_i = S+_i S-_i`` (diagonal in the site basis)."""
    from bundlemps.models import Hamiltonian, ModelSpec

    n = len(c)
    h = sum(ci * pauli_string([(i + 1, "plus")], n) @ pauli_string([(i + 1, "minus")], n)
            for i, ci in enumerate(c))
    return Hamiltonian(ModelSpec("tfim", n, transverse_field=0.0), h)


def test_ultralocal_limit_is_exact_for_onsite_hamiltonian():
    c = np.array([0.3, -1.2, 0.8, 2.0, -0.4])
    spec = full_spectrum(_onsite_hamiltonian(c))
    couplings = LocalCouplings(c)
    site_basis = NaturalOrbitalSet(np.ones(5), np.eye(5), "site")
    rhos = {k: one_body_rdm(spec.state(k)) for k in (1, 7, 20, 32)}
    for a, b in itertools.permutations(rhos, 2):
        exact = spec.energy(a) - spec.energy(b)
        got = energy_difference_truncated(rhos[a], rhos[b], site_basis, 5, couplings)
        assert got == pytest.approx(exact, abs=1e-12)
        # full-block variant agrees in any orthonormal basis at m = N
        basis = natural_orbitals(rhos[a])
        full = energy_difference_truncated(rhos[a], rhos[b], basis, 5, couplings, ultralocal=False)
        assert full == pytest.approx(exact, abs=1e-12)


def test_couplings():
    c = LocalCouplings([1.0, -3.0, 2.0])
    assert c.c_max == 3.0
    assert np.array_equal(LocalCouplings.uniform(2, 0.5).values, [0.5, 0.5])
    with pytest.raises(ValidationError):
        LocalCouplings([1.0, np.nan])


def test_frobenius_errors(rng):
    a, b = random_psd(rng, 3), random_psd(rng, 3)
    basis = natural_orbitals(a)
    with pytest.raises(NormalizationError):
        frobenius_bound_check(a, b, basis, 2, LocalCouplings(np.zeros(3)))
    with pytest.raises(DimensionError):
        frobenius_bound_check(a, b, basis, 2, LocalCouplings(np.ones(4)))
    with pytest.raises(ValidationError):
        energy_difference_truncated(a, b, basis, 4)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1), st.booleans(), st.data())
def test_frobenius_bound_property(n, seed, ultralocal, data):
    rng = np.random.default_rng(seed)
    a, b, g = random_psd(rng, n), random_psd(rng, n), random_psd(rng, n)
    m = data.draw(st.integers(0, n))
    couplings = LocalCouplings(rng.uniform(-2, 2, n))
    check = frobenius_bound_check(a, b, natural_orbitals(g), m, couplings, ultralocal)
    assert check.holds
    assert check.lhs >= 0 and check.rhs >= 0


def test_axiom_suite_examples():
    pts = list(np.random.default_rng(5).standard_normal(5))
    assert metric_axiom_suite(pts, lambda x, y: abs(x - y)).ok
    rep = metric_axiom_suite([0, 1, 2], lambda x, y: (x - y) ** 2)
    assert not rep.ok
    tri = [v for v in rep.violations if v.axiom == "triangle"]
    assert any(v.points == (0, 1, 2) and v.magnitude == pytest.approx(2.0) for v in tri)
    assert rep.max_triangle_slack == pytest.approx(2.0)
    assert "violations: " in rep.summary()


def test_axiom_suite_detects_each_axiom():
    def bad(x, y):
        if x == y:
            return 1.0 if x == 0 else 0.0
        return -1.0 if (x, y) == (1, 2) else float(x + 2 * y)
    kinds = {v.axiom for v in metric_axiom_suite([0, 1, 2], bad).violations}
    assert {"identity", "nonnegativity", "symmetry"} <= kinds


def test_axiom_suite_errors():
    with pytest.raises(ValidationError):
        metric_axiom_suite([1, 2], lambda x, y: 0.0)
    with pytest.raises(ValidationError, match="NaN"):
        metric_axiom_suite([1, 2, 3], lambda x, y: math.nan)


def test_tfim_axioms_and_bounds(tfim_weak):
    states = [1, 2, 3, 29, 30]
    rho = {k: one_body_rdm(tfim_weak.state(k)) for k in states + [4096]}
    basis = natural_orbitals(rho[1], source_state=1)
    delta = {k: truncation_error(rho[k], basis, 6) for k in states}
    rep = metric_axiom_suite(states, lambda x, y: relative_truncation(delta[x], delta[y]))
    assert rep.ok, rep.summary()
    rep = metric_axiom_suite(states, lambda x, y: abs(tfim_weak.energy(x) - tfim_weak.energy(y)))
    assert rep.ok, rep.summary()

    # truncated energy difference on a low-energy set: triangle slack at round-off level
    de = metric_axiom_suite(
        states, lambda x, y: abs(energy_difference_truncated(rho[x], rho[y], basis, 6)))
    assert de.max_triangle_slack <= 1e-8 * abs(tfim_weak.energy(1))

    near = frobenius_bound_check(rho[1], rho[2], basis, 6)
    far = frobenius_bound_check(rho[1], rho[4096], basis, 6)
    assert near.holds and far.holds
    assert far.rhs > near.rhs


def test_tfim_truncated_vs_full_energy(tfim_weak):
    rho1, rho30 = one_body_rdm(tfim_weak.state(1)), one_body_rdm(tfim_weak.state(30))
    basis = natural_orbitals(rho1, source_state=1)
    m = 6
    own_delta = truncation_error(rho1, basis, m).value
    diff = (energy_difference_truncated(rho1, rho30, basis, m)
            - energy_difference_truncated(rho1, rho30, basis, 12))
    assert abs(diff) <= own_delta * 1.0 * 12
