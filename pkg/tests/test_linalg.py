import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from bundlemps.errors import DimensionError, RankZeroError, SymmetryError, ValidationError
from bundlemps.linalg import sign_fix, svd, sym_eig, truncated_svd

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_identity_eig():
    vals, vecs = sym_eig(np.eye(2))
    assert np.array_equal(vals, [1.0, 1.0])
    assert np.allclose(vecs.T @ vecs, np.eye(2))
    assert np.all(vecs[np.abs(vecs).argmax(axis=0), [0, 1]] > 0)


def test_pauli_x_eig():
    vals, vecs = sym_eig([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(vals, [-1.0, 1.0])
    s = 1 / np.sqrt(2)
    assert np.allclose(vecs[:, 0], [s, -s])
    assert np.allclose(vecs[:, 1], [s, s])


def test_random_64_reconstruction(rng):
    a = rng.standard_normal((64, 64))
    a = a + a.T
    vals, vecs = sym_eig(a)
    assert np.abs(a - vecs @ np.diag(vals) @ vecs.T).max() <= 1e-10
    assert np.abs(vecs.T @ vecs - np.eye(64)).max() <= 1e-12
    assert np.all(np.diff(vals) >= 0)
    resid = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    assert resid.max() <= 1e-10 * np.linalg.norm(a)


def test_eig_errors():
    with pytest.raises(DimensionError):
        sym_eig(np.ones((2, 3)))
    with pytest.raises(SymmetryError):
        sym_eig([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        sym_eig([[np.nan, 0.0], [0.0, 1.0]])


def test_eig_deterministic(rng):
    a = rng.standard_normal((30, 30))
    a = a + a.T
    v1, w1 = sym_eig(a)
    v2, w2 = sym_eig(a.copy())
    assert np.array_equal(v1, v2) and np.array_equal(w1, w2)


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)), elements=finite))
def test_psd_eigenvalues_nonnegative(b):
    a = b @ b.T
    vals, _ = sym_eig(a)
    assert vals.min() >= -1e-12 * max(1.0, np.linalg.norm(a))


def test_svd_examples():
    assert np.allclose(svd(np.diag([3.0, 2.0])).s, [3.0, 2.0])
    u = np.array([0.6, 0.8])
    v = np.array([1.0, 0.0, 0.0])
    assert np.allclose(svd(np.outer(u, v)).s, [1.0, 0.0], atol=1e-15)
    with pytest.raises(ValidationError):
        svd([[np.inf]])


def test_svd_random_40x60(rng):
    a = rng.standard_normal((40, 60))
    dec = svd(a)
    assert dec.s.size == 40
    assert np.abs(a - dec.u @ np.diag(dec.s) @ dec.v.T).max() <= 1e-11
    assert np.abs(dec.u.T @ dec.u - np.eye(40)).max() <= 1e-12
    assert np.abs(dec.v.T @ dec.v - np.eye(40)).max() <= 1e-12
    pivots = np.abs(dec.u).argmax(axis=0)
    assert np.all(dec.u[pivots, np.arange(40)] > 0)


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)), elements=finite))
def test_svd_properties(a):
    dec = svd(a)
    scale = max(1.0, np.linalg.norm(a))
    assert np.abs(a - dec.reconstruct()).max() <= 1e-11 * scale
    assert np.all(dec.s >= 0) and np.all(np.diff(dec.s) <= 0)
    assert np.allclose(svd(a.T).s, dec.s, atol=1e-12 * scale)


def test_svd_small_singular_values_preserved():
    # a Gram-matrix approach would lose everything below ~1e-8
    s = np.array([1.0, 1e-6, 1e-12, 1e-15])
    q1 = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)))[0]
    q2 = np.linalg.qr(np.random.default_rng(1).standard_normal((4, 4)))[0]
    got = svd(q1 @ np.diag(s) @ q2.T).s
    assert np.allclose(got[:3], s[:3], rtol=1e-3)


def test_orthogonal_singular_values(rng):
    q = np.linalg.qr(rng.standard_normal((12, 12)))[0]
    assert np.abs(svd(q).s - 1).max() <= 1e-12


def test_truncated_svd_examples():
    a = np.diag([1.0, 1e-3, 1e-9])
    dec, lost = truncated_svd(a, cutoff=1e-6)
    assert dec.rank == 2
    assert lost == pytest.approx(1e-18, rel=1e-9)

    b = np.random.default_rng(3).standard_normal((5, 4))
    dec, lost = truncated_svd(b)
    assert lost == 0.0
    assert np.array_equal(dec.s, svd(b).s)

    bell = np.eye(2) / np.sqrt(2)
    dec, _ = truncated_svd(bell)
    assert np.allclose(dec.s, [1 / np.sqrt(2)] * 2)


def test_truncated_svd_max_rank_and_zero():
    dec, lost = truncated_svd(np.diag([3.0, 2.0, 1.0]), max_rank=1)
    assert dec.rank == 1 and lost == pytest.approx(5.0)
    with pytest.raises(RankZeroError):
        truncated_svd(np.zeros((2, 2)))


def test_sign_fix_makes_largest_positive():
    v = np.array([[0.1, -0.9], [-0.8, 0.2]])
    fixed = v * sign_fix(v)
    assert fixed[1, 0] > 0 and fixed[0, 1] > 0
