import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrmod import linalg
from hrmod.errors import SingularBlock
from hrmod.model import cayley_menger, fiedler_bapat

from conftest import C4_GAMMA, C4_THETA, EQUILATERAL


def test_det_trivial():
    assert linalg.det(np.array([[1.0]])) == pytest.approx(1.0)


@pytest.mark.parametrize("gamma", [0.3, 1.0, 2.5])
def test_det_cm_d2(gamma):
    G = np.array([[0.0, gamma], [gamma, 0.0]])
    assert linalg.det(cayley_menger(G)) == pytest.approx(-gamma, rel=1e-12)


def test_det_cm_equilateral():
    assert linalg.det(cayley_menger(EQUILATERAL)) == pytest.approx(-0.75, rel=1e-12)


def test_det_bordered_matches_dense():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = rng.integers(1, 8)
        A = rng.normal(size=(d, d))
        M = linalg.BorderedMatrix(A + A.T, rng.normal(size=d), float(rng.normal()))
        dense = M.dense()
        assert dense.shape == (d + 1, d + 1)
        assert linalg.det(M) == pytest.approx(np.linalg.det(dense), rel=1e-12, abs=1e-12)


def test_det_singular_is_zero():
    assert abs(linalg.det(np.ones((3, 3)))) < 1e-14


def test_pseudo_det():
    assert linalg.pseudo_det(np.eye(3)) == pytest.approx(1.0)
    assert linalg.pseudo_det(C4_THETA) == pytest.approx(16.0, rel=1e-12)
    assert linalg.pseudo_det(np.zeros((3, 3))) == 1.0


def test_pseudo_det_laplacian_minor_identity():
    rng = np.random.default_rng(5)
    for _ in range(25):
        d = int(rng.integers(2, 8))
        W = rng.uniform(0.2, 2.0, size=(d, d))
        W = np.triu(W, 1)
        W = W + W.T
        L = np.diag(W.sum(axis=1)) - W
        k = int(rng.integers(d))
        keep = [i for i in range(d) if i != k]
        assert linalg.pseudo_det(L) == pytest.approx(d * np.linalg.det(L[np.ix_(keep, keep)]), rel=1e-9)


def test_schur_trivial_cases():
    M = np.array([[4.0, 1.0], [1.0, 3.0]])
    np.testing.assert_array_equal(linalg.schur_complement(M, [0, 1]), M)
    assert linalg.schur_complement(M, [0])[0, 0] == pytest.approx(4.0 - 1.0 / 3.0)


def test_schur_c4_matches_marginal_block():
    got = linalg.schur_complement(C4_THETA, [0, 1, 3])
    want = fiedler_bapat(C4_GAMMA, [0, 1, 3]).theta
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_schur_singular_block():
    M = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    with pytest.raises(SingularBlock):
        linalg.schur_complement(M, [0])


def test_schur_nested_elimination():
    rng = np.random.default_rng(11)
    for _ in range(10):
        A = rng.normal(size=(8, 8))
        M = A @ A.T + 8 * np.eye(8)
        once = linalg.schur_complement(M, [0, 1, 2])
        step = linalg.schur_complement(M, [0, 1, 2, 3, 4])
        twice = linalg.schur_complement(step, [0, 1, 2])
        np.testing.assert_allclose(twice, once, rtol=1e-10, atol=1e-10)


def test_eigen_sym_examples():
    w, _ = linalg.eigen_sym(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1.0, 2.0, 3.0])
    w, _ = linalg.eigen_sym(np.ones((3, 3)))
    np.testing.assert_allclose(w, [0.0, 0.0, 3.0], atol=1e-14)
    P = linalg.ones_complement_basis(3)
    w, _ = linalg.eigen_sym(P.T @ (-EQUILATERAL / 2) @ P)
    np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_eigen_reconstruction(d, seed):
    A = np.random.default_rng(seed).normal(size=(d, d)) * 10
    M = linalg.sym(A)
    w, V = linalg.eigen_sym(M)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(M - V @ np.diag(w) @ V.T) <= 1e-10 * max(1.0, np.linalg.norm(M))


def test_sym_is_exact():
    A = np.random.default_rng(0).normal(size=(5, 5))
    S = linalg.sym(A)
    assert np.array_equal(S, S.T)


def test_index_set():
    assert linalg.index_set([3, 1], 4) == (1, 3)
    assert linalg.index_set(None, 3) == (0, 1, 2)
    with pytest.raises(ValueError):
        linalg.index_set([0, 0], 3)
    with pytest.raises(ValueError):
        linalg.index_set([4], 3)
    with pytest.raises(ValueError):
        linalg.index_set([], 3)
    assert linalg.index_set([], 3, allow_empty=True) == ()
