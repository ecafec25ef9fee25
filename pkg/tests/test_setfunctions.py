import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrmod.errors import BadIndexSets, UnsupportedSize
from hrmod.generate import random_points_variogram
from hrmod.model import fiedler_bapat
from hrmod.setfunctions import (
    MHR_DEFAULT_REPS,
    MHR_REPS,
    SIGMA2_DEFAULT_REPS,
    SIGMA2_REPS,
    Modularity,
    m_hr,
    m_hr_rep,
    max_quadratic_point,
    max_quadratic_probe,
    modularity_gap,
    sigma2,
    sigma2_rep,
)

from conftest import C4_GAMMA, EQUILATERAL, random_instances


def test_mhr_small_sets(c4):
    assert m_hr(c4, []) == 0.0
    assert m_hr(c4, [2]) == 0.0
    assert m_hr(c4, [0, 2]) == pytest.approx(0.0, abs=1e-15)  # Gamma_13 = 1
    assert m_hr(c4, [0, 1]) == pytest.approx(-0.5 * math.log(0.75), rel=1e-12)


def test_mhr_examples(c4, equilateral):
    assert m_hr(equilateral) == pytest.approx(-0.5 * math.log(0.75), rel=1e-12)
    assert m_hr(c4) == pytest.approx(math.log(2), rel=1e-12)


def test_sigma2_examples(c4, equilateral):
    assert sigma2(c4, [1, 3]) == pytest.approx(0.25, rel=1e-12)
    assert sigma2(c4, [0, 1, 3]) == pytest.approx(9 / 32, rel=1e-12)
    assert sigma2(c4) == pytest.approx(5 / 16, rel=1e-12)
    assert sigma2(equilateral) == pytest.approx(1 / 3, rel=1e-12)
    assert sigma2(c4, [0]) == 0.0


@pytest.mark.parametrize("rep", MHR_REPS)
def test_mhr_reps_four_cycle(rep, c4):
    I = [0, 1, 3] if rep == "integral" else None
    want = m_hr(c4, I)
    tol = 1e-3 if rep == "integral" else 1e-9
    assert m_hr_rep(c4, I, rep) == pytest.approx(want, rel=tol, abs=tol)


@pytest.mark.parametrize("rep", SIGMA2_REPS)
def test_sigma2_reps_four_cycle(rep, c4):
    I = [0, 1, 3]
    tol = 5e-2 if rep == "integral" else 1e-9
    assert sigma2_rep(c4, I, rep) == pytest.approx(9 / 32, rel=tol)


def test_spanning_tree_rep_four_cycle(c4):
    assert m_hr_rep(c4, None, "spanning-tree") == pytest.approx(0.5 * math.log(4), rel=1e-12)


def test_spanning_tree_rep_ill_conditioned():
    # signed weights with heavy cancellation between tree terms
    G = random_points_variogram(8, seed=1).gamma
    assert m_hr_rep(G, None, "spanning-tree") == pytest.approx(m_hr(G), rel=1e-9, abs=1e-9)


def test_pseudo_det_rep_equilateral(equilateral):
    # theta = (2/3)(3I - J): eigenvalues 0, 2, 2 and pseudo-determinant 4
    w = np.linalg.eigvalsh(fiedler_bapat(equilateral).theta)
    np.testing.assert_allclose(w, [0.0, 2.0, 2.0], atol=1e-12)
    assert m_hr_rep(equilateral, None, "pseudo-det") == pytest.approx(-0.5 * math.log(0.75), rel=1e-12)


def test_k_independence():
    for G in random_instances(10, dims=(3, 4, 5, 6), seed=10):
        I = tuple(range(len(G)))
        a = [m_hr_rep(G, I, "minor-det", k) for k in I]
        b = [sigma2_rep(G, I, "theta-sum", k) for k in I]
        np.testing.assert_allclose(a, a[0], rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(b, b[0], rtol=1e-10)


def test_det_quotient_hand_values(c4):
    from hrmod import linalg
    from hrmod.model import cayley_menger

    sub = c4[np.ix_([0, 1, 3], [0, 1, 3])]
    assert linalg.det(-sub / 2) == pytest.approx(-9 / 64, rel=1e-12)
    assert linalg.det(cayley_menger(sub)) == pytest.approx(-1 / 2, rel=1e-12)


def test_reps_agree_random():
    for G in random_instances(30, dims=(2, 3, 4, 5, 6), seed=11):
        d = len(G)
        for r in range(2, d + 1):
            I = tuple(range(r))
            m = m_hr(G, I)
            s = sigma2(G, I)
            for rep in MHR_DEFAULT_REPS:
                assert m_hr_rep(G, I, rep) == pytest.approx(m, rel=1e-9, abs=1e-9)
            for rep in SIGMA2_DEFAULT_REPS:
                assert sigma2_rep(G, I, rep) == pytest.approx(s, rel=1e-9)


def test_integral_reps_random_small():
    for G in random_instances(4, dims=(2, 3), seed=12):
        assert m_hr_rep(G, None, "integral") == pytest.approx(m_hr(G), abs=1e-3)
        assert sigma2_rep(G, None, "integral") == pytest.approx(sigma2(G), rel=5e-2)


def test_rep_size_limits():
    G = random_points_variogram(9, seed=1).gamma
    with pytest.raises(UnsupportedSize):
        m_hr_rep(G, None, "spanning-tree")
    with pytest.raises(UnsupportedSize):
        m_hr_rep(G, [0, 1, 2, 3], "integral")
    with pytest.raises(UnsupportedSize):
        sigma2_rep(G, [0, 1, 2, 3], "integral")
    with pytest.raises(UnsupportedSize):
        m_hr_rep(G, [0], "cm-det")
    with pytest.raises(ValueError):
        m_hr_rep(G, [0, 1], "nope")


def test_max_quadratic():
    for G in random_instances(10, dims=(3, 4, 5), seed=13):
        p = fiedler_bapat(G).p
        np.testing.assert_allclose(max_quadratic_point(G), p, rtol=1e-9, atol=1e-12)
        s = sigma2(G)
        assert 0.5 * p @ G @ p == pytest.approx(s, rel=1e-10)
        assert max_quadratic_probe(G, n_samples=10_000, seed=1) <= s + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31), st.floats(0.01, 100.0))
def test_scaling_laws(d, seed, t):
    G = random_points_variogram(d, seed=seed).gamma
    for r in range(1, d + 1):
        I = tuple(range(r))
        assert m_hr(t * G, I) == pytest.approx(m_hr(G, I) - (r - 1) / 2 * math.log(t), rel=1e-10, abs=1e-10)
        assert sigma2(t * G, I) == pytest.approx(t * sigma2(G, I), rel=1e-10)


def test_pair_reconstruction():
    for G in random_instances(20, seed=14) + [C4_GAMMA, EQUILATERAL]:
        d = len(G)
        for i, j in itertools.combinations(range(d), 2):
            assert math.exp(-2 * m_hr(G, (i, j))) == pytest.approx(G[i, j], rel=1e-12)
            assert 4 * sigma2(G, (i, j)) == pytest.approx(G[i, j], rel=1e-12)


# -- modularity --------------------------------------------------------------


def test_modularity_four_cycle_mhr(c4):
    r = modularity_gap(c4, [0], [2], [1, 3], fn="mhr")
    assert r.v_abc == pytest.approx(math.log(2))
    assert r.v_c == 0.0
    assert r.v_ac == pytest.approx(0.5 * math.log(2))
    assert r.v_bc == pytest.approx(0.5 * math.log(2))
    assert abs(r.gap) <= 1e-12
    assert r.verdict is Modularity.MODULAR


def test_modularity_four_cycle_sigma2(c4):
    r = modularity_gap(c4, [0], [2], [1, 3], fn="sigma2")
    assert (r.v_abc, r.v_c, r.v_ac, r.v_bc) == pytest.approx((5 / 16, 1 / 4, 9 / 32, 9 / 32))
    assert r.verdict is Modularity.MODULAR
    assert r.emtp2 and r.p_positive and r.p_nonnegative
    d = r.as_dict()
    assert d["verdict"] == "Modular" and d["values"]["ABC"] == pytest.approx(5 / 16)


def test_modularity_non_modular(c4):
    r = modularity_gap(c4, [0], [1], [2, 3], fn="mhr")
    assert r.gap > 0 and r.verdict is Modularity.STRICTLY_NON_MODULAR


def test_modularity_bad_sets(c4):
    with pytest.raises(BadIndexSets):
        modularity_gap(c4, [0], [0], [1])
    with pytest.raises(BadIndexSets):
        modularity_gap(c4, [0], [1], [])
    with pytest.raises(ValueError):
        modularity_gap(c4, [0], [1], [2], fn="entropy")


def _triples(d):
    for labels in itertools.product(range(4), repeat=d):
        A = tuple(v for v in range(d) if labels[v] == 1)
        B = tuple(v for v in range(d) if labels[v] == 2)
        C = tuple(v for v in range(d) if labels[v] == 3)
        if A and B and C:
            yield A, B, C


def test_generic_gaps_positive():
    G = random_points_variogram(5, seed=3).gamma
    for A, B, C in _triples(4):
        r = modularity_gap(G, A, B, C, fn="mhr")
        assert r.gap >= -1e-9 * r.scale
        assert r.verdict is Modularity.STRICTLY_NON_MODULAR


def test_supermodular_sweep_small():
    for G in random_instances(5, dims=(4, 5), seed=15):
        for A, B, C in _triples(len(G)):
            r = modularity_gap(G, A, B, C, fn="mhr")
            assert r.gap >= -1e-9 * r.scale
