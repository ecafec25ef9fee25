import itertools

import numpy as np
import pytest

from hrmod.errors import BadIndexSets, CriterionDisagreement, Disconnected, TooLarge, UnsupportedSize
from hrmod.generate import planted_variogram, random_connected_graph, random_points_variogram
from hrmod.graphs import MarkovGraph
from hrmod.independence import (
    CIStatement,
    Verdict,
    _combine,
    check_global_markov,
    ci_general_mhr,
    ci_sigma2,
    ci_singleton,
    four_cycle_q,
    is_emtp2,
    pairwise_markov_graph,
    separated_triples,
    spanning_trees,
)
from hrmod.model import fiedler_bapat, variogram_from_precision
from hrmod.setfunctions import modularity_gap
from hrmod.tolerance import Zero

from conftest import C4_GAMMA, C4_THETA, EQUILATERAL, PATH3_GAMMA


def test_statement_validation():
    s = CIStatement([3, 1], (0,), {2})
    assert s.A == (1, 3) and s.C == (2,)
    with pytest.raises(BadIndexSets):
        CIStatement((0,), (0,), (1,))
    with pytest.raises(BadIndexSets):
        CIStatement((0,), (1,), ())
    with pytest.raises(BadIndexSets):
        CIStatement((0,), (1,), (5,)).check_dim(4)


# -- singleton ---------------------------------------------------------------


def test_singleton_four_cycle():
    v = ci_singleton(C4_GAMMA, 0, 2, [1, 3])
    assert v.verdict is Verdict.HOLDS and v.holds is True
    assert v.method == "singleton-4way"
    assert all(abs(r) <= 1e-12 for r in v.diagnostics["residuals"].values())
    assert "note" in v.diagnostics


def test_singleton_path():
    v = ci_singleton(PATH3_GAMMA, 0, 2, [1])
    assert v.holds is True


def test_singleton_equilateral_fails():
    v = ci_singleton(EQUILATERAL, 0, 1, [2])
    assert v.holds is False
    assert all(abs(r) > 1e-3 for r in v.diagnostics["residuals"].values())


def test_singleton_proper_margin():
    # path 1-2-3-4-5: Y1 _||_ Y3 | Y2 holds inside a larger model
    G = variogram_from_precision(MarkovGraph.path(5).laplacian()).gamma
    v = ci_singleton(G, 0, 2, [1])
    assert v.holds is True and "note" not in v.diagnostics
    assert ci_singleton(G, 0, 3, [2]).holds is True
    assert ci_singleton(G, 0, 3, [4]).holds is False


def test_singleton_planted_zeros():
    for seed in range(15):
        graph = random_connected_graph(6, seed=seed, extra_edge_prob=0.5)
        var, _ = planted_variogram(graph, seed=seed)
        rest_all = set(range(6))
        for i, j in itertools.combinations(range(6), 2):
            if (i, j) in graph.edges:
                continue
            C = tuple(sorted(rest_all - {i, j}))
            v = ci_singleton(var, i, j, C)
            assert v.holds is True
            assert all(abs(r) <= 1e-9 for r in v.diagnostics["residuals"].values())


def test_combine_disagreement():
    with pytest.raises(CriterionDisagreement) as info:
        _combine({"a": Zero.ZERO, "b": Zero.NONZERO}, {"a": 0.0, "b": 1.0}, "test")
    assert info.value.residuals == {"a": 0.0, "b": 1.0}
    assert _combine({"a": Zero.ZERO, "b": Zero.BAND}, {}, "") is Verdict.INDETERMINATE


def test_indeterminate_band():
    # the gap here is about 0.144: inside (tol, 10 tol) for tol = 0.1
    v = ci_general_mhr(C4_GAMMA, CIStatement((0,), (1,), (2, 3)), tol=1e-1)
    assert v.verdict is Verdict.INDETERMINATE and v.holds is None


# -- general m_HR criterion --------------------------------------------------


def test_general_four_cycle():
    assert ci_general_mhr(C4_GAMMA, CIStatement((0,), (2,), (1, 3))).holds is True
    assert ci_general_mhr(C4_GAMMA, CIStatement((1,), (3,), (0, 2))).holds is True
    v = ci_general_mhr(C4_GAMMA, CIStatement((0,), (1,), (2, 3)))
    assert v.holds is False and v.diagnostics["residuals"]["mhr_gap"] > 0


def test_general_bowtie():
    # two triangles sharing the middle vertex
    graph = MarkovGraph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])
    G = variogram_from_precision(graph.laplacian()).gamma
    assert ci_general_mhr(G, CIStatement((0, 1), (3, 4), (2,))).holds is True
    assert ci_general_mhr(G, CIStatement((0, 1), (3, 4), (2,))).diagnostics["values"]["C"] == 0.0
    assert ci_general_mhr(G, CIStatement((0,), (1,), (2,))).holds is False


def test_general_marginal_invariance():
    for seed in range(10):
        graph = random_connected_graph(6, seed=seed, extra_edge_prob=0.2)
        var, _ = planted_variogram(graph, seed=seed)
        G = var.gamma
        for A, B, C in [((0,), (1,), (2, 3)), ((0, 4), (5,), (1,)), ((2,), (3,), (0, 1, 5))]:
            full = ci_general_mhr(G, CIStatement(A, B, C))
            I = tuple(sorted(A + B + C))
            pos = {v: k for k, v in enumerate(I)}
            sub = G[np.ix_(I, I)]
            m = lambda S: tuple(pos[v] for v in S)
            marg = ci_general_mhr(sub, CIStatement(m(A), m(B), m(C)))
            assert full.verdict is marg.verdict


def _triples(d):
    for labels in itertools.product(range(4), repeat=d):
        A = tuple(v for v in range(d) if labels[v] == 1)
        B = tuple(v for v in range(d) if labels[v] == 2)
        C = tuple(v for v in range(d) if labels[v] == 3)
        if A and B and C:
            yield A, B, C


def test_decomposition_and_method_agreement():
    for seed in range(6):
        d = 4 + seed % 2
        graph = random_connected_graph(d, seed=seed, extra_edge_prob=0.3)
        var, _ = planted_variogram(graph, seed=seed)
        for A, B, C in _triples(d):
            s = CIStatement(A, B, C)
            general = ci_general_mhr(var, s)
            pieces = [ci_singleton(var, i, j, C).verdict for i in A for j in B]
            assert (general.verdict is Verdict.HOLDS) == all(p is Verdict.HOLDS for p in pieces)
            sv = ci_sigma2(var, s)
            if sv.applicability["applicable"]:
                assert sv.verdict is general.verdict


# -- sigma2 criterion --------------------------------------------------------


def test_sigma2_four_cycle():
    v = ci_sigma2(C4_GAMMA, CIStatement((0,), (2,), (1, 3)))
    assert v.holds is True
    assert v.applicability == {
        "emtp2OnMargin": True,
        "pPositiveOnMargin": True,
        "pNonnegativeOnMargin": True,
        "applicable": True,
    }


def test_sigma2_signed_instance_indeterminate():
    T = np.array([[3.0, -2.0, 0.5, -1.5], [-2.0, 3.0, -1.0, 0.0], [0.5, -1.0, 2.0, -1.5], [-1.5, 0.0, -1.5, 3.0]])
    G = variogram_from_precision(T).gamma
    assert not is_emtp2(T)
    v = ci_sigma2(G, CIStatement((0,), (2,), (1, 3)))
    assert v.verdict is Verdict.INDETERMINATE and v.holds is None
    assert v.applicability["emtp2OnMargin"] is False and v.applicability["applicable"] is False


def test_q_polynomials_four_cycle():
    b = fiedler_bapat(C4_GAMMA)
    assert four_cycle_q(b.theta, b.p, 0, 2) == 0.0
    assert four_cycle_q(b.theta, b.p, 1, 3) == 0.0


def test_q_polynomial_equals_sigma2_gap():
    graph = MarkovGraph.complete(4)
    for seed in range(10):
        var, theta = planted_variogram(graph, seed=seed)
        b = fiedler_bapat(var)
        for (i, j), C in [((0, 2), (1, 3)), ((1, 3), (0, 2))]:
            gap = modularity_gap(var, (i,), (j,), C, fn="sigma2").gap
            assert four_cycle_q(b.theta, b.p, i, j) == pytest.approx(gap, rel=1e-8, abs=1e-13)


# -- EMTP2 and graphs --------------------------------------------------------


def test_is_emtp2():
    assert is_emtp2(C4_THETA)
    T = C4_THETA.copy()
    T[0, 2] = T[2, 0] = 0.1
    assert not is_emtp2(T)
    T[0, 2] = T[2, 0] = 1e-12
    assert is_emtp2(T)


def test_pairwise_graph():
    g = pairwise_markov_graph(C4_GAMMA)
    assert g.edges == MarkovGraph.cycle(4).edges
    assert all(w == pytest.approx(1.0) for w in g.weights.values())
    assert pairwise_markov_graph(PATH3_GAMMA).edges == MarkovGraph.path(3).edges
    assert pairwise_markov_graph(random_points_variogram(5, seed=2)).edges == MarkovGraph.complete(5).edges


def test_global_markov_four_cycle():
    ok = check_global_markov(C4_GAMMA, MarkovGraph.cycle(4))
    assert ok.passed and ok.checked > 0
    assert ((0,), (2,), (1, 3)) in set(separated_triples(MarkovGraph.cycle(4)))
    bad = check_global_markov(C4_GAMMA, MarkovGraph.path(4))
    assert not bad.passed
    found = {(tuple(v["A"]), tuple(v["B"]), tuple(v["C"])) for v in bad.violations}
    assert ((0,), (3,), (1, 2)) in found
    assert all(v["residuals"]["mhr_gap"] > 0 for v in bad.violations)
    full = check_global_markov(C4_GAMMA, MarkovGraph.complete(4))
    assert full.passed and full.checked == 0


def test_global_markov_limits():
    G = random_points_variogram(8, seed=0).gamma
    with pytest.raises(TooLarge):
        check_global_markov(G, MarkovGraph.path(8))
    with pytest.raises(BadIndexSets):
        check_global_markov(C4_GAMMA, MarkovGraph.path(5))


def test_global_markov_report_dict():
    d = check_global_markov(C4_GAMMA, MarkovGraph.path(4)).as_dict()
    assert d["passed"] is False and d["violations"]


def test_spanning_trees():
    assert len(spanning_trees(MarkovGraph.cycle(4))) == 4
    path = MarkovGraph.path(5)
    assert spanning_trees(path) == [path.edges]
    assert len(spanning_trees(MarkovGraph.complete(4))) == 16
    assert len(spanning_trees(MarkovGraph.complete(1))) == 1
    with pytest.raises(Disconnected):
        spanning_trees(MarkovGraph.from_edges(4, [(0, 1), (2, 3)]))
    with pytest.raises(UnsupportedSize):
        spanning_trees(MarkovGraph.path(9))
