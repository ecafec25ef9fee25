"""Decision procedures for extremal conditional independence in Hüsler-Reiss models.

Every verdict is three-valued: a residual within ``tol`` of zero means the
statement holds, one at least ``10 * tol`` away means it fails, and anything
in between is reported as indeterminate. Equivalent criteria that land on
opposite sides raise :class:`CriterionDisagreement`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from . import linalg, trees
from .errors import BadIndexSets, CriterionDisagreement, Disconnected, HRModError, TooLarge, UnsupportedSize
from .graphs import MarkovGraph, separates_nb
from .linalg import IndexSet, complement
from .model import as_gamma, cayley_menger, cm_minor, emtp2_status, fiedler_bapat
from .setfunctions import Modularity, modularity_gap
from .tolerance import Zero, classify_zero, norm_scale, resolve

DEFAULT_MAX_D = 7


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class CIStatement:
    """``Y_A`` independent of ``Y_B`` given ``Y_C`` (0-based, pairwise disjoint, nonempty)."""

    A: IndexSet
    B: IndexSet
    C: IndexSet

    def __post_init__(self):
        for name in ("A", "B", "C"):
            vals = tuple(sorted(int(x) for x in getattr(self, name)))
            if not vals:
                raise BadIndexSets(f"{name} must be nonempty")
            if len(set(vals)) != len(vals) or vals[0] < 0:
                raise BadIndexSets(f"{name} must contain distinct nonnegative indices")
            object.__setattr__(self, name, vals)
        a, b, c = set(self.A), set(self.B), set(self.C)
        if a & b or a & c or b & c:
            raise BadIndexSets(f"A={self.A}, B={self.B}, C={self.C} are not pairwise disjoint")

    def check_dim(self, d: int) -> None:
        if max(self.A + self.B + self.C) >= d:
            raise BadIndexSets(f"statement {self} out of range for dimension {d}")


@dataclass(frozen=True)
class CIVerdict:
    statement: CIStatement
    verdict: Verdict
    method: str
    diagnostics: dict = field(default_factory=dict)
    applicability: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool | None:
        """True / False, or None when indeterminate."""
        if self.verdict is Verdict.INDETERMINATE:
            return None
        return self.verdict is Verdict.HOLDS


def _combine(outcomes: dict[str, Zero], residuals: dict, context: str) -> Verdict:
    vals = set(outcomes.values())
    if Zero.ZERO in vals and Zero.NONZERO in vals:
        raise CriterionDisagreement(f"equivalent criteria disagree for {context}", residuals)
    if vals == {Zero.ZERO}:
        return Verdict.HOLDS
    if vals == {Zero.NONZERO}:
        return Verdict.FAILS
    return Verdict.INDETERMINATE


def _minor_ratio(num: np.ndarray, left: np.ndarray, right: np.ndarray) -> float:
    """``det num / sqrt(det left * det right)``: a scale-invariant residual.

    ``left`` and ``right`` are the principal minors on the row and column sets
    of ``num``; for valid models their determinants share a sign.
    """
    den = linalg.det_general(left) * linalg.det_general(right)
    if not den > 0:
        raise HRModError("principal minors have inconsistent signs; invalid model")
    return linalg.det_general(num) / np.sqrt(den)


def ci_singleton(gamma, i: int, j: int, C: Iterable[int], tol: float | None = None) -> CIVerdict:
    """Pairwise statement ``Y_i _||_ Y_j | Y_C`` via three equivalent residuals.

    * ``theta``: the ``ij`` entry of the precision block of margin ``C+i+j``,
      divided by ``sqrt(theta_ii theta_jj)``;
    * ``cm_minor``: ``det CM(Gamma_{Ci,Cj})``;
    * ``theta_minor``: ``det Theta_{-Ci,-Cj}`` of the full precision matrix.

    Minors are divided by the geometric mean of the matching principal minors.
    """
    G = as_gamma(gamma)
    d = G.shape[0]
    tol = resolve(tol)
    stmt = CIStatement((i,), (j,), tuple(C))
    stmt.check_dim(d)
    C = stmt.C

    margin = tuple(sorted(C + (i, j)))
    block = fiedler_bapat(G, margin)
    a, b = margin.index(i), margin.index(j)
    T = block.theta
    r_theta = T[a, b] / np.sqrt(T[a, a] * T[b, b])

    Ci, Cj = C + (i,), C + (j,)
    r_cm = _minor_ratio(cm_minor(G, Ci, Cj), cm_minor(G, Ci, Ci), cm_minor(G, Cj, Cj))

    theta_full = fiedler_bapat(G).theta
    rest = list(complement(C + (i, j), d))
    rows, cols = rest + [j], rest + [i]
    r_minor = _minor_ratio(
        theta_full[np.ix_(rows, cols)],
        theta_full[np.ix_(rows, rows)],
        theta_full[np.ix_(cols, cols)],
    )

    residuals = {"theta": float(r_theta), "cm_minor": float(r_cm), "theta_minor": float(r_minor)}
    outcomes = {k: classify_zero(v, 1.0, tol) for k, v in residuals.items()}
    verdict = _combine(outcomes, residuals, f"i={i}, j={j}, C={C}")
    diagnostics = {"residuals": residuals, "tol": tol}
    if len(margin) == d:
        diagnostics["note"] = "C+i+j is the full index set; theta_minor reduces to the theta entry"
    return CIVerdict(stmt, verdict, "singleton-4way", diagnostics)


class _CMDets:
    """Memoized ``det CM(Gamma_II)`` over subsets of one variogram."""

    def __init__(self, G: np.ndarray):
        self.G = G
        self._cache: dict[IndexSet, float] = {}

    def __call__(self, I: Iterable[int]) -> float:
        key = tuple(sorted(I))
        val = self._cache.get(key)
        if val is None:
            val = linalg.det(cayley_menger(self.G, key)) if len(key) > 1 else -1.0
            self._cache[key] = val
        return val


def _mhr_verdict(stmt: CIStatement, dets: _CMDets, tol: float) -> CIVerdict:
    A, B, C = stmt.A, stmt.B, stmt.C
    d_abc, d_c, d_ac, d_bc = dets(A + B + C), dets(C), dets(A + C), dets(B + C)
    if not (d_abc < 0 and d_c < 0 and d_ac < 0 and d_bc < 0):
        raise HRModError("Cayley-Menger determinants must be negative for a valid variogram")
    m = {k: -0.5 * np.log(-v) for k, v in (("ABC", d_abc), ("C", d_c), ("AC", d_ac), ("BC", d_bc))}
    gap = m["ABC"] + m["C"] - m["AC"] - m["BC"]
    scale = max(1.0, *(abs(v) for v in m.values()))
    left, right = d_abc * d_c, d_ac * d_bc
    corollary = (left - right) / max(abs(left), abs(right))

    residuals = {"mhr_gap": float(gap), "mhr_scale": scale, "cm_det_product": float(corollary)}
    outcomes = {
        "mhr_gap": classify_zero(gap, scale, tol),
        "cm_det_product": classify_zero(corollary, 1.0, tol),
    }
    verdict = _combine(outcomes, residuals, f"A={A}, B={B}, C={C}")
    diagnostics = {"residuals": residuals, "values": m, "tol": tol}
    return CIVerdict(stmt, verdict, "mhr-modularity", diagnostics)


def ci_general_mhr(gamma, s: CIStatement, tol: float | None = None) -> CIVerdict:
    """``Y_A _||_ Y_B | Y_C`` from the m_HR modularity gap, cross-checked with
    the determinant-product form ``det CM(ABC) det CM(C) - det CM(AC) det CM(BC)``
    (normalized by the larger of the two products)."""
    G = as_gamma(gamma)
    s.check_dim(G.shape[0])
    return _mhr_verdict(s, _CMDets(G), resolve(tol))


def ci_sigma2(gamma, s: CIStatement, tol: float | None = None) -> CIVerdict:
    """``Y_A _||_ Y_B | Y_C`` from sigma2 modularity.

    Only decided when the ABC margin is EMTP2 with ``p > 0``; otherwise the
    verdict is indeterminate. With EMTP2 and ``p >= 0`` (a zero entry) the
    gap sign is still recorded since submodularity holds there.
    """
    G = as_gamma(gamma)
    s.check_dim(G.shape[0])
    tol = resolve(tol)
    report = modularity_gap(G, s.A, s.B, s.C, fn="sigma2", tol=tol)
    applicable = bool(report.emtp2 and report.p_positive)
    applicability = {
        "emtp2OnMargin": report.emtp2,
        "pPositiveOnMargin": report.p_positive,
        "pNonnegativeOnMargin": report.p_nonnegative,
        "applicable": applicable,
    }
    diagnostics = {"report": report.as_dict(), "tol": tol}
    if report.emtp2 and report.p_nonnegative:
        diagnostics["submodular_gap_nonnegative"] = report.gap >= -tol * report.scale
    if not applicable:
        return CIVerdict(s, Verdict.INDETERMINATE, "sigma2-modularity", diagnostics, applicability)
    verdict = {
        Modularity.MODULAR: Verdict.HOLDS,
        Modularity.STRICTLY_NON_MODULAR: Verdict.FAILS,
        Modularity.INDETERMINATE: Verdict.INDETERMINATE,
    }[report.verdict]
    return CIVerdict(s, verdict, "sigma2-modularity", diagnostics, applicability)


def four_cycle_q(theta, p, i: int, j: int) -> float:
    """The reduced sigma2 modularity polynomial ``q_{ij|kl}(theta, p)`` of a
    four-variable model, for the non-adjacent pair ``(i, j)``."""
    T = np.asarray(theta, dtype=float)
    p = np.asarray(p, dtype=float)
    tij, tii, tjj = T[i, j], T[i, i], T[j, j]
    bracket = p[i] ** 2 * tij * tjj - 2 * p[i] * p[j] * tii * tjj + p[j] ** 2 * tii * tij
    return float(tij / (tii * tjj * (tii * tjj - tij**2)) * bracket)


def is_emtp2(theta, tol: float | None = None) -> bool:
    """All off-diagonal precision entries nonpositive (up to tolerance)."""
    return emtp2_status(theta, tol).holds


def pairwise_markov_graph(gamma, tol: float | None = None) -> MarkovGraph:
    """Edges where the full precision matrix is nonzero; weights ``-theta_ij``."""
    G = as_gamma(gamma)
    tol = resolve(tol)
    T = fiedler_bapat(G).theta
    scale = norm_scale(T)
    d = G.shape[0]
    weights = {}
    for i in range(d):
        for j in range(i + 1, d):
            if abs(T[i, j]) > tol * scale:
                weights[(i, j)] = float(-T[i, j])
    return MarkovGraph.from_edges(d, weights.keys(), weights)


@dataclass
class GlobalMarkovReport:
    graph_edges: list
    checked: int = 0
    violations: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "graph_edges": [list(e) for e in self.graph_edges],
            "checked": self.checked,
            "passed": self.passed,
            "violations": self.violations,
            "indeterminate": self.indeterminate,
        }


def separated_triples(graph: MarkovGraph):
    """All pairwise disjoint nonempty ``(A, B, C)`` with ``C`` separating A from B.

    Each unordered pair {A, B} appears once (``min A < min B``); order is
    lexicographic in the vertex labelling.
    """
    n = graph.n
    nb = graph.neighbors()
    for labels in itertools.product(range(4), repeat=n):
        A = tuple(v for v in range(n) if labels[v] == 1)
        B = tuple(v for v in range(n) if labels[v] == 2)
        C = tuple(v for v in range(n) if labels[v] == 3)
        if not (A and B and C) or A[0] > B[0]:
            continue
        if separates_nb(nb, A, B, C):
            yield A, B, C


def check_global_markov(
    gamma, graph: MarkovGraph, max_d: int = DEFAULT_MAX_D, tol: float | None = None
) -> GlobalMarkovReport:
    """Verify every separation statement of ``graph`` with the m_HR criterion."""
    G = as_gamma(gamma)
    d = G.shape[0]
    if graph.n != d:
        raise BadIndexSets(f"graph has {graph.n} vertices but the model has dimension {d}")
    if d > max_d:
        raise TooLarge(f"dimension {d} exceeds max_d={max_d}")
    tol = resolve(tol)
    dets = _CMDets(G)
    report = GlobalMarkovReport(graph.sorted_edges())
    for A, B, C in separated_triples(graph):
        report.checked += 1
        stmt = CIStatement(A, B, C)
        entry = {"A": list(A), "B": list(B), "C": list(C)}
        try:
            v = _mhr_verdict(stmt, dets, tol)
        except CriterionDisagreement as exc:
            entry.update(kind="disagreement", residuals=exc.residuals)
            report.violations.append(entry)
            continue
        entry["residuals"] = v.diagnostics["residuals"]
        if v.verdict is Verdict.FAILS:
            entry["kind"] = "fails"
            report.violations.append(entry)
        elif v.verdict is Verdict.INDETERMINATE:
            report.indeterminate.append(entry)
    return report


def spanning_trees(graph: MarkovGraph) -> list[frozenset]:
    """All spanning trees of ``graph`` (at most 8 vertices) as edge sets.

    The count is checked against the matrix-tree theorem.
    """
    if graph.n > trees.MAX_VERTICES:
        raise UnsupportedSize(f"spanning tree enumeration supports at most {trees.MAX_VERTICES} vertices")
    if not graph.is_connected():
        raise Disconnected("graph is not connected")
    arr = trees.trees_of_adjacency(graph.adjacency())
    out = [frozenset((int(a), int(b)) for a, b in t) for t in arr]
    unit = MarkovGraph(graph.n, graph.edges).laplacian()
    expected = linalg.pseudo_det(unit) / graph.n if graph.n > 1 else 1.0
    if round(expected) != len(out):
        raise HRModError(f"enumerated {len(out)} trees but the matrix-tree theorem gives {expected:.6g}")
    return out
