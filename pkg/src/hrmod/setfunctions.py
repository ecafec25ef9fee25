"""The set functions m_HR and sigma2 on subsets of the index set, their
alternative representations, and modularity gaps for triples (A, B, C)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np
import scipy.linalg

from . import linalg, quadrature, trees
from .errors import BadIndexSets, NonPositiveArgument, UnsupportedSize
from .linalg import IndexSet, index_set
from .model import as_gamma, cayley_menger, emtp2_status, exponent_density, fiedler_bapat, p_sign_status
from .tolerance import Zero, classify_zero, resolve

MHR_REPS = ("definition", "cm-det", "minor-det", "pseudo-det", "integral", "spanning-tree")
SIGMA2_REPS = ("inverse-rowsum", "det-quotient", "integral", "max-quadratic", "theta-sum", "trace")

# The quadrature-based forms are verification paths only.
MHR_DEFAULT_REPS = tuple(r for r in MHR_REPS if r != "integral")
SIGMA2_DEFAULT_REPS = tuple(r for r in SIGMA2_REPS if r != "integral")

INTEGRAL_MAX_SIZE = quadrature.MAX_DIM
TREE_MAX_SIZE = trees.MAX_VERTICES


def _subset(gamma, I, allow_empty=False) -> tuple[np.ndarray, IndexSet]:
    G = as_gamma(gamma)
    return G, index_set(I, G.shape[0], allow_empty=allow_empty)


def _pick_k(I: IndexSet, k: int | None) -> int:
    """Position of ``k`` inside ``I`` (default: first element)."""
    if k is None:
        return 0
    if k not in I:
        raise ValueError(f"k={k} is not an element of {I}")
    return I.index(k)


def m_hr(gamma, I: Iterable[int] | None = None) -> float:
    """``-1/2 log(-det CM(Gamma_II))``, with ``m_hr(empty) = 0``."""
    G, I = _subset(gamma, I, allow_empty=True)
    if len(I) <= 1:
        return 0.0
    neg_det = -linalg.det(cayley_menger(G, I))
    if not neg_det > 0:
        raise NonPositiveArgument(f"-det CM is {neg_det:.3e} on {I}; not a valid variogram")
    return -0.5 * math.log(neg_det)


def m_hr_rep(gamma, I: Iterable[int] | None, rep: str, k: int | None = None) -> float:
    """m_HR through one of its equivalent representations (``|I| >= 2``).

    ``k`` selects the distinguished element for ``minor-det`` and ``integral``.
    """
    G, I = _subset(gamma, I)
    n = len(I)
    if rep not in MHR_REPS:
        raise ValueError(f"unknown m_HR representation {rep!r}")
    if n < 2:
        raise UnsupportedSize("representations need |I| >= 2")

    if rep == "definition":
        M = cayley_menger(G, I).dense()
        M[n, :n] = -1.0
        val = linalg.det_general(M)
        if not val > 0:
            raise NonPositiveArgument(f"definition determinant {val:.3e} is not positive")
        return -0.5 * math.log(val)
    if rep == "cm-det":
        return m_hr(G, I)

    if rep == "integral":
        if n > INTEGRAL_MAX_SIZE:
            raise UnsupportedSize(f"integral form supports |I| <= {INTEGRAL_MAX_SIZE}")
        kk = _pick_k(I, k)
        sub = G[np.ix_(I, I)]
        inv = linalg.inv_sym(cayley_menger(sub).dense())

        def integrand(Y):
            Z = np.column_stack([Y, np.ones(len(Y))])
            return np.exp(-0.5 * np.einsum("ni,ij,nj->n", Z, inv, Z))

        mass = quadrature.halfspace_mass_coordinate(integrand, sub, kk)
        return -math.log(mass) + (n - 1) / 2.0 * math.log(2 * math.pi)

    theta = fiedler_bapat(G, I).theta
    if rep == "minor-det":
        kk = _pick_k(I, k)
        keep = [i for i in range(n) if i != kk]
        val = linalg.det(theta[np.ix_(keep, keep)])
        if not val > 0:
            raise NonPositiveArgument(f"principal minor {val:.3e} is not positive")
        return 0.5 * math.log(val)
    if rep == "pseudo-det":
        val = linalg.pseudo_det(theta)
        return 0.5 * math.log(val) - 0.5 * math.log(n)
    # spanning-tree: signed weights -theta_ij, summed over all trees of K_n
    if n > TREE_MAX_SIZE:
        raise UnsupportedSize(f"spanning-tree form supports |I| <= {TREE_MAX_SIZE}")
    total = trees.tree_weight_sum(-theta)
    if not total > 0:
        raise NonPositiveArgument(f"spanning-tree sum {total:.3e} is not positive")
    return 0.5 * math.log(total)


def sigma2(gamma, I: Iterable[int] | None = None) -> float:
    """``1/2 (1^T Gamma_II^{-1} 1)^{-1}``; zero on singletons."""
    G, I = _subset(gamma, I)
    if len(I) == 1:
        return 0.0
    x = linalg.solve_sym(G[np.ix_(I, I)], np.ones(len(I)))
    return 0.5 / float(np.sum(x))


def max_quadratic_point(gamma, I: Iterable[int] | None = None) -> np.ndarray:
    """Maximizer of ``x^T Gamma_II x / 2`` subject to ``1^T x = 1`` (KKT solve)."""
    G, I = _subset(gamma, I)
    n = len(I)
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = G[np.ix_(I, I)]
    K[:n, n] = 1.0
    K[n, :n] = 1.0
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    return linalg.solve_sym(K, rhs)[:n]


def sigma2_rep(gamma, I: Iterable[int] | None, rep: str, k: int | None = None) -> float:
    """sigma2 through one of its equivalent representations (``|I| >= 2``)."""
    G, I = _subset(gamma, I)
    n = len(I)
    if rep not in SIGMA2_REPS:
        raise ValueError(f"unknown sigma2 representation {rep!r}")
    if n < 2:
        raise UnsupportedSize("representations need |I| >= 2")
    sub = G[np.ix_(I, I)]

    if rep == "inverse-rowsum":
        return sigma2(G, I)
    if rep == "det-quotient":
        return linalg.det(-sub / 2.0) / linalg.det(cayley_menger(sub))
    if rep == "max-quadratic":
        x = max_quadratic_point(sub)
        return 0.5 * float(x @ sub @ x)
    if rep == "integral":
        if n > INTEGRAL_MAX_SIZE:
            raise UnsupportedSize(f"integral form supports |I| <= {INTEGRAL_MAX_SIZE}")
        block = fiedler_bapat(sub)
        p = block.p
        # y = s 1 + B w, with B an orthonormal basis of p-perp rotated onto the
        # principal axes of theta restricted to p-perp; p^T y = s since p^T 1 = 1.
        B = scipy.linalg.null_space(p[None, :])
        lam, V = np.linalg.eigh(B.T @ block.theta @ B)
        B = B @ V
        mass = quadrature.halfspace_integral(
            lambda Y: exponent_density(sub, Y),
            np.ones(n),
            B,
            np.zeros(n - 1),
            12.0 / np.sqrt(lam),
        )
        return -2.0 * math.log(mass)

    theta = fiedler_bapat(sub).theta
    if rep == "theta-sum":
        kk = _pick_k(I, k)
        diff = sub[:, kk][:, None] - sub[:, kk][None, :]
        # ordered double sum counts every pair twice
        return -0.125 * float(np.sum(theta * diff**2))
    # trace
    return float(np.trace(sub @ theta @ sub)) / (4.0 * n)


def max_quadratic_probe(gamma, I: Iterable[int] | None = None, n_samples: int = 10_000, seed: int = 0) -> float:
    """Largest ``x^T Gamma_II x / 2`` over random points of ``{1^T x = 1}``."""
    G, I = _subset(gamma, I)
    sub = G[np.ix_(I, I)]
    n = len(I)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_samples, n)) * rng.exponential(size=(n_samples, 1))
    X = X - X.mean(axis=1, keepdims=True) + 1.0 / n
    return float(0.5 * np.max(np.einsum("ni,ij,nj->n", X, sub, X)))


class Modularity(str, Enum):
    MODULAR = "Modular"
    STRICTLY_NON_MODULAR = "StrictlyNonModular"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ModularityReport:
    """Four set-function values and the gap oriented so the theorem predicts ``gap >= 0``.

    For m_HR: ``gap = v(ABC) + v(C) - v(AC) - v(BC)``; for sigma2 the sign is flipped.
    """

    fn: str
    A: IndexSet
    B: IndexSet
    C: IndexSet
    v_abc: float
    v_c: float
    v_ac: float
    v_bc: float
    gap: float
    tol_used: float
    scale: float
    verdict: Modularity
    emtp2: bool | None = None
    p_positive: bool | None = None
    p_nonnegative: bool | None = None

    def as_dict(self) -> dict:
        out = {
            "fn": self.fn,
            "A": list(self.A),
            "B": list(self.B),
            "C": list(self.C),
            "values": {"ABC": self.v_abc, "C": self.v_c, "AC": self.v_ac, "BC": self.v_bc},
            "gap": self.gap,
            "tol": self.tol_used,
            "scale": self.scale,
            "verdict": self.verdict.value,
        }
        if self.fn == "sigma2":
            out.update(emtp2=self.emtp2, p_positive=self.p_positive, p_nonnegative=self.p_nonnegative)
        return out


def check_triple(A, B, C, d: int) -> tuple[IndexSet, IndexSet, IndexSet]:
    """Validate pairwise disjoint, nonempty index sets."""
    try:
        A, B, C = (index_set(X, d) for X in (A, B, C))
    except ValueError as exc:
        raise BadIndexSets(str(exc)) from exc
    if set(A) & set(B) or set(A) & set(C) or set(B) & set(C):
        raise BadIndexSets(f"sets must be pairwise disjoint: A={A} B={B} C={C}")
    return A, B, C


def modularity_gap(gamma, A, B, C, fn: str = "mhr", tol: float | None = None) -> ModularityReport:
    G = as_gamma(gamma)
    A, B, C = check_triple(A, B, C, G.shape[0])
    tol = resolve(tol)
    abc = tuple(sorted(A + B + C))
    ac = tuple(sorted(A + C))
    bc = tuple(sorted(B + C))
    extra = {}
    if fn == "mhr":
        f = m_hr
    elif fn == "sigma2":
        f = sigma2
        block = fiedler_bapat(G, abc)
        ps = p_sign_status(block.p, tol)
        extra = dict(
            emtp2=emtp2_status(block.theta, tol).holds,
            p_positive=ps.positive,
            p_nonnegative=ps.nonnegative,
        )
    else:
        raise ValueError(f"unknown set function {fn!r}")
    v_abc, v_c, v_ac, v_bc = f(G, abc), f(G, C), f(G, ac), f(G, bc)
    gap = v_abc + v_c - v_ac - v_bc
    if fn == "sigma2":
        gap = -gap
    scale = max(1.0, abs(v_abc), abs(v_c), abs(v_ac), abs(v_bc))
    verdict = {
        Zero.ZERO: Modularity.MODULAR,
        Zero.BAND: Modularity.INDETERMINATE,
        Zero.NONZERO: Modularity.STRICTLY_NON_MODULAR,
    }[classify_zero(gap, scale, tol)]
    return ModularityReport(fn, A, B, C, v_abc, v_c, v_ac, v_bc, gap, tol, scale, verdict, **extra)
