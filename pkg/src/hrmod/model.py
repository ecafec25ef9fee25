"""Hüsler-Reiss parameterization: variograms, Cayley-Menger matrices and the
inverse blocks (theta, p, sigma2) for every margin.

Indices are 0-based throughout the library; the CLI translates 1-based input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import linalg
from .errors import (
    BadIndexSets,
    BadKernel,
    NonzeroDiagonal,
    NotCND,
    NotSymmetric,
    RoundTripFailure,
    SingularBlock,
    SingularCM,
)
from .linalg import BorderedMatrix, IndexSet, complement, index_set
from .tolerance import norm_scale, resolve


@dataclass(frozen=True)
class Variogram:
    """A certified variogram; build it with :func:`validate_variogram`."""

    gamma: np.ndarray

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def sub(self, I: Iterable[int] | None = None) -> np.ndarray:
        I = index_set(I, self.dim)
        return self.gamma[np.ix_(I, I)]

    @classmethod
    def from_points(cls, points) -> "Variogram":
        """Squared Euclidean distance matrix of the rows of ``points``."""
        X = np.asarray(points, dtype=float)
        sq = np.sum(X * X, axis=1)
        G = sq[:, None] + sq[None, :] - 2.0 * X @ X.T
        return validate_variogram(np.maximum(G, 0.0) * (1 - np.eye(len(X))))


def as_gamma(gamma) -> np.ndarray:
    if isinstance(gamma, Variogram):
        return gamma.gamma
    return np.asarray(gamma, dtype=float)


def validate_variogram(M, tol: float | None = None) -> Variogram:
    """Certify ``M`` as a strictly conditionally negative definite variogram.

    Raises NotSymmetric, NonzeroDiagonal or NotCND (carrying the offending
    projected eigenvalue).
    """
    tol = resolve(tol)
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"variogram must be square, got shape {A.shape}")
    d = A.shape[0]
    if d < 2:
        raise NotCND("a variogram needs dimension at least 2", eigenvalue=float("nan"))
    if not np.all(np.isfinite(A)):
        raise NotSymmetric("variogram has non-finite entries")
    scale = norm_scale(A)
    asym = float(np.max(np.abs(A - A.T)))
    if asym > tol * scale:
        raise NotSymmetric(f"max asymmetry {asym:.3e} exceeds tolerance")
    diag = float(np.max(np.abs(np.diag(A))))
    if diag > tol * scale:
        raise NonzeroDiagonal(f"max |diagonal entry| {diag:.3e} exceeds tolerance")
    G = linalg.sym(A)
    np.fill_diagonal(G, 0.0)
    P = linalg.ones_complement_basis(d)
    w = np.linalg.eigvalsh(P.T @ (-G) @ P)
    if w[0] <= tol * scale:
        raise NotCND(
            f"projected eigenvalue {w[0]:.6g} of -Gamma on 1-perp is not positive",
            eigenvalue=float(w[0]),
        )
    off = G[~np.eye(d, dtype=bool)]
    if np.any(off <= 0):  # implied by strict CND; kept as a guard
        raise NotCND("off-diagonal entries must be positive", eigenvalue=float(w[0]))
    G.setflags(write=False)
    return Variogram(G)


def cayley_menger(gamma, I: Iterable[int] | None = None) -> BorderedMatrix:
    """``[[-Gamma_II / 2, 1], [1^T, 0]]``."""
    G = as_gamma(gamma)
    I = index_set(I, G.shape[0])
    sub = G[np.ix_(I, I)]
    return BorderedMatrix(inner=-sub / 2.0, border=np.ones(len(I)), corner=0.0)


def cm_minor(gamma, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
    """The (generally non-symmetric) bordered minor ``CM(Gamma_{rows,cols})``.

    Row and column order follow the given sequences.
    """
    G = as_gamma(gamma)
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise ValueError("rows and cols must have equal length")
    n = len(rows)
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = -G[np.ix_(rows, cols)] / 2.0
    M[:n, n] = 1.0
    M[n, :n] = 1.0
    return M


@dataclass(frozen=True)
class FiedlerBapatBlock:
    """Blocks of the inverse Cayley-Menger matrix of the margin ``margin``."""

    margin: IndexSet
    theta: np.ndarray
    p: np.ndarray
    sigma2: float

    def matrix(self) -> np.ndarray:
        """The assembled ``[[theta, p], [p^T, sigma2]]``."""
        return BorderedMatrix(self.theta, self.p, self.sigma2).dense()


def _singleton_block(I: IndexSet) -> FiedlerBapatBlock:
    return FiedlerBapatBlock(I, np.zeros((1, 1)), np.ones(1), 0.0)


def fiedler_bapat(gamma, I: Iterable[int] | None = None, tol: float | None = None) -> FiedlerBapatBlock:
    """Invert ``CM(Gamma_II)`` and split it into ``(theta, p, sigma2)``.

    p and sigma2 are recomputed from ``Gamma_II^{-1} 1`` and both routes must
    agree; a mismatch means the input was not a valid variogram.
    """
    G = as_gamma(gamma)
    I = index_set(I, G.shape[0])
    if len(I) == 1:
        return _singleton_block(I)
    n = len(I)
    cm = cayley_menger(G, I).dense()
    try:
        inv = linalg.inv_sym(cm)
        g_inv_1 = linalg.solve_sym(G[np.ix_(I, I)], np.ones(n))
    except SingularBlock as exc:
        raise SingularCM(f"Cayley-Menger matrix of margin {I} is singular") from exc
    if not np.all(np.isfinite(inv)):
        raise SingularCM(f"Cayley-Menger matrix of margin {I} is singular")
    theta = inv[:n, :n]
    p = inv[:n, n].copy()
    sigma2 = float(inv[n, n])

    total = float(np.sum(g_inv_1))
    p_alt = g_inv_1 / total
    sigma2_alt = 0.5 / total
    rtol = max(resolve(tol), 1e-7)
    if not (
        np.allclose(p, p_alt, rtol=rtol, atol=rtol * max(1.0, float(np.max(np.abs(p)))))
        and abs(sigma2 - sigma2_alt) <= rtol * max(abs(sigma2), 1e-300)
    ):
        raise SingularCM(
            f"inconsistent inverse blocks for margin {I}; input is not a valid variogram"
        )
    return FiedlerBapatBlock(I, theta, p, sigma2)


def marginal_block_via_schur(full: FiedlerBapatBlock, I: Iterable[int], tol: float | None = None) -> FiedlerBapatBlock:
    """Marginal block from the full-model block by eliminating the complement of ``I``."""
    d = len(full.margin)
    I = index_set(I, d)
    E = complement(I, d)
    if not E:
        raise BadIndexSets("I must be a proper subset of the full margin")
    tol = resolve(tol)
    T = full.theta
    T_EE = T[np.ix_(E, E)]
    w = np.linalg.eigvalsh(T_EE)
    if w[0] <= tol * norm_scale(T_EE):
        raise SingularBlock("eliminated precision block is singular")
    T_IE = T[np.ix_(I, E)]
    X = np.linalg.solve(T_EE, np.column_stack([T_IE.T, full.p[list(E)]]))
    theta = T[np.ix_(I, I)] - T_IE @ X[:, :-1]
    theta = (theta + theta.T) / 2.0
    p = full.p[list(I)] - T_IE @ X[:, -1]
    sigma2 = full.sigma2 - float(full.p[list(E)] @ X[:, -1])
    return FiedlerBapatBlock(I, theta, p, sigma2)


def check_precision(theta, tol: float | None = None) -> np.ndarray:
    """Symmetrize and verify that ``theta`` is PSD with kernel exactly span(1)."""
    tol = resolve(tol)
    T = np.array(theta, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 2:
        raise BadKernel(f"precision must be square of size >= 2, got {T.shape}")
    scale = norm_scale(T)
    if float(np.max(np.abs(T - T.T))) > tol * scale:
        raise NotSymmetric("precision matrix is not symmetric")
    T = linalg.sym(T)
    rows = float(np.max(np.abs(T.sum(axis=1))))
    if rows > tol * scale:
        raise BadKernel(f"row sums must vanish (max |row sum| {rows:.3e})")
    w = np.linalg.eigvalsh(T)
    if w[0] < -tol * scale:
        raise BadKernel(f"precision has negative eigenvalue {w[0]:.3e}")
    if w[1] <= tol * scale:
        raise BadKernel("precision kernel is larger than span(1) (disconnected graph)")
    return T


def variogram_from_precision(theta, tol: float | None = None) -> Variogram:
    """The unique variogram whose full-margin precision block is ``theta``.

    ``Gamma_ij = T+_ii + T+_jj - 2 T+_ij`` with ``T+`` the pseudoinverse
    (effective resistances of the signed graph).
    """
    T = check_precision(theta, tol)
    d = T.shape[0]
    # pinv of a Laplacian-type matrix: (T + J/d)^{-1} - J/d, J the all-ones matrix
    J = np.full((d, d), 1.0 / d)
    Tp = np.linalg.inv(T + J) - J
    Tp = (Tp + Tp.T) / 2.0
    dg = np.diag(Tp)
    G = dg[:, None] + dg[None, :] - 2.0 * Tp
    np.fill_diagonal(G, 0.0)
    var = validate_variogram(G, tol)
    back = fiedler_bapat(var).theta
    resid = float(np.max(np.abs(back - T))) / max(1.0, float(np.max(np.abs(T))))
    if resid > 1e-8:
        raise RoundTripFailure(f"precision round trip residual {resid:.3e}")
    return var


def _density_points(y, d: int) -> tuple[np.ndarray, bool]:
    Y = np.asarray(y, dtype=float)
    single = Y.ndim == 1
    Y = np.atleast_2d(Y)
    if Y.shape[1] != d:
        raise ValueError(f"points must have {d} coordinates, got {Y.shape[1]}")
    return Y, single


def exponent_density(gamma, y, I: Iterable[int] | None = None) -> np.ndarray | float:
    """Exponent measure density of the margin ``I`` at ``y`` (Cayley-Menger form).

    ``y`` may be a single point or an (N, |I|) array. Only margins with
    ``|I| >= 2`` are supported.
    """
    G = as_gamma(gamma)
    I = index_set(I, G.shape[0])
    n = len(I)
    if n < 2:
        raise ValueError("density is only defined here for margins of size >= 2")
    Y, single = _density_points(y, n)
    cm = cayley_menger(G, I).dense()
    det_cm = linalg.det(cm)
    inv = linalg.inv_sym(cm)
    Z = np.column_stack([Y, np.ones(len(Y))])
    quad = np.einsum("ni,ij,nj->n", Z, inv, Z)
    const = np.sqrt(-((2 * np.pi) ** (1 - n)) / det_cm)
    out = const * np.exp(-0.5 * quad)
    return float(out[0]) if single else out


def exponent_density_precision(block: FiedlerBapatBlock, y, k: int = 0) -> np.ndarray | float:
    """Exponent measure density from ``(theta, p, sigma2)``; ``k`` picks the
    deleted row/column of the normalizing minor (any choice is equivalent)."""
    n = len(block.margin)
    if n < 2:
        raise ValueError("density is only defined here for margins of size >= 2")
    Y, single = _density_points(y, n)
    keep = [i for i in range(n) if i != k]
    minor = linalg.det(block.theta[np.ix_(keep, keep)])
    Z = np.column_stack([Y, np.ones(len(Y))])
    quad = np.einsum("ni,ij,nj->n", Z, block.matrix(), Z)
    out = np.sqrt((2 * np.pi) ** (1 - n) * minor) * np.exp(-0.5 * quad)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class Emtp2Status:
    holds: bool
    max_offdiag: float
    boundary_pairs: tuple[tuple[int, int], ...]


def emtp2_status(theta, tol: float | None = None) -> Emtp2Status:
    """Off-diagonal sign check of a precision matrix.

    Entries within ``tol * scale`` of zero count as nonpositive and are
    listed in ``boundary_pairs``.
    """
    tol = resolve(tol)
    T = np.asarray(theta, dtype=float)
    n = T.shape[0]
    if n < 2:
        return Emtp2Status(True, float("-inf"), ())
    scale = norm_scale(T)
    iu = np.triu_indices(n, 1)
    off = T[iu]
    boundary = tuple(
        (int(i), int(j)) for i, j, v in zip(*iu, off) if abs(v) <= tol * scale
    )
    mx = float(np.max(off))
    return Emtp2Status(mx <= tol * scale, mx, boundary)


@dataclass(frozen=True)
class PSignStatus:
    positive: bool
    nonnegative: bool
    boundary: tuple[int, ...]


def p_sign_status(p, tol: float | None = None) -> PSignStatus:
    """Sign pattern of the barycentric vector ``p`` (entries sum to one)."""
    tol = resolve(tol)
    p = np.asarray(p, dtype=float)
    boundary = tuple(int(i) for i in np.flatnonzero(np.abs(p) <= tol))
    return PSignStatus(bool(np.all(p > tol)), bool(np.all(p >= -tol)), boundary)


@dataclass(frozen=True)
class ConditionalGaussian:
    """Gaussian law of ``y_A`` given ``y_C``; mean is ``mean_coeff @ (y_C, 1)``."""

    target: IndexSet
    given: IndexSet
    covariance: np.ndarray
    mean_coeff: np.ndarray

    def mean(self, y_given) -> np.ndarray:
        return self.mean_coeff @ np.append(np.asarray(y_given, dtype=float), 1.0)


def conditional_gaussian(gamma, A: Iterable[int], C: Iterable[int]) -> ConditionalGaussian:
    G = as_gamma(gamma)
    d = G.shape[0]
    try:
        A = index_set(A, d)
        C = index_set(C, d)
    except ValueError as exc:
        raise BadIndexSets(str(exc)) from exc
    if set(A) & set(C):
        raise BadIndexSets("A and C must be disjoint")
    left = np.column_stack([-G[np.ix_(A, C)] / 2.0, np.ones(len(A))])
    coeff = linalg.solve_sym(cayley_menger(G, C).dense(), left.T).T
    cov = -G[np.ix_(A, A)] / 2.0 - coeff @ left.T
    cov = (cov + cov.T) / 2.0
    if np.linalg.eigvalsh(cov)[0] <= 0:
        raise SingularBlock("conditional covariance is not positive definite")
    return ConditionalGaussian(A, C, cov, coeff)
