"""Dense symmetric linear algebra for small matrices (d up to a few dozen).

Matrices are plain ``numpy.ndarray`` objects. :func:`sym` is the single place
where inputs are symmetrized, so downstream code can rely on exact symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, SingularBlock
from .tolerance import norm_scale, resolve

IndexSet = tuple[int, ...]


def index_set(I: Iterable[int] | None, d: int, *, allow_empty: bool = False) -> IndexSet:
    """Normalize ``I`` to a sorted tuple of distinct 0-based indices below ``d``.

    ``None`` means the full set ``range(d)``.
    """
    if I is None:
        return tuple(range(d))
    items = [int(i) for i in I]
    out = tuple(sorted(set(items)))
    if len(out) != len(items):
        raise ValueError(f"index set has repeated elements: {items}")
    if out and (out[0] < 0 or out[-1] >= d):
        raise ValueError(f"index set {items} out of range for dimension {d}")
    if not out and not allow_empty:
        raise ValueError("index set must be nonempty")
    return out


def complement(I: Sequence[int], d: int) -> IndexSet:
    s = set(I)
    return tuple(i for i in range(d) if i not in s)


def sym(M) -> np.ndarray:
    """Return ``(M + M.T) / 2`` as a fresh float array; ``M`` must be square."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {A.shape}")
    return (A + A.T) / 2.0


@dataclass(frozen=True)
class BorderedMatrix:
    """The symmetric matrix ``[[inner, border], [border.T, corner]]``."""

    inner: np.ndarray
    border: np.ndarray
    corner: float = 0.0

    @property
    def dim(self) -> int:
        return self.inner.shape[0] + 1

    def dense(self) -> np.ndarray:
        n = self.inner.shape[0]
        M = np.empty((n + 1, n + 1))
        M[:n, :n] = self.inner
        M[:n, n] = self.border
        M[n, :n] = self.border
        M[n, n] = self.corner
        return M


def _dense(M) -> np.ndarray:
    if isinstance(M, BorderedMatrix):
        return M.dense()
    return np.asarray(M, dtype=float)


def det(M) -> float:
    """Determinant through a Bunch-Kaufman LDL^T factorization.

    The unit triangular factor has determinant +-1 and appears twice, so
    ``det M = det D`` with D block diagonal (1x1 and 2x2 blocks).
    """
    A = _dense(M)
    if A.shape == (1, 1):
        return float(A[0, 0])
    _, D, _ = scipy.linalg.ldl(A, lower=True, hermitian=True)
    n = D.shape[0]
    out = 1.0
    i = 0
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0.0:
            out *= D[i, i] * D[i + 1, i + 1] - D[i + 1, i] * D[i, i + 1]
            i += 2
        else:
            out *= D[i, i]
            i += 1
    return float(out)


def det_general(M) -> float:
    """Determinant of a not necessarily symmetric square matrix (LU)."""
    A = np.asarray(M, dtype=float)
    if A.size == 0:
        return 1.0
    return float(np.linalg.det(A))


def eigen_sym(M) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix."""
    try:
        w, V = np.linalg.eigh(_dense(M))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise ConvergenceFailure(str(exc)) from exc
    return w, V


def pseudo_det(M, rank_tol: float | None = None) -> float:
    """Product of the eigenvalues with ``|lambda| > rank_tol * max(1, rho(M))``.

    The empty product (zero matrix) is 1.
    """
    tol = resolve(rank_tol)
    w = np.linalg.eigvalsh(_dense(M))
    rho = float(np.max(np.abs(w))) if w.size else 0.0
    keep = np.abs(w) > tol * max(1.0, rho)
    return float(np.prod(w[keep]))


def rank_sym(M, tol: float | None = None) -> int:
    tol = resolve(tol)
    w = np.linalg.eigvalsh(_dense(M))
    rho = float(np.max(np.abs(w))) if w.size else 0.0
    return int(np.sum(np.abs(w) > tol * max(1.0, rho)))


def solve_sym(A, b) -> np.ndarray:
    """Solve ``A x = b`` for symmetric (possibly indefinite) nonsingular ``A``."""
    A = _dense(A)
    try:
        return scipy.linalg.solve(A, b, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularBlock(str(exc)) from exc


def inv_sym(A) -> np.ndarray:
    A = _dense(A)
    X = solve_sym(A, np.eye(A.shape[0]))
    return (X + X.T) / 2.0


def _check_invertible(B: np.ndarray, tol: float) -> None:
    w = np.linalg.eigvalsh(B)
    if np.min(np.abs(w)) <= tol * norm_scale(B):
        raise SingularBlock(
            f"eliminated block is numerically singular (min |eigenvalue| {np.min(np.abs(w)):.3e})"
        )


def schur_complement(M, keep: Iterable[int], tol: float | None = None) -> np.ndarray:
    """Schur complement of ``M`` onto the indices in ``keep``.

    ``M[K,K] - M[K,E] M[E,E]^{-1} M[E,K]`` with E the eliminated indices.
    """
    A = sym(M)
    n = A.shape[0]
    K = index_set(keep, n)
    E = complement(K, n)
    if not E:
        return A.copy()
    tol = resolve(tol)
    B = A[np.ix_(E, E)]
    _check_invertible(B, tol)
    X = solve_sym(B, A[np.ix_(E, K)])
    S = A[np.ix_(K, K)] - A[np.ix_(K, E)] @ X
    return (S + S.T) / 2.0


def ones_complement_basis(d: int) -> np.ndarray:
    """Orthonormal basis (d x (d-1)) of the hyperplane orthogonal to the all-ones vector."""
    return scipy.linalg.null_space(np.ones((1, d)))
