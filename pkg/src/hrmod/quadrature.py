"""Product Gauss-Legendre quadrature over half-spaces, for dimensions <= 3.

This is a verification utility for the integral identities (density
normalization, the integral forms of m_HR and sigma2), not a general
integrator. Integrals are taken over ``{s * u + B w + c : s > 0}`` where the
Gaussian-like directions ``w`` are truncated to a box of +-``width`` around
given centers and ``s`` runs over ``[0, s_max]``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

MAX_DIM = 3

# Panels along the exponentially decaying direction.
_S_BREAKS = (0.0, 1.0, 3.0, 7.0, 14.0, 24.0, 40.0)


def _gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    half = (b - a) / 2.0
    return a + half * (x + 1.0), half * w


def _panel_rule(breaks, n: int) -> tuple[np.ndarray, np.ndarray]:
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        x, w = _gauss_legendre(a, b, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def halfspace_integral(
    f: Callable[[np.ndarray], np.ndarray],
    direction: np.ndarray,
    basis: np.ndarray,
    centers: np.ndarray,
    half_widths: np.ndarray,
    s_max: float = 40.0,
    nodes: int = 10,
) -> float:
    """Integrate ``f`` (vectorized over rows) over a truncated half-space.

    Points are ``y = s * direction + basis @ w`` with ``s in [0, s_max]`` and
    ``w_j in centers_j +- half_widths_j``; the Jacobian ``|det [direction, basis]|``
    is applied.
    """
    direction = np.asarray(direction, dtype=float)
    basis = np.asarray(basis, dtype=float).reshape(len(direction), -1)
    d = len(direction)
    if d > MAX_DIM:
        raise ValueError(f"quadrature supports dimension <= {MAX_DIM}, got {d}")
    jac = abs(np.linalg.det(np.column_stack([direction, basis])))

    breaks = [b for b in _S_BREAKS if b < s_max] + [s_max]
    s, ws = _panel_rule(breaks, nodes)
    grids, weights = [s], [ws]
    for c, h in zip(centers, half_widths):
        # 4 panels keep the peak well resolved
        x, w = _panel_rule(np.linspace(c - h, c + h, 5), nodes)
        grids.append(x)
        weights.append(w)

    mesh = np.meshgrid(*grids, indexing="ij")
    wmesh = np.meshgrid(*weights, indexing="ij")
    W = np.ones_like(mesh[0])
    for w in wmesh:
        W = W * w
    pts = mesh[0].reshape(-1, 1) * direction[None, :]
    for j in range(basis.shape[1]):
        pts = pts + mesh[j + 1].reshape(-1, 1) * basis[:, j][None, :]
    return float(jac * np.sum(W.reshape(-1) * f(pts)))


def halfspace_mass_coordinate(f, gamma_sub: np.ndarray, k: int, sds: float = 12.0) -> float:
    """Integrate ``f`` over ``{y_k > 0}`` for a margin with variogram ``gamma_sub``.

    Uses ``y = s * 1 + E w`` with ``E`` the coordinate vectors ``e_i, i != k``.
    Under the k-th half-space law ``w`` has mean ``-Gamma_{.k} / 2`` and
    covariance ``(Gamma_ik + Gamma_jk - Gamma_ij) / 2``; the box is aligned
    with that covariance's principal axes.
    """
    n = gamma_sub.shape[0]
    others = [i for i in range(n) if i != k]
    E = np.zeros((n, n - 1))
    for col, i in enumerate(others):
        E[i, col] = 1.0
    g = gamma_sub[others, k]
    cov = (g[:, None] + g[None, :] - gamma_sub[np.ix_(others, others)]) / 2.0
    lam, V = np.linalg.eigh(cov)
    centers = V.T @ (-g / 2.0)
    return halfspace_integral(f, np.ones(n), E @ V, centers, sds * np.sqrt(lam))
