"""Geometry of variogram space: the Hüsler-Reiss elliptope F_d (variograms
with sigma2 <= 1), the correspondence with rank-(d-1) correlation matrices,
and point clouds of F_3.

For d = 3 a triple ``(g12, g13, g23)`` stands for the variogram with those
off-diagonal entries.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterable, TextIO

import numpy as np

from . import linalg
from .errors import BadRank, KernelOrthogonalToOnes, RoundTripFailure, ValidationError
from .generate import make_rng
from .model import Variogram, as_gamma, fiedler_bapat, validate_variogram
from .tolerance import norm_scale, resolve

# Absolute band around sigma2 = 1 inside which a point is flagged as boundary.
BOUNDARY_BAND = 1e-9
# Each g_ij = 4 sigma2({i,j}) <= 4 sigma2([3]) <= 4 on F_3, by monotonicity of sigma2.
BOX = 4.0

CSV_HEADER = ("g12", "g13", "g23", "in_f3", "sigma2", "emtp2", "p_nonneg", "ci12_3", "ci13_2", "ci23_1", "boundary_flag")


@dataclass(frozen=True)
class Membership:
    inside: bool
    sigma2: float | None
    reason: str | None = None
    boundary: bool = False


def in_hr_elliptope(M, tol: float | None = None) -> Membership:
    """``M`` is a valid variogram with ``sigma2 <= 1 + tol``.

    Invalid input is reported through ``reason`` rather than raised.
    """
    tol = resolve(tol)
    try:
        var = validate_variogram(M, tol)
    except ValidationError as exc:
        return Membership(False, None, type(exc).__name__)
    s2 = fiedler_bapat(var).sigma2
    boundary = abs(s2 - 1.0) <= BOUNDARY_BAND
    if s2 > 1.0 + tol:
        return Membership(False, s2, "SigmaAboveOne", boundary)
    return Membership(True, s2, None, boundary)


def r_of_gamma(gamma) -> np.ndarray:
    """Correlation matrix ``-Gamma / (2 sigma2) + 11^T``: rank d-1 with kernel span(p)."""
    G = as_gamma(gamma)
    d = G.shape[0]
    block = fiedler_bapat(G)
    R = -G / (2.0 * block.sigma2) + 1.0
    np.fill_diagonal(R, 1.0)
    scale = norm_scale(R)
    if np.max(np.abs(R @ block.p)) > 1e-8 * scale * max(1.0, float(np.linalg.norm(block.p))):
        raise RoundTripFailure("p is not in the kernel of R(Gamma)")
    if linalg.rank_sym(R, 1e-9) != d - 1:
        raise BadRank("R(Gamma) does not have rank d-1")
    return R


class EllipTag(str, Enum):
    INTERIOR = "InteriorE"
    BOUNDARY_STAR = "BoundaryStar"
    BOUNDARY_EXCLUDED = "BoundaryExcluded"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class ElliptopeClassification:
    tag: EllipTag
    rank: int
    kernel_vector: np.ndarray | None = None
    kernel_dot_ones: float | None = None
    min_eigenvalue: float = 0.0


def _check_correlation(R, tol: float) -> np.ndarray:
    R = np.array(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValidationError(f"correlation matrix must be square, got shape {R.shape}")
    if np.max(np.abs(R - R.T)) > tol * norm_scale(R):
        raise ValidationError("correlation matrix is not symmetric")
    if np.max(np.abs(np.diag(R) - 1.0)) > tol:
        raise ValidationError("correlation matrix must have unit diagonal")
    return linalg.sym(R)


def classify_correlation(R, tol: float | None = None) -> ElliptopeClassification:
    """Locate ``R`` relative to the elliptope and the star part of its boundary.

    BoundaryStar means rank d-1 with a kernel vector not orthogonal to 1.
    """
    tol = resolve(tol)
    R = _check_correlation(R, tol)
    d = R.shape[0]
    w, V = linalg.eigen_sym(R)
    thr = tol * norm_scale(R)
    if w[0] < -thr:
        return ElliptopeClassification(EllipTag.OUTSIDE, int(np.sum(np.abs(w) > thr)), min_eigenvalue=float(w[0]))
    if w[0] > thr:
        return ElliptopeClassification(EllipTag.INTERIOR, d, min_eigenvalue=float(w[0]))
    rank = int(np.sum(w > thr))
    if rank < d - 1:
        return ElliptopeClassification(EllipTag.BOUNDARY_EXCLUDED, rank, min_eigenvalue=float(w[0]))
    k = V[:, 0]
    dot = float(np.sum(k))
    tag = EllipTag.BOUNDARY_STAR if abs(dot) > tol * np.sqrt(d) else EllipTag.BOUNDARY_EXCLUDED
    return ElliptopeClassification(tag, rank, k, dot, float(w[0]))


def gamma_of_r(R, tol: float | None = None) -> Variogram:
    """``2 (11^T - R)`` for ``R`` on the star boundary; the result has sigma2 = 1."""
    tol = resolve(tol)
    cls = classify_correlation(R, tol)
    if cls.tag is EllipTag.OUTSIDE:
        raise ValidationError(f"not positive semidefinite (eigenvalue {cls.min_eigenvalue:.3e})")
    if cls.tag is EllipTag.INTERIOR or cls.rank != R.shape[0] - 1:
        raise BadRank(f"R must have rank {R.shape[0] - 1}, got {cls.rank}")
    if cls.tag is EllipTag.BOUNDARY_EXCLUDED:
        raise KernelOrthogonalToOnes("kernel of R is orthogonal to the all-ones vector")
    R = np.asarray(R, dtype=float)
    G = 2.0 * (1.0 - R)
    G = (G + G.T) / 2.0
    np.fill_diagonal(G, 0.0)
    var = validate_variogram(G, tol)
    block = fiedler_bapat(var)
    if abs(block.sigma2 - 1.0) > 1e-8:
        raise RoundTripFailure(f"sigma2(Gamma(R)) = {block.sigma2!r}, expected 1")
    p_expected = cls.kernel_vector / cls.kernel_dot_ones
    if np.max(np.abs(block.p - p_expected)) > 1e-6 * max(1.0, float(np.max(np.abs(p_expected)))):
        raise RoundTripFailure("p(Gamma(R)) does not match the normalized kernel of R")
    return var


@dataclass(frozen=True)
class ElliptopePoint:
    g12: float
    g13: float
    g23: float
    in_f3: bool
    sigma2: float
    emtp2: bool
    p_nonneg: bool
    ci12_3: float
    ci13_2: float
    ci23_1: float
    boundary_flag: bool

    @property
    def coords(self) -> tuple[float, float, float]:
        return (self.g12, self.g13, self.g23)

    def gamma(self) -> np.ndarray:
        return triple_to_gamma(self.coords)


def triple_to_gamma(t) -> np.ndarray:
    g12, g13, g23 = (float(x) for x in t)
    return np.array([[0.0, g12, g13], [g12, 0.0, g23], [g13, g23, 0.0]])


_P3 = linalg.ones_complement_basis(3)


def evaluate_triples(T, tol: float | None = None) -> dict[str, np.ndarray]:
    """Vectorized :class:`ElliptopePoint` fields for an ``(N, 3)`` array of triples.

    Equivalent to running the scalar validation and block computations on each
    row; invalid rows get ``sigma2 = nan`` and false flags.
    """
    tol = resolve(tol)
    T = np.atleast_2d(np.asarray(T, dtype=float))
    N = len(T)
    g12, g13, g23 = T[:, 0], T[:, 1], T[:, 2]
    G = np.zeros((N, 3, 3))
    G[:, 0, 1] = G[:, 1, 0] = g12
    G[:, 0, 2] = G[:, 2, 0] = g13
    G[:, 1, 2] = G[:, 2, 1] = g23

    scale = np.maximum(1.0, np.linalg.norm(G, ord=2, axis=(1, 2)))
    proj = np.einsum("ai,nab,bj->nij", _P3, -G, _P3)
    valid = (np.linalg.eigvalsh(proj)[:, 0] > tol * scale) & np.all(T > 0, axis=1)

    sigma2 = np.full(N, np.nan)
    emtp2 = np.zeros(N, dtype=bool)
    p_nonneg = np.zeros(N, dtype=bool)
    if valid.any():
        Gv = G[valid]
        n = len(Gv)
        cm = np.zeros((n, 4, 4))
        cm[:, :3, :3] = -Gv / 2.0
        cm[:, :3, 3] = cm[:, 3, :3] = 1.0
        inv = np.linalg.inv(cm)
        theta = inv[:, :3, :3]
        p = inv[:, :3, 3]
        sigma2[valid] = inv[:, 3, 3]
        tscale = np.maximum(1.0, np.linalg.norm(theta, ord=2, axis=(1, 2)))
        off = np.stack([theta[:, 0, 1], theta[:, 0, 2], theta[:, 1, 2]], axis=1)
        emtp2[valid] = np.max(off, axis=1) <= tol * tscale
        p_nonneg[valid] = np.all(p >= -tol, axis=1)

    in_f3 = valid & (sigma2 <= 1.0 + tol)
    boundary = valid & (np.abs(sigma2 - 1.0) <= BOUNDARY_BAND)
    return {
        "g12": g12,
        "g13": g13,
        "g23": g23,
        "in_f3": in_f3,
        "sigma2": sigma2,
        "emtp2": emtp2,
        "p_nonneg": p_nonneg,
        "ci12_3": g12 - g13 - g23,
        "ci13_2": g13 - g12 - g23,
        "ci23_1": g23 - g12 - g13,
        "boundary_flag": boundary,
    }


def points_from_fields(fields: dict[str, np.ndarray], mask=None) -> list[ElliptopePoint]:
    idx = np.arange(len(fields["g12"])) if mask is None else np.flatnonzero(mask)
    out = []
    for i in idx:
        row = {}
        for k in CSV_HEADER:
            v = fields[k][i]
            row[k] = bool(v) if fields[k].dtype == bool else float(v)
        out.append(ElliptopePoint(**row))
    return out


def evaluate_point(g12: float, g13: float, g23: float, tol: float | None = None) -> ElliptopePoint:
    return points_from_fields(evaluate_triples([[g12, g13, g23]], tol))[0]


@dataclass
class F3Sample:
    """Accepted points of one sampling run plus bookkeeping for reports."""

    points: list[ElliptopePoint]
    drawn: int
    in_f3: int
    counts: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.in_f3 / self.drawn if self.drawn else 0.0


BATCH = 4096


def _uniform_box(n: int, seed: int) -> np.ndarray:
    # batch b comes from stream b, so any split of the index range reproduces it
    chunks = []
    for b, start in enumerate(range(0, n, BATCH)):
        m = min(BATCH, n - start)
        chunks.append(make_rng(seed, stream=b).uniform(0.0, BOX, size=(m, 3)))
    return np.concatenate(chunks) if chunks else np.zeros((0, 3))


def sample_f3(
    n: int,
    seed: int = 0,
    *,
    emtp2: bool = False,
    boundary_only: bool = False,
    normalize: bool = False,
    tol: float | None = None,
) -> F3Sample:
    """Rejection-sample F_3 from ``n`` uniform draws in ``[0, 4]^3``.

    ``emtp2`` keeps only EMTP2 points. ``boundary_only`` and ``normalize``
    rescale each accepted point to ``sigma2 = 1`` (uniform draws essentially
    never land on the boundary itself); ``boundary_only`` additionally keeps
    only points flagged as boundary after rescaling.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    tol = resolve(tol)
    T = _uniform_box(n, seed)
    f = evaluate_triples(T, tol)
    keep = f["in_f3"].copy()
    n_in = int(keep.sum())
    if boundary_only or normalize:
        T = T[keep] / f["sigma2"][keep][:, None]
        f = evaluate_triples(T, tol)
        keep = f["in_f3"].copy()
    counts = {"in_f3": n_in}
    if emtp2:
        keep &= f["emtp2"]
        counts["emtp2"] = int(keep.sum())
    if boundary_only:
        keep &= f["boundary_flag"]
        counts["boundary"] = int(keep.sum())
    counts["emitted"] = int(keep.sum())
    return F3Sample(points_from_fields(f, keep), n, n_in, counts)


def random_rank_deficient_correlation(d: int, n: int, seed: int = 0) -> np.ndarray:
    """``n`` Gram matrices of ``d`` random unit vectors in ``R^(d-1)``: points of the
    elliptope boundary, generically on its star part. Shape ``(n, d, d)``."""
    rng = make_rng(seed)
    V = rng.standard_normal((n, d - 1, d))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    R = np.einsum("nki,nkj->nij", V, V)
    idx = np.arange(d)
    R[:, idx, idx] = 1.0
    return R


def sample_boundary_star(d: int, n: int, seed: int = 0, tol: float | None = None) -> list[np.ndarray]:
    """BoundaryStar correlation matrices among ``n`` random boundary draws.

    Draws that are not star points, or whose image ``2 (11^T - R)`` cannot be
    certified as a variogram at the working tolerance (two nearly coincident
    unit vectors), are dropped.
    """
    tol = resolve(tol)
    out = []
    for R in random_rank_deficient_correlation(d, n, seed):
        if classify_correlation(R, tol).tag is not EllipTag.BOUNDARY_STAR:
            continue
        G = 2.0 * (1.0 - R)
        np.fill_diagonal(G, 0.0)
        try:
            validate_variogram(G, tol)
        except ValidationError:
            continue
        out.append(R)
    return out


def sample_red_locus(n: int, seed: int = 0, tol: float | None = None) -> np.ndarray:
    """Triples ``2 (1 - R_ij)`` for excluded boundary matrices of E_3.

    Three unit vectors in the plane with two of them coincident give a
    rank-2 correlation matrix whose kernel is orthogonal to 1; the image is
    the segment ``g_ij = 0, g_ik = g_jk`` for the coincident pair ``ij``.
    """
    rng = make_rng(seed)
    angles = rng.uniform(0.0, 2 * np.pi, size=(n, 3))
    pair = rng.integers(0, 3, size=n)
    # pair 0 -> (1,2), 1 -> (1,3), 2 -> (2,3), 0-based columns
    a = np.array([0, 0, 1])[pair]
    b = np.array([1, 2, 2])[pair]
    rows = np.arange(n)
    angles[rows, b] = angles[rows, a]
    out = []
    for th in angles:
        R = np.cos(th[:, None] - th[None, :])
        if classify_correlation(R, tol).tag is EllipTag.BOUNDARY_EXCLUDED:
            G = 2.0 * (1.0 - R)
            out.append((G[0, 1], G[0, 2], G[1, 2]))
    return np.array(out).reshape(-1, 3)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return f"{float(v):.12g}"


def write_csv(points: Iterable[ElliptopePoint], fh: TextIO) -> int:
    """Write points with the fixed header; returns the number of rows."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    n = 0
    for pt in points:
        row = asdict(pt)
        w.writerow([_fmt(row[k]) for k in CSV_HEADER])
        n += 1
    return n
