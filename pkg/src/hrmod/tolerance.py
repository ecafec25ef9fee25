"""Relative tolerance policy.

A quantity counts as zero when ``|x| <= tol * scale``. Callers pick the scale;
by default it is ``max(1, product of the norms of the matrices involved)``.
The default tolerance is 1e-9 and can be overridden with ``HRMOD_TOL``.
"""

from __future__ import annotations

import os
from enum import Enum

import numpy as np

DEFAULT_TOL = 1e-9

# Residuals inside (tol, INDETERMINATE_FACTOR * tol) are neither zero nor nonzero.
INDETERMINATE_FACTOR = 10.0


def default_tol() -> float:
    raw = os.environ.get("HRMOD_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"HRMOD_TOL must be positive, got {raw!r}")
    return value


def resolve(tol: float | None) -> float:
    return default_tol() if tol is None else float(tol)


def norm_scale(*arrays) -> float:
    """``max(1, prod ||a||_2)`` over the given arrays (scalars allowed)."""
    prod = 1.0
    for a in arrays:
        a = np.asarray(a, dtype=float)
        prod *= float(np.linalg.norm(a, 2)) if a.ndim == 2 else float(np.linalg.norm(a))
    return max(1.0, prod)


class Zero(str, Enum):
    """Three-way outcome of a zero test with an indeterminate band."""

    ZERO = "zero"
    NONZERO = "nonzero"
    BAND = "band"


def classify_zero(x: float, scale: float, tol: float) -> Zero:
    r = abs(x)
    if r <= tol * scale:
        return Zero.ZERO
    if r < INDETERMINATE_FACTOR * tol * scale:
        return Zero.BAND
    return Zero.NONZERO
