"""Exhaustive enumeration of labeled spanning trees through Prüfer sequences.

Every labeled tree on n vertices corresponds to exactly one sequence in
``range(n) ** (n - 2)``; decoding all of them at once (vectorized over
sequences) lists every spanning tree of the complete graph. Trees of a
sparser graph are those whose edges all lie in the graph.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

import numpy as np

from .errors import UnsupportedSize

MAX_VERTICES = 8


@functools.lru_cache(maxsize=None)
def complete_graph_trees(n: int) -> np.ndarray:
    """All ``n ** (n - 2)`` labeled trees on ``n`` vertices as a read-only
    array of shape ``(T, n - 1, 2)`` with ``edge[0] < edge[1]``."""
    edges = _decode_all(n)
    edges.setflags(write=False)
    return edges


def _decode_all(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one vertex")
    if n > MAX_VERTICES:
        raise UnsupportedSize(f"tree enumeration is limited to {MAX_VERTICES} vertices, got {n}")
    if n == 1:
        return np.zeros((1, 0, 2), dtype=np.int64)
    if n == 2:
        return np.array([[[0, 1]]], dtype=np.int64)

    seqs = np.array(list(itertools.product(range(n), repeat=n - 2)), dtype=np.int64)
    T = len(seqs)
    rows = np.arange(T)
    degree = np.ones((T, n), dtype=np.int64)
    np.add.at(degree, (np.repeat(rows, n - 2), seqs.ravel()), 1)

    edges = np.empty((T, n - 1, 2), dtype=np.int64)
    for t in range(n - 2):
        leaf = np.argmax(degree == 1, axis=1)
        nxt = seqs[:, t]
        edges[:, t, 0] = np.minimum(leaf, nxt)
        edges[:, t, 1] = np.maximum(leaf, nxt)
        degree[rows, leaf] -= 1
        degree[rows, nxt] -= 1
    # the two vertices left with degree one form the last edge
    last = np.argsort(degree != 1, axis=1, kind="stable")[:, :2]
    edges[:, n - 2, 0] = last.min(axis=1)
    edges[:, n - 2, 1] = last.max(axis=1)
    return edges


def _exact_integers(W: np.ndarray) -> tuple[np.ndarray, int]:
    """Integers ``N`` (object array) and ``s`` with ``W == N / 2**s`` exactly."""
    ratios = [float(x).as_integer_ratio() for x in W.ravel()]
    s = max(den.bit_length() - 1 for _, den in ratios)
    N = np.array([num << (s - (den.bit_length() - 1)) for num, den in ratios], dtype=object)
    return N.reshape(W.shape), s


def tree_weight_sum(W, exact: bool = True) -> float:
    """``sum_T prod_{ij in T} W_ij`` over all spanning trees of the complete graph.

    With signed weights the terms cancel heavily, so by default every product
    and the sum are formed exactly in integer arithmetic (the weights are
    scaled to integers by a common power of two) and rounded once at the end.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    trees = complete_graph_trees(n)
    if trees.shape[1] == 0:
        return 1.0
    if not exact:
        prods = np.prod(W[trees[:, :, 0], trees[:, :, 1]], axis=1)
        return float(np.sum(prods))
    if not np.all(np.isfinite(W)):
        raise ValueError("weights must be finite")
    N, s = _exact_integers(W)
    total = sum(np.prod(N[trees[:, :, 0], trees[:, :, 1]], axis=1).tolist())
    return float(Fraction(total, 1 << (s * (n - 1))))


def trees_of_adjacency(adj) -> np.ndarray:
    """Spanning trees (as ``(T, n - 1, 2)`` arrays) of the graph with boolean adjacency ``adj``."""
    adj = np.asarray(adj, dtype=bool)
    trees = complete_graph_trees(adj.shape[0])
    if trees.shape[1] == 0:
        return trees
    ok = np.all(adj[trees[:, :, 0], trees[:, :, 1]], axis=1)
    return trees[ok]
