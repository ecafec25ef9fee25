"""Random instance generators.

All randomness comes from counter-based Philox streams, so a given seed
produces the same instance on every platform and numpy version that keeps
the Philox bit stream stable.
"""

from __future__ import annotations

import numpy as np

from .errors import BadGraph
from .graphs import MarkovGraph
from .model import Variogram, variogram_from_precision

WEIGHT_LOW = 0.2
WEIGHT_HIGH = 2.0


def make_rng(seed: int | np.random.Generator | None = 0, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``; generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    seed = 0 if seed is None else int(seed)
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    return np.random.Generator(np.random.Philox(key=seed + (stream << 64)))


def random_points_variogram(d: int, seed=0) -> Variogram:
    """Squared distances of ``d`` standard normal points in ``R^(d-1)``.

    Generic point sets are affinely independent, so the result is strictly
    conditionally negative definite.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = make_rng(seed)
    return Variogram.from_points(rng.standard_normal((d, d - 1)))


def random_tree_edges(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform random labeled tree, decoded from a random Prüfer sequence."""
    if n < 2:
        return []
    seq = list(rng.integers(0, n, size=n - 2))
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = degree.index(1)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (i for i, k in enumerate(degree) if k == 1)
    edges.append((u, w))
    return edges


def random_connected_graph(n: int, seed=0, extra_edge_prob: float = 0.3) -> MarkovGraph:
    """Random spanning tree plus each remaining pair with probability ``extra_edge_prob``."""
    if n < 2:
        raise BadGraph("need at least two vertices")
    rng = make_rng(seed)
    edges = set(random_tree_edges(n, rng))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges.add((i, j))
    return MarkovGraph.from_edges(n, edges)


def laplacian_precision(graph: MarkovGraph, seed=0, low: float = WEIGHT_LOW, high: float = WEIGHT_HIGH) -> np.ndarray:
    """Weighted Laplacian of ``graph`` with i.i.d. uniform edge weights in ``[low, high]``.

    Edges are weighted in sorted order so the result depends only on the
    graph and the seed.
    """
    if not graph.is_connected():
        raise BadGraph("graph must be connected for a valid precision matrix")
    rng = make_rng(seed)
    edges = graph.sorted_edges()
    w = rng.uniform(low, high, size=len(edges))
    weighted = MarkovGraph(graph.n, graph.edges, dict(zip(edges, w.tolist())))
    return weighted.laplacian()


def planted_variogram(graph: MarkovGraph, seed=0) -> tuple[Variogram, np.ndarray]:
    """EMTP2 instance whose precision matrix has exactly the non-edges of ``graph`` as zeros."""
    theta = laplacian_precision(graph, seed)
    return variogram_from_precision(theta), theta
