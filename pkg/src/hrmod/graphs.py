"""Simple undirected graphs on vertices ``0..n-1``: construction, parsing,
connectivity and vertex separation."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import BadGraph

Edge = tuple[int, int]


def _edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    if i == j:
        raise BadGraph(f"self-loop at vertex {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class MarkovGraph:
    n: int
    edges: frozenset[Edge]
    weights: dict[Edge, float] | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], weights=None) -> "MarkovGraph":
        es = frozenset(_edge(i, j) for i, j in edges)
        for i, j in es:
            if not (0 <= i < n and 0 <= j < n):
                raise BadGraph(f"edge {(i, j)} out of range for {n} vertices")
        return cls(n, es, weights)

    @classmethod
    def complete(cls, n: int) -> "MarkovGraph":
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def path(cls, n: int) -> "MarkovGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "MarkovGraph":
        if n < 3:
            raise BadGraph("a cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "MarkovGraph":
        return cls.from_edges(n, [(0, i) for i in range(1, n)])

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            A[i, j] = A[j, i] = True
        return A

    def neighbors(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            nb[i].append(j)
            nb[j].append(i)
        return nb

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def without(self, *edges: tuple[int, int]) -> "MarkovGraph":
        drop = {_edge(i, j) for i, j in edges}
        return MarkovGraph(self.n, self.edges - drop)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(_reach(self.neighbors(), [0], set())) == self.n

    def laplacian(self) -> np.ndarray:
        L = np.zeros((self.n, self.n))
        for e in self.edges:
            w = 1.0 if self.weights is None else float(self.weights[e])
            i, j = e
            L[i, j] -= w
            L[j, i] -= w
            L[i, i] += w
            L[j, j] += w
        return L


def _reach(nb: list[list[int]], start: Iterable[int], blocked: set[int]) -> set[int]:
    seen = {s for s in start if s not in blocked}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in nb[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return seen


def separates(graph: MarkovGraph, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> bool:
    """True iff every path from A to B meets C (breadth-first search after deleting C)."""
    return separates_nb(graph.neighbors(), A, B, C)


def separates_nb(nb: list[list[int]], A, B, C) -> bool:
    reached = _reach(nb, A, set(C))
    return not (reached & set(B))


_NAMED = re.compile(r"^(cycle|path|complete|star)(\d+)$")


def parse_graph(spec: str, n: int | None = None, *, one_based: bool = True) -> MarkovGraph:
    """Parse ``cycle4`` / ``path5`` / ``complete3`` / ``star4`` or an edge list
    like ``1-2,2-3`` (1-based by default).

    For an edge list the vertex count is ``n`` if given, else the largest label.
    """
    spec = spec.strip()
    m = _NAMED.match(spec)
    if m:
        kind, size = m.group(1), int(m.group(2))
        if n is not None and n != size:
            raise BadGraph(f"graph {spec!r} has {size} vertices, expected {n}")
        return getattr(MarkovGraph, kind)(size)
    edges = []
    if spec:
        for tok in spec.split(","):
            parts = tok.strip().split("-")
            if len(parts) != 2:
                raise BadGraph(f"cannot parse edge {tok!r}")
            try:
                i, j = (int(x) for x in parts)
            except ValueError as exc:
                raise BadGraph(f"cannot parse edge {tok!r}") from exc
            off = 1 if one_based else 0
            edges.append((i - off, j - off))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    if any(min(e) < 0 for e in edges):
        raise BadGraph("vertex labels must be positive (1-based)" if one_based else "negative vertex label")
    return MarkovGraph.from_edges(n, edges)
