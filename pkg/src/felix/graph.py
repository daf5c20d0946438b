"""Undirected interaction graphs and the edge-list text format."""

from __future__ import annotations

import os
from functools import cached_property
from typing import Iterable

import numpy as np


class SocialGraph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``; neighbor
    lists are sorted ascending so that every sweep over a neighborhood is
    deterministic.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"node count must be non-negative, got {n}")
        self.n = int(n)
        pairs = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) out of range for n={n}")
            pairs.add((min(a, b), max(a, b)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(pairs))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        self._neighbors = tuple(np.array(sorted(x), dtype=np.intp) for x in nbrs)
        self.degrees = np.array([len(x) for x in nbrs], dtype=np.intp)

    def __repr__(self) -> str:
        return f"SocialGraph(n={self.n}, edges={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def neighbors(self, i: int) -> np.ndarray:
        return self._neighbors[i]

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return (min(i, j), max(i, j)) in self._edge_set

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64, symmetric, zero diagonal)."""
        A = np.zeros((self.n, self.n))
        if self.edges:
            e = np.array(self.edges)
            A[e[:, 0], e[:, 1]] = 1.0
            A[e[:, 1], e[:, 0]] = 1.0
        A.setflags(write=False)
        return A

    @cached_property
    def isolated(self) -> np.ndarray:
        """Indices of nodes with no neighbors."""
        return np.flatnonzero(self.degrees == 0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def mean_degree(self) -> float:
        return float(self.degrees.mean()) if self.n else 0.0

    def is_complete(self) -> bool:
        return self.num_edges == self.n * (self.n - 1) // 2


def write_edgelist(graph: SocialGraph, path: str | os.PathLike) -> None:
    """Write ``graph`` as ``n <count>`` followed by one ``i j`` line per edge."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edgelist(graph))


def format_edgelist(graph: SocialGraph) -> str:
    lines = [f"n {graph.n}"]
    lines.extend(f"{a} {b}" for a, b in graph.edges)
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> SocialGraph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ValueError(f"line {lineno}: expected header 'n <count>'")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise ValueError("missing 'n <count>' header")
    return SocialGraph(n, edges)


def read_edgelist(path: str | os.PathLike) -> SocialGraph:
    with open(path) as fh:
        return parse_edgelist(fh.read())
