"""Erdős–Rényi realizations and the per-target distance decomposition.

Graphs are dense for fixed p, so adjacency is held as bit-packed rows and
unpacked on demand.  Generation uses numpy's PCG64 (``default_rng(seed)``) and
draws one uniform per unordered pair ``i < j`` in lexicographic order, which
pins the realization for a given ``(n, p, seed)``.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

from .errors import ParameterError


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ErGraph:
    """Immutable simple undirected graph with cached degrees and edge count."""

    n: int
    p: float
    seed: int
    packed: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    edge_count: int

    @classmethod
    def from_adjacency(cls, adjacency, p: float | None = None, seed: int = 0) -> "ErGraph":
        adj = np.asarray(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ParameterError("adjacency must be a square matrix")
        n = adj.shape[0]
        if n < 1:
            raise ParameterError("graph needs at least one vertex")
        if not np.array_equal(adj, adj.T):
            raise ParameterError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ParameterError("self-loops are not allowed")
        degrees = adj.sum(axis=1).astype(np.int64)
        edge_count = int(degrees.sum()) // 2
        if p is None:
            p = 2.0 * edge_count / (n * (n - 1)) if n > 1 else 1.0
        g = cls(
            n=n,
            p=float(p),
            seed=int(seed),
            packed=_readonly(np.packbits(adj, axis=1)),
            degrees=_readonly(degrees),
            edge_count=edge_count,
        )
        # seed the cache so callers that already hold a dense matrix don't unpack again
        object.__setattr__(g, "adjacency", _readonly(adj.copy()))
        return g

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (read-only)."""
        adj = np.unpackbits(self.packed, axis=1, count=self.n).astype(bool)
        return _readonly(adj)

    @cached_property
    def adjacency_float(self) -> np.ndarray:
        return _readonly(self.adjacency.astype(np.float64))

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """Neighbor ids per row, padded with -1 to the maximum degree."""
        width = max(int(self.degrees.max()), 1)
        table = np.full((self.n, width), -1, dtype=np.int64)
        for u in range(self.n):
            nb = np.flatnonzero(self.adjacency[u])
            table[u, : nb.size] = nb
        return _readonly(table)

    def neighbors(self, v: int) -> np.ndarray:
        self.check_vertex(v)
        return np.flatnonzero(self.adjacency[v])

    def has_edge(self, u: int, w: int) -> bool:
        return bool(self.adjacency[u, w])

    def check_vertex(self, v) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise ParameterError(f"invalid vertex id {v!r} for graph on {self.n} vertices")
        return int(v)

    @property
    def stationary(self) -> np.ndarray:
        """pi(w) = deg(w) / 2|E|."""
        return self.degrees / (2.0 * self.edge_count)

    @property
    def empirical_p(self) -> float:
        return 2.0 * self.edge_count / (self.n * (self.n - 1))

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges u < w in lexicographic order."""
        iu, iw = np.nonzero(np.triu(self.adjacency, k=1))
        return np.column_stack([iu, iw])

    def __eq__(self, other):
        if not isinstance(other, ErGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.p == other.p
            and self.seed == other.seed
            and np.array_equal(self.packed, other.packed)
        )

    __hash__ = None


def generate_er(n: int, p: float, seed: int) -> ErGraph:
    """Sample G(n, p): every unordered pair is an edge independently with probability p."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"p must lie in (0, 1], got {p!r}")
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    # row-by-row draws consume the same stream as one flat draw over the pairs
    for i in range(n - 1):
        adj[i, i + 1 :] = rng.random(n - 1 - i) < p
    adj |= adj.T
    return ErGraph.from_adjacency(adj, p=p, seed=seed)


def from_edges(n: int, edges: Iterable[tuple[int, int]], p: float | None = None, seed: int = 0) -> ErGraph:
    adj = np.zeros((n, n), dtype=bool)
    for u, w in edges:
        if u == w:
            raise ParameterError(f"self-loop at {u}")
        adj[u, w] = adj[w, u] = True
    return ErGraph.from_adjacency(adj, p=p, seed=seed)


def complete_graph(n: int) -> ErGraph:
    return ErGraph.from_adjacency(~np.eye(n, dtype=bool), p=1.0)


def star_graph(n: int) -> ErGraph:
    """Star on n vertices with center 0."""
    return from_edges(n, [(0, k) for k in range(1, n)])


def cycle_graph(n: int) -> ErGraph:
    return from_edges(n, [(k, (k + 1) % n) for k in range(n)])


def path_graph(n: int) -> ErGraph:
    return from_edges(n, [(k, k + 1) for k in range(n - 1)])


def disjoint_union(*graphs: ErGraph) -> ErGraph:
    n = sum(g.n for g in graphs)
    adj = np.zeros((n, n), dtype=bool)
    off = 0
    for g in graphs:
        adj[off : off + g.n, off : off + g.n] = g.adjacency
        off += g.n
    return ErGraph.from_adjacency(adj)


def bfs_distances(g: ErGraph, source: int) -> np.ndarray:
    """Graph distances from ``source``; -1 marks unreachable vertices."""
    source = g.check_vertex(source)
    adj = g.adjacency
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.zeros(g.n, dtype=bool)
    frontier[source] = True
    d = 0
    while frontier.any():
        d += 1
        reached = adj[frontier].any(axis=0) & (dist < 0)
        dist[reached] = d
        frontier = reached
    return dist


def is_connected(g: ErGraph) -> bool:
    return bool((bfs_distances(g, 0) >= 0).all())


@dataclass(frozen=True)
class TargetDecomposition:
    """Vertices grouped by their distance to ``target``: 1 (set_a), 2 (set_b), farther."""

    target: int
    set_a: np.ndarray
    set_b: np.ndarray
    beyond: np.ndarray

    def neighbors_in_a(self, g: ErGraph, w: int) -> np.ndarray:
        """N_A(w): neighbors of w that are adjacent to the target."""
        return self.set_a[g.adjacency[w, self.set_a]]


def decompose(g: ErGraph, v: int) -> TargetDecomposition:
    dist = bfs_distances(g, v)
    return TargetDecomposition(
        target=int(v),
        set_a=np.flatnonzero(dist == 1),
        set_b=np.flatnonzero(dist == 2),
        beyond=np.flatnonzero((dist >= 3) | (dist < 0)),
    )


@dataclass(frozen=True)
class DegreeStats:
    max_abs_deviation: float
    normalized: float


def degree_stats(g: ErGraph) -> DegreeStats:
    """Largest |deg(v) - n p|, also scaled by sqrt(n log n)."""
    dev = float(np.abs(g.degrees - g.n * g.p).max())
    return DegreeStats(max_abs_deviation=dev, normalized=dev / math.sqrt(g.n * math.log(g.n)))


# -- edge-list serialization --------------------------------------------------


def write_edgelist(g: ErGraph, dest: str | os.PathLike | TextIO) -> None:
    """Header ``n p seed`` then one ``u v`` line per edge, 0-based."""
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            write_edgelist(g, fh)
        return
    dest.write(f"{g.n} {g.p!r} {g.seed}\n")
    buf = io.StringIO()
    np.savetxt(buf, g.edges(), fmt="%d")
    dest.write(buf.getvalue())


def read_edgelist(src: str | os.PathLike | TextIO) -> ErGraph:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            return read_edgelist(fh)
    header = src.readline().split()
    if len(header) != 3:
        raise ParameterError("edge list header must be 'n p seed'")
    n, p, seed = int(header[0]), float(header[1]), int(header[2])
    edges = []
    for lineno, line in enumerate(src, start=2):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParameterError(f"line {lineno}: expected 'u v'")
        u, w = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= w < n):
            raise ParameterError(f"line {lineno}: vertex out of range")
        edges.append((u, w))
    return from_edges(n, edges, p=p, seed=seed)
