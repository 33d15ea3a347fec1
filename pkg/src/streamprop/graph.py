"""Immutable simple undirected graphs, rooted subgraphs and the edge-list format.

Vertices are dense 0-based integers.  The edge-list text format is::

    # optional comment lines
    n m
    u v
    ...

with ``m`` lines of whitespace-separated endpoints.  Repeated edges are
dropped on load, so ``m`` in a written file may be smaller than the number of
lines in the file it was read from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidGraph, SelfLoop, VertexOutOfRange

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edge_set

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays for vectorised neighbour sampling."""
        degs = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(degs, out=indptr[1:])
        indices = np.fromiter(
            (w for a in self.adjacency for w in a), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(v, self.n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edge_list: Iterable[tuple[int, int]]) -> Graph:
    """Build a simple graph on ``range(n)``; duplicate edges are merged."""
    if n < 0:
        raise InvalidGraph(f"negative vertex count {n}")
    seen: set[Edge] = set()
    for u, v in edge_list:
        u, v = int(u), int(v)
        for x in (u, v):
            if not 0 <= x < n:
                raise VertexOutOfRange(x, n)
        if u == v:
            raise SelfLoop(u)
        seen.add(norm_edge(u, v))
    edges = tuple(sorted(seen))
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, edges, tuple(tuple(sorted(a)) for a in adj))


def parse_edge_list(text: str) -> Graph:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows:
        raise InvalidGraph("missing 'n m' header")
    try:
        n, m = (int(x) for x in rows[0][:2])
        pairs = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise InvalidGraph(f"malformed edge list: {exc}") from None
    if len(pairs) != m:
        raise InvalidGraph(f"header announces {m} edges, found {len(pairs)}")
    return build_graph(n, pairs)


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


@dataclass(frozen=True)
class Subgraph:
    """A rooted, partially coloured subgraph in the ambient vertex-id space.

    Used for unions of explored discs, stitched graphs and forbidden patterns.
    """

    vertices: frozenset[int]
    edges: frozenset[Edge]
    roots: frozenset[int] = frozenset()
    colors: tuple[tuple[int, int], ...] = field(default=())

    @classmethod
    def make(
        cls,
        vertices: Iterable[int] = (),
        edges: Iterable[tuple[int, int]] = (),
        roots: Iterable[int] = (),
        colors: Mapping[int, int] | None = None,
    ) -> "Subgraph":
        es = frozenset(norm_edge(u, v) for u, v in edges)
        vs = set(vertices)
        for u, v in es:
            if u == v:
                raise SelfLoop(u)
            vs.update((u, v))
        rs = frozenset(roots)
        vs.update(rs)
        cs = dict(colors or {})
        vs.update(cs)
        return cls(frozenset(vs), es, rs, tuple(sorted(cs.items())))

    @cached_property
    def color_map(self) -> dict[int, int]:
        return dict(self.colors)

    @cached_property
    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def as_subgraph(self) -> "Subgraph":
        return self


def as_subgraph(h) -> Subgraph:
    """Coerce a ``Subgraph``, ``RootedDisc`` or ``Graph`` into a ``Subgraph``."""
    if isinstance(h, Graph):
        return Subgraph.make(range(h.n), h.edges)
    return h.as_subgraph()


def union(h1, h2) -> Subgraph:
    """Union of vertex, edge, root and colour sets of two rooted subgraphs."""
    a, b = as_subgraph(h1), as_subgraph(h2)
    colors = dict(a.colors)
    for v, c in b.colors:
        if colors.setdefault(v, c) != c:
            raise InvalidGraph(f"vertex {v} carries colours {colors[v]} and {c}")
    return Subgraph(
        a.vertices | b.vertices,
        a.edges | b.edges,
        a.roots | b.roots,
        tuple(sorted(colors.items())),
    )


def union_all(hs: Iterable) -> Subgraph:
    out = Subgraph(frozenset(), frozenset())
    for h in hs:
        out = union(out, h)
    return out
