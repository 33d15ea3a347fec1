"""q-random BFS: breadth- and depth-bounded random exploration around a root."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import ColorRepeatedWithinDisc, InvalidParameter, VertexOutOfRange
from .graph import Edge, Graph, Subgraph, norm_edge
from .oracle import QueryOracle


def c_bound(q: int, j: int | None = None) -> int:
    """``sum(q**i for i in 0..j)``; ``j`` defaults to ``q``."""
    j = q if j is None else j
    return sum(q**i for i in range(j + 1))


@dataclass(frozen=True, eq=False)
class RootedDisc:
    """A rooted subgraph returned by a bounded exploration.

    ``vertices`` is in discovery order (root first) and ``depth`` is aligned
    with it.  Equality and hashing ignore both orders and depth labels: two
    runs producing the same rooted, coloured subgraph give equal discs.
    """

    root: int
    vertices: tuple[int, ...]
    edges: frozenset[Edge]
    depth: tuple[int, ...]
    colors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen: set[int] = set()
        for _, c in self.colors:
            if c in seen:
                raise ColorRepeatedWithinDisc(f"colour {c} used twice in disc rooted at {self.root}")
            seen.add(c)

    @classmethod
    def singleton(cls, v: int) -> "RootedDisc":
        return cls(v, (v,), frozenset(), (0,))

    @cached_property
    def key(self):
        return (self.root, frozenset(self.vertices), self.edges, self.colors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootedDisc):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def roots(self) -> frozenset[int]:
        return frozenset((self.root,))

    @cached_property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @cached_property
    def depth_map(self) -> dict[int, int]:
        return dict(zip(self.vertices, self.depth))

    @cached_property
    def color_map(self) -> dict[int, int]:
        return dict(self.colors)

    @property
    def radius(self) -> int:
        return max(self.depth)

    def layer_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for d in self.depth:
            sizes[d] += 1
        return sizes

    def with_colors(self, coloring: Mapping[int, int]) -> "RootedDisc":
        """Colour the disc's vertices that appear in ``coloring``."""
        cs = tuple(sorted((v, coloring[v]) for v in self.vertices if v in coloring))
        return RootedDisc(self.root, self.vertices, self.edges, self.depth, cs)

    def as_subgraph(self) -> Subgraph:
        return Subgraph(self.vertex_set, self.edges, self.roots, self.colors)

    def to_json(self) -> dict:
        out = {
            "root": self.root,
            "vertices": list(self.vertices),
            "depth": list(self.depth),
            "edges": [list(e) for e in sorted(self.edges)],
        }
        if self.colors:
            out["colors"] = {str(v): c for v, c in self.colors}
        return out


def random_bfs(o: QueryOracle, v: int, q: int) -> RootedDisc:
    """Run one q-RBFS from ``v`` using ``o`` for every neighbour draw.

    Each popped vertex issues exactly ``q`` random-neighbour queries (with
    replacement).  A newly drawn vertex is labelled and enqueued only when
    its parent's label is below ``q - 1``; vertices drawn from the last
    layer are kept (at depth ``q``) but never expanded.
    """
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    if not 0 <= v < o.graph.n:
        raise VertexOutOfRange(v, o.graph.n)
    label = {v: 0}
    order = [v]
    depth = {v: 0}
    edges: set[Edge] = set()
    queue = deque([v])
    while queue:
        u = queue.popleft()
        lu = label[u]
        for _ in range(q):
            s = o.random_neighbor(u)
            if s is None:
                continue
            edges.add(norm_edge(u, s))
            if s not in depth:
                depth[s] = lu + 1
                order.append(s)
            if lu < q - 1 and s not in label:
                label[s] = lu + 1
                queue.append(s)
    return RootedDisc(v, tuple(order), frozenset(edges), tuple(depth[x] for x in order))


@dataclass
class RBFSBatch:
    """Padded results of many independent q-RBFS runs (``-1`` marks padding)."""

    roots: np.ndarray
    verts: np.ndarray  # (T, c_q)
    depth: np.ndarray  # (T, c_q)
    nverts: np.ndarray  # (T,)
    edges: np.ndarray  # (T, q * c_{q-1}, 2)

    def __len__(self) -> int:
        return len(self.roots)

    def disc(self, t: int) -> RootedDisc:
        k = int(self.nverts[t])
        es = {norm_edge(int(a), int(b)) for a, b in self.edges[t] if a >= 0}
        return RootedDisc(
            int(self.roots[t]),
            tuple(int(x) for x in self.verts[t, :k]),
            frozenset(es),
            tuple(int(x) for x in self.depth[t, :k]),
        )

    def edge_masks(self, g: Graph) -> np.ndarray:
        """Bitmask of the (deduplicated) edge set of every run; needs ``g.m <= 63``."""
        if g.m > 63:
            raise InvalidParameter("edge masks need at most 63 edges")
        lookup = np.full((g.n, g.n), -1, dtype=np.int64)
        for i, (a, b) in enumerate(g.edges):
            lookup[a, b] = lookup[b, a] = i
        a, b = self.edges[..., 0], self.edges[..., 1]
        ok = a >= 0
        ids = np.where(ok, lookup[np.where(ok, a, 0), np.where(ok, b, 0)], 0)
        bits = np.where(ok, np.left_shift(np.int64(1), ids), 0)
        return np.bitwise_or.reduce(bits, axis=1)


def random_bfs_batch(g: Graph, roots, q: int, rng: np.random.Generator) -> RBFSBatch:
    """Vectorised q-RBFS over many roots at once.

    Same process as :func:`random_bfs` (same draw order per run), executed
    layer-synchronously with numpy.  Memory is ``O(T * c_q)`` regardless of
    the graph size.
    """
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    roots = np.asarray(roots, dtype=np.int64)
    T = len(roots)
    cap = c_bound(q)
    max_pops = c_bound(q, q - 1)
    indptr, indices = g.csr
    verts = np.full((T, cap), -1, dtype=np.int64)
    depth = np.full((T, cap), -1, dtype=np.int64)
    verts[:, 0] = roots
    depth[:, 0] = 0
    nverts = np.ones(T, dtype=np.int64)
    queue = np.zeros((T, max_pops), dtype=np.int64)  # slots into verts
    qlen = np.ones(T, dtype=np.int64)
    edges = np.full((T, q * max_pops, 2), -1, dtype=np.int64)
    ecount = np.zeros(T, dtype=np.int64)
    for k in range(max_pops):
        idx = np.nonzero(qlen > k)[0]
        if idx.size == 0:
            break
        slot = queue[idx, k]
        u = verts[idx, slot]
        lu = depth[idx, slot]
        start = indptr[u]
        deg = indptr[u + 1] - start
        has = deg > 0
        expand = lu < q - 1
        for _ in range(q):
            pick = rng.integers(0, np.maximum(deg, 1))
            if indices.size:
                w = np.where(has, indices[np.where(has, start + pick, 0)], -1)
            else:
                w = np.full(idx.size, -1, dtype=np.int64)
            hi, hw, hu = idx[has], w[has], u[has]
            edges[hi, ecount[hi], 0] = hu
            edges[hi, ecount[hi], 1] = hw
            ecount[hi] += 1
            present = (verts[idx] == w[:, None]).any(axis=1)
            new = has & ~present
            ni = idx[new]
            pos = nverts[ni]
            verts[ni, pos] = w[new]
            depth[ni, pos] = lu[new] + 1
            nverts[ni] += 1
            enq = new & expand
            ei = idx[enq]
            queue[ei, qlen[ei]] = nverts[ei] - 1
            qlen[ei] += 1
    return RBFSBatch(roots, verts, depth, nverts, edges)
