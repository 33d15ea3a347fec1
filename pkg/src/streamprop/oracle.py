"""Query access to a graph: random vertex, random neighbour and random edge.

Every oracle owns one ``random.Random`` generator.  Independent workers get
independent generators through :func:`derive_seed`, which is the fixed,
documented hash

    derive_seed(master, index) = first 8 bytes (big endian) of
                                 SHA-256(b"streamprop:<master>:<index>")

so that a whole experiment suite is reproducible from one master seed.
"""

from __future__ import annotations

import hashlib
import random

from .errors import EmptyGraph, NoEdges, VertexOutOfRange
from .graph import Graph


def derive_seed(master: int, index: int) -> int:
    digest = hashlib.sha256(f"streamprop:{int(master)}:{int(index)}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class QueryOracle:
    """Random-neighbor / random-edge oracle over a fixed graph.

    ``random_neighbor`` returns ``None`` for an isolated vertex instead of
    raising; callers treat that as "no neighbour".
    """

    def __init__(self, graph: Graph, seed: int = 0):
        self.graph = graph
        self.seed = seed
        self.rng = random.Random(seed)
        self.query_count = 0

    def random_vertex(self) -> int:
        self.query_count += 1
        if self.graph.n == 0:
            raise EmptyGraph("cannot sample a vertex from an empty graph")
        return self.rng.randrange(self.graph.n)

    def random_neighbor(self, v: int) -> int | None:
        g = self.graph
        if not 0 <= v < g.n:
            raise VertexOutOfRange(v, g.n)
        self.query_count += 1
        nbrs = g.adjacency[v]
        if not nbrs:
            return None
        return nbrs[self.rng.randrange(len(nbrs))]

    def random_edge(self) -> tuple[int, int]:
        self.query_count += 1
        edges = self.graph.edges
        if not edges:
            raise NoEdges("graph has no edges")
        u, v = edges[self.rng.randrange(len(edges))]
        if self.rng.getrandbits(1):
            return v, u
        return u, v
