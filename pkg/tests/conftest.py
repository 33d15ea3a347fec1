"""Shared corpora and independent reference implementations for the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from streamprop.graph import Graph, build_graph, norm_edge
from streamprop.rbfs import random_bfs


def small_connected_graphs(max_n: int = 6, max_m: int = 6) -> list[Graph]:
    """Every connected graph (up to isomorphism) with at most ``max_n`` vertices and ``max_m`` edges."""
    out = []
    for h in nx.graph_atlas_g():
        n, m = h.number_of_nodes(), h.number_of_edges()
        if 1 <= n <= max_n and m <= max_m and nx.is_connected(h):
            out.append(build_graph(n, h.edges()))
    return out


def small_graphs(max_n: int = 7, max_m: int = 6) -> list[Graph]:
    """Every graph (connected or not) from the atlas with the given bounds."""
    out = []
    for h in nx.graph_atlas_g():
        n, m = h.number_of_nodes(), h.number_of_edges()
        if 1 <= n <= max_n and m <= max_m:
            out.append(build_graph(n, h.edges()))
    return out


@pytest.fixture(scope="session")
def connected_corpus() -> list[Graph]:
    return small_connected_graphs()


class _Exhausted(Exception):
    pass


class ReplayOracle:
    """Answers ``random_neighbor`` from a fixed list of neighbour indices."""

    def __init__(self, graph: Graph, script: tuple[int, ...]):
        self.graph = graph
        self.script = script
        self.pos = 0
        self.query_count = 0
        self.branching: list[int] = []

    def random_neighbor(self, v: int):
        self.query_count += 1
        nbrs = self.graph.adjacency[v]
        if not nbrs:
            return None
        if self.pos == len(self.script):
            self.branching.append(len(nbrs))
            raise _Exhausted
        i = self.script[self.pos]
        self.pos += 1
        return nbrs[i]


def rbfs_distribution_by_replay(g: Graph, v: int, q: int) -> dict:
    """Exact RBFS output distribution by replaying every draw sequence through ``random_bfs``."""
    dist: dict = {}

    def rec(script: tuple[int, ...], p: Fraction) -> None:
        o = ReplayOracle(g, script)
        try:
            d = random_bfs(o, v, q)
        except _Exhausted:
            k = o.branching[-1]
            for i in range(k):
                rec(script + (i,), p / k)
            return
        key = (d.edges, d.vertex_set)
        dist[key] = dist.get(key, 0) + p

    rec((), Fraction(1))
    return dist


def naive_stream_collect(g: Graph, stream: list[tuple[int, int]], v: int, q: int):
    """Literal transcription of the collector with arrays over every vertex."""
    inf = float("inf")
    label = [inf] * g.n
    deg = [0] * g.n
    label[v] = 0
    U = {v}
    F = set()
    cap = q ** (2 * q)
    for a, b in stream:
        if a not in U and b not in U:
            continue
        if not any(x in U and label[x] < q and deg[x] < cap for x in (a, b)):
            continue
        U |= {a, b}
        F.add(norm_edge(a, b))
        deg[a] += 1
        deg[b] += 1
        label[a] = min(label[a], label[b] + 1)
        label[b] = min(label[b], label[a] + 1)
    return frozenset(F), frozenset(U)


def stream_distribution_by_enumeration(g: Graph, v: int, q: int) -> dict:
    counts: dict = {}
    total = 0
    for perm in itertools.permutations(g.edges):
        key = naive_stream_collect(g, list(perm), v, q)
        counts[key] = counts.get(key, 0) + 1
        total += 1
    return {k: Fraction(c, total) for k, c in counts.items()}


def nx_rooted_colored(sub) -> nx.Graph:
    h = nx.Graph()
    cmap = sub.color_map
    for x in sub.vertices:
        h.add_node(x, root=x in sub.roots, color=cmap.get(x))
    h.add_edges_from(sub.edges)
    return h


def nx_isomorphic(a, b) -> bool:
    """Root- and colour-preserving isomorphism via networkx (independent of the package)."""
    return nx.is_isomorphic(
        nx_rooted_colored(a),
        nx_rooted_colored(b),
        node_match=lambda x, y: x["root"] == y["root"] and x["color"] == y["color"],
    )


_PERMS: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _perm_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All orderings of ``n`` vertices and, per ordering, the flat adjacency index of each upper-triangle slot."""
    if n not in _PERMS:
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
        iu, ju = np.triu_indices(n, 1)
        _PERMS[n] = (perms, perms[:, iu] * n + perms[:, ju])
    return _PERMS[n]


def brute_canonical_form(sub) -> tuple:
    """Minimum over all vertex orderings of (labels, adjacency bits); no pruning."""
    vs = sorted(sub.vertices)
    n = len(vs)
    perms, slots = _perm_tables(n)
    idx = {v: i for i, v in enumerate(vs)}
    cmap = sub.color_map
    lab = np.array([(0 if v in sub.roots else 1) * 1000 + cmap.get(v, 999) for v in vs], dtype=np.int64)
    adj = np.zeros(n * n, dtype=np.int64)
    for a, b in sub.edges:
        adj[idx[a] * n + idx[b]] = adj[idx[b] * n + idx[a]] = 1
    rows = np.concatenate([lab[perms], adj[slots]], axis=1)
    # lexicographic minimum: keep the rows that tie on every column so far
    for col in range(rows.shape[1]):
        vals = rows[:, col]
        rows = rows[vals == vals.min()]
    return (n, tuple(rows[0].tolist()) if len(rows) else ())
