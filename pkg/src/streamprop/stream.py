"""Random-order edge streams and the single-pass bounded-disc collector.

A collector rooted at ``v`` keeps, for each vertex it has collected, a
distance label ``l`` and an intra-disc degree ``d``.  An arriving edge is
admitted when it touches the collected set and at least one collected
endpoint ``x`` has ``l[x] < q`` and ``d[x] < q**(2q)``.  Labels start at
infinity for everything but the root, degrees at zero, and only collected
vertices are stored, so the state never depends on ``n`` or ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidGraph, InvalidParameter, VertexOutOfRange
from .graph import Edge, Graph, build_graph, norm_edge
from .rbfs import RootedDisc

INF = float("inf")

# words per stored item: vertex id + label + degree, edge endpoints
WORDS_PER_VERTEX = 3
WORDS_PER_EDGE = 2
WORDS_PER_INDEX_ENTRY = 1


def c_prime(q: int) -> int:
    return sum(q ** (2 * q * i) for i in range(q + 2))


def edge_capacity(q: int) -> int:
    """Admitted-edge budget of one collector: every admitted edge is charged to
    an open endpoint, and at most ``sum(q**(2q*i), i < q)`` vertices can ever
    be open (exact for ``q <= 2``)."""
    return q ** (2 * q) * sum(q ** (2 * q * i) for i in range(q))


def collector_words(q: int) -> int:
    """Words reserved per collector: vertex table, edge buffer and index slots."""
    return (WORDS_PER_VERTEX + WORDS_PER_INDEX_ENTRY) * c_prime(q) + WORDS_PER_EDGE * edge_capacity(q)


@dataclass(frozen=True, eq=False)
class StreamOrder:
    """A permutation of a graph's edges; ``order[t]`` is the edge index read at step ``t``."""

    graph: Graph
    order: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if len(self.order) != self.graph.m or (
            self.graph.m and not np.array_equal(np.sort(self.order), np.arange(self.graph.m))
        ):
            raise InvalidParameter("order must be a permutation of the edge indices")

    def __len__(self) -> int:
        return self.graph.m

    def __iter__(self) -> Iterator[Edge]:
        edges = self.graph.edges
        for i in self.order.tolist():
            yield edges[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StreamOrder):
            return NotImplemented
        return self.graph == other.graph and np.array_equal(self.order, other.order)

    def __hash__(self) -> int:
        return hash((self.graph, self.order.tobytes()))


def random_order(g: Graph, seed: int) -> StreamOrder:
    """Uniformly random edge order (Fisher-Yates via numpy), reproducible per seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return StreamOrder(g, rng.permutation(g.m).astype(np.int64), seed)


def order_from_edges(g: Graph, stream: Sequence[tuple[int, int]]) -> StreamOrder:
    idx = g.edge_index
    try:
        order = np.array([idx[norm_edge(u, v)] for u, v in stream], dtype=np.int64)
    except KeyError as exc:
        raise InvalidGraph(f"stream edge {exc} is not in the graph") from None
    return StreamOrder(g, order)


def parse_stream(text: str) -> StreamOrder:
    """Stream file: header ``n m`` then ``m`` lines ``u v`` in arrival order."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InvalidGraph("missing 'n m' header")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise InvalidGraph(f"malformed stream: {exc}") from None
    if len(pairs) != m:
        raise InvalidGraph(f"header announces {m} edges, found {len(pairs)}")
    if len({norm_edge(u, v) for u, v in pairs}) != m:
        raise InvalidGraph("a stream may not repeat an edge")
    g = build_graph(n, pairs)
    return order_from_edges(g, pairs)


def format_stream(s: StreamOrder) -> str:
    lines = [f"{s.graph.n} {s.graph.m}"]
    lines.extend(f"{u} {v}" for u, v in s)
    return "\n".join(lines) + "\n"


def read_stream(path: str | Path) -> StreamOrder:
    return parse_stream(Path(path).read_text())


@dataclass
class SpaceMeter:
    """Allocation counter for collector state.

    Each collector reserves ``collector_words(q)`` words when it starts.
    ``live_words`` tracks what is actually occupied; occupancy beyond a
    collector's reservation is allocated on top and counted in ``overflow``.
    """

    words: int = 0
    peak_words: int = 0
    live_words: int = 0
    peak_live_words: int = 0
    overflow: int = 0
    edges_seen: int = 0

    def add(self, w: int) -> None:
        self.words += w
        if self.words > self.peak_words:
            self.peak_words = self.words

    def occupy(self, w: int) -> None:
        self.live_words += w
        if self.live_words > self.peak_live_words:
            self.peak_live_words = self.live_words


class CollectorState:
    """State of one StreamCollect run."""

    __slots__ = ("root", "q", "cap", "label", "deg", "edges", "order", "meter", "used", "budget", "per_vertex")

    def __init__(self, root: int, q: int, meter: SpaceMeter | None = None, indexed: bool = False):
        if q < 1:
            raise InvalidParameter(f"q must be >= 1, got {q}")
        self.root = root
        self.q = q
        self.cap = q ** (2 * q)
        self.label: dict[int, float] = {root: 0}
        self.deg: dict[int, int] = {root: 0}
        self.edges: list[Edge] = []
        self.order: list[int] = [root]
        self.meter = meter
        self.used = 0
        self.budget = collector_words(q)
        # an indexed collector also pays for its vertex -> collector entries
        self.per_vertex = WORDS_PER_VERTEX + (WORDS_PER_INDEX_ENTRY if indexed else 0)
        if meter is not None:
            meter.add(self.budget)
            self._occupy(self.per_vertex)

    def _occupy(self, w: int) -> None:
        self.meter.occupy(w)
        self.used += w
        if self.used > self.budget:
            self._grow()

    def _grow(self) -> None:
        extra = self.used - self.budget
        self.meter.add(extra)
        self.meter.overflow += extra
        self.budget = self.used

    def _open(self, x: int) -> bool:
        return x in self.label and self.label[x] < self.q and self.deg[x] < self.cap

    def offer(self, u: int, w: int) -> bool:
        """Feed one stream edge; returns whether it was admitted."""
        label = self.label
        deg = self.deg
        lu = label.get(u)
        lw = label.get(w)
        q, cap = self.q, self.cap
        if not (
            (lu is not None and lu < q and deg[u] < cap) or (lw is not None and lw < q and deg[w] < cap)
        ):
            return False
        added = 0
        if lu is None:
            lu = INF
            deg[u] = 0
            self.order.append(u)
            added += 1
        if lw is None:
            lw = INF
            deg[w] = 0
            self.order.append(w)
            added += 1
        deg[u] += 1
        deg[w] += 1
        if lw + 1 < lu:
            lu = lw + 1
        if lu + 1 < lw:
            lw = lu + 1
        label[u] = lu
        label[w] = lw
        self.edges.append((u, w) if u < w else (w, u))
        meter = self.meter
        if meter is not None:
            # inlined _occupy: this is the hot path
            occ = self.per_vertex * added + WORDS_PER_EDGE
            meter.live_words += occ
            if meter.live_words > meter.peak_live_words:
                meter.peak_live_words = meter.live_words
            self.used += occ
            if self.used > self.budget:
                self._grow()
        return True

    def disc(self) -> RootedDisc:
        return RootedDisc(
            self.root,
            tuple(self.order),
            frozenset(self.edges),
            tuple(int(self.label[v]) for v in self.order),
        )


def stream_collect(s: StreamOrder, v: int, q: int) -> RootedDisc:
    """Collect a bounded disc around ``v`` in one pass over ``s``."""
    if not 0 <= v < s.graph.n:
        raise VertexOutOfRange(v, s.graph.n)
    c = CollectorState(v, q)
    for u, w in s:
        c.offer(u, w)
    return c.disc()


def multi_collect(
    s: StreamOrder,
    roots: Sequence[int],
    q: int,
    meter: SpaceMeter | None = None,
) -> list[RootedDisc]:
    """Independent collectors for every root (duplicates allowed), one shared pass.

    Returns one disc per entry of ``roots``, in the same order.  Edges are
    routed only to collectors that already hold an endpoint, through a
    vertex -> collectors index whose size is bounded by the collectors' state.
    """
    if not roots:
        raise InvalidParameter("roots must be non-empty")
    for v in roots:
        if not 0 <= v < s.graph.n:
            raise VertexOutOfRange(v, s.graph.n)
    collectors = [CollectorState(v, q, meter, indexed=True) for v in roots]
    index: dict[int, list[int]] = {}
    for i, v in enumerate(roots):
        index.setdefault(v, []).append(i)
    seen = 0
    for u, w in s:
        seen += 1
        hu = index.get(u)
        hw = index.get(w)
        if hu is None:
            if hw is None:
                continue
            targets = hw
        elif hw is None:
            targets = hu
        else:
            targets = set(hu).union(hw)
        for i in tuple(targets):
            c = collectors[i]
            k = len(c.order)
            if c.offer(u, w):
                for x in c.order[k:]:
                    index.setdefault(x, []).append(i)
    if meter is not None:
        meter.edges_seen += seen
    return [c.disc() for c in collectors]
