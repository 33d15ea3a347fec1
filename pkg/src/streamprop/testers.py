"""Canonical query testers, the streaming tester and built-in property families."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EmptyGraph, InvalidParameter, NoEdges
from .graph import Graph, Subgraph, union_all
from .oracle import QueryOracle
from .patterns import ForbiddenFamily, Witness, contains_forbidden, read_pattern
from .rbfs import c_bound, random_bfs
from .stream import WORDS_PER_EDGE, SpaceMeter, StreamOrder, multi_collect

MODES = ("neighbor", "neighbor/edge")


@dataclass(frozen=True)
class TesterParams:
    """``q`` is the amplified exploration bound; it defaults to ``c * q0``.

    ``alpha`` is optional: when given, graphs with ``n <= q*c_q/alpha**2``
    are stored whole by the streaming tester and decided exactly.
    """

    q0: int = 1
    c: int = 3
    q: int | None = None
    s: int = 16
    epsilon: float = 0.1
    mode: str = "neighbor"
    alpha: Fraction | float | None = None
    anchor_repetitions: int | None = None

    def __post_init__(self):
        if self.q is None:
            object.__setattr__(self, "q", self.c * self.q0)
        if self.q0 < 1 or self.q < self.q0:
            raise InvalidParameter(f"need q >= q0 >= 1, got q={self.q}, q0={self.q0}")
        if self.s < 1:
            raise InvalidParameter(f"sample size must be >= 1, got {self.s}")
        if not 0 < self.epsilon < 1:
            raise InvalidParameter(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.mode not in MODES:
            raise InvalidParameter(f"unknown mode {self.mode!r}")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise InvalidParameter(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def repetitions(self) -> int:
        return self.q if self.anchor_repetitions is None else self.anchor_repetitions

    @property
    def n0(self) -> Fraction | None:
        if self.alpha is None:
            return None
        a = Fraction(self.alpha)
        return self.q * c_bound(self.q) / (a * a)


@dataclass
class Verdict:
    decision: str  # "accept" | "reject"
    witness: Witness | None = None
    transcript: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.decision == "reject" and self.witness is None:
            raise ValueError("a rejection needs a witness")

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_json(self) -> dict:
        return {
            "decision": self.decision,
            "witness": self.witness.to_json() if self.witness else None,
            "transcript": self.transcript,
        }


def _verdict(h: Subgraph, fam: ForbiddenFamily, transcript: dict) -> Verdict:
    w = contains_forbidden(h, fam)
    return Verdict("reject" if w else "accept", w, transcript)


def canonical_test(o: QueryOracle, p: TesterParams, fam: ForbiddenFamily) -> Verdict:
    """Sample roots, explore each with a q-RBFS, reject iff the union holds a witness.

    In ``neighbor/edge`` mode the endpoints of ``q`` random edges become
    roots as well.  Family anchors are explored ``p.repetitions`` times each.
    """
    if p.mode not in fam.modes:
        raise InvalidParameter(f"family {fam.name!r} is not available in {p.mode!r} mode")
    q = p.q
    start = o.query_count
    roots = [o.random_vertex() for _ in range(q)]
    edge_roots: list[int] = []
    if p.mode == "neighbor/edge":
        try:
            for _ in range(q):
                edge_roots.extend(o.random_edge())
        except NoEdges:
            edge_roots = []
    anchors = [a for a in fam.anchors for _ in range(p.repetitions)]
    discs = [random_bfs(o, r, q) for r in roots + edge_roots + anchors]
    h = union_all(discs)
    return _verdict(
        h,
        fam,
        {
            "mode": p.mode,
            "queries": o.query_count - start,
            "roots": roots,
            "edge_roots": edge_roots,
            "anchors": anchors,
        },
    )


def stream_test(s: StreamOrder, p: TesterParams, fam: ForbiddenFamily, seed: int = 0) -> Verdict:
    """One pass over ``s``: collect discs around ``p.s`` random roots and check their union."""
    g = s.graph
    if g.n == 0:
        raise EmptyGraph("cannot test an empty graph")
    n0 = p.n0
    if n0 is not None and g.n <= n0:
        h = Subgraph(frozenset(range(g.n)), frozenset(s), frozenset(range(g.n)))
        return _verdict(
            h, fam, {"mode": "stream", "stored_whole_graph": True, "words": WORDS_PER_EDGE * g.m, "edges_seen": g.m}
        )
    rng = random.Random(seed)
    roots = [rng.randrange(g.n) for _ in range(p.s)]
    anchors = [a for a in fam.anchors for _ in range(p.repetitions)]
    meter = SpaceMeter()
    discs = multi_collect(s, roots + anchors, p.q, meter)
    h = union_all(discs)
    return _verdict(
        h,
        fam,
        {
            "mode": "stream",
            "stored_whole_graph": False,
            "roots": roots,
            "anchors": anchors,
            "words": meter.peak_words,
            "live_words": meter.peak_live_words,
            "overflow_words": meter.overflow,
            "edges_seen": meter.edges_seen,
        },
    )


# -- built-in families ---------------------------------------------------------


def _farthest(adj: dict[int, list[int]], src: int) -> tuple[int, dict[int, int | None]]:
    parent: dict[int, int | None] = {src: None}
    frontier = [src]
    last = src
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in parent:
                    parent[w] = v
                    nxt.append(w)
        if nxt:
            last = min(nxt)
        frontier = nxt
    return last, parent


def _find_path(h: Subgraph, k: int) -> list[int] | None:
    """A simple path with ``k`` edges in ``h``, or None.

    Tree components are settled by their diameter in linear time; only
    components with a cycle fall back to exhaustive search.
    """
    adj = {v: sorted(ns) for v, ns in h.adjacency.items()}
    done: set[int] = set()
    cyclic: list[int] = []
    for v in sorted(adj):
        if v in done or not adj[v]:
            continue
        a, comp = _farthest(adj, v)
        done.update(comp)
        if len(comp) < k + 1:
            continue
        if sum(len(adj[x]) for x in comp) // 2 >= len(comp):
            cyclic.append(v)
            continue
        b, parent = _farthest(adj, a)
        diam = [b]
        while parent[diam[-1]] is not None:
            diam.append(parent[diam[-1]])
        if len(diam) >= k + 1:
            return diam[: k + 1]

    path: list[int] = []
    on_path: set[int] = set()

    def dfs(v: int) -> bool:
        path.append(v)
        on_path.add(v)
        if len(path) == k + 1:
            return True
        for w in adj[v]:
            if w not in on_path and dfs(w):
                return True
        path.pop()
        on_path.discard(v)
        return False

    for start in cyclic:
        _, comp = _farthest(adj, start)
        for v in sorted(comp):
            if dfs(v):
                return path
    return None


def _is_path(g: Graph, vs: tuple[int, ...]) -> bool:
    return len(set(vs)) == len(vs) and all(
        0 <= a < g.n and 0 <= b < g.n and g.has_edge(a, b) for a, b in zip(vs, vs[1:])
    )


def _pk_free(k: int) -> ForbiddenFamily:
    name = f"pk_free:{k}"

    def finder(h: Subgraph) -> Witness | None:
        path = _find_path(h, k)
        if path is None:
            return None
        return Witness(name, f"path_{k}", tuple(path), tuple(zip(path, path[1:])))

    def checker(g: Graph, w: Witness) -> bool:
        return len(w.vertices) == k + 1 and _is_path(g, w.vertices)

    return ForbiddenFamily(name, "predicate", finder=finder, checker=checker, params=(("k", k),))


def _d_bounded(d: int) -> ForbiddenFamily:
    name = f"d_bounded:{d}"

    def finder(h: Subgraph) -> Witness | None:
        for v in sorted(h.vertices):
            nbrs = sorted(h.adjacency[v])
            if len(nbrs) >= d + 1:
                nbrs = nbrs[: d + 1]
                return Witness(name, f"star_{d + 1}", (v, *nbrs), tuple((v, w) for w in nbrs))
        return None

    def checker(g: Graph, w: Witness) -> bool:
        center, *leaves = w.vertices
        return (
            len(leaves) >= d + 1
            and len(set(leaves)) == len(leaves)
            and 0 <= center < g.n
            and all(0 <= x < g.n and g.has_edge(center, x) for x in leaves)
        )

    return ForbiddenFamily(
        name,
        "predicate",
        finder=finder,
        checker=checker,
        modes=frozenset({"neighbor/edge"}),
        params=(("d", d),),
    )


def _st_disc(s: int, t: int, L: int) -> ForbiddenFamily:
    name = f"st_disc:{s},{t},{L}"

    def finder(h: Subgraph) -> Witness | None:
        if s not in h.vertices or t not in h.vertices:
            return None
        parent = {s: None}
        frontier = [s]
        for _ in range(L):
            nxt = []
            for v in frontier:
                for w in sorted(h.adjacency[v]):
                    if w not in parent:
                        parent[w] = v
                        nxt.append(w)
            frontier = nxt
        if t not in parent:
            return None
        path = [t]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        return Witness(name, "st_path", tuple(path), tuple(zip(path, path[1:])))

    def checker(g: Graph, w: Witness) -> bool:
        vs = w.vertices
        return bool(vs) and vs[0] == s and vs[-1] == t and len(vs) - 1 <= L and _is_path(g, vs)

    return ForbiddenFamily(
        name,
        "predicate",
        finder=finder,
        checker=checker,
        anchors=(s,),
        params=(("s", s), ("t", t), ("L", L)),
    )


def builtin_family(name: str, *args: int) -> ForbiddenFamily:
    """``pk_free(k)``, ``d_bounded(d)`` or ``st_disconnectivity(s, t, L)``."""
    if name in ("pk_free", "pk"):
        (k,) = args
        if k < 1:
            raise InvalidParameter(f"pk_free needs k >= 1, got {k}")
        return _pk_free(k)
    if name == "d_bounded":
        (d,) = args
        if d < 0:
            raise InvalidParameter(f"d_bounded needs d >= 0, got {d}")
        return _d_bounded(d)
    if name in ("st_disconnectivity", "st_disc"):
        s, t, L = args
        if L < 1:
            raise InvalidParameter(f"st_disconnectivity needs L >= 1, got {L}")
        if s == t:
            raise InvalidParameter("s and t must differ")
        return _st_disc(s, t, L)
    raise InvalidParameter(f"unknown property {name!r}")


def parse_property(spec: str, q: int) -> ForbiddenFamily:
    """Parse ``pk_free:3``, ``d_bounded:2``, ``st_disc:s,t[,L]`` (``L`` defaults
    to ``q``) or ``pattern:<file>[,<file>...]`` for explicit pattern files."""
    name, _, arg = spec.partition(":")
    if name == "pattern":
        if not arg:
            raise InvalidParameter("pattern property needs at least one file")
        return ForbiddenFamily.explicit(spec, [(path, read_pattern(path)) for path in arg.split(",")])
    try:
        vals = [int(x) for x in arg.split(",")] if arg else []
    except ValueError:
        raise InvalidParameter(f"bad property parameters in {spec!r}") from None
    if name in ("st_disc", "st_disconnectivity") and len(vals) == 2:
        vals.append(q)
    try:
        return builtin_family(name, *vals)
    except ValueError as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(f"wrong number of parameters in {spec!r}") from None
