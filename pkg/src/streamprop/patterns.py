"""Forbidden families, rejection witnesses and rooted pattern files.

Pattern files use the edge-list format with two extra directive lines::

    3 2
    root 0
    color 2 5
    0 1
    1 2

``root <v>`` marks a root, ``color <v> <c>`` gives vertex ``v`` colour ``c``.
Directive lines do not count towards ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .errors import InvalidGraph, PatternTooLarge
from .graph import Edge, Graph, Subgraph, as_subgraph, norm_edge

MAX_PATTERN_VERTICES = 12


@dataclass(frozen=True)
class Witness:
    """Evidence for a rejection: the matched pattern and where it sits in ``H``."""

    family: str
    pattern: str
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    embedding: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        out = {
            "family": self.family,
            "pattern": self.pattern,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
        }
        if self.embedding:
            out["embedding"] = {str(a): b for a, b in self.embedding}
        return out


@dataclass(frozen=True)
class ForbiddenFamily:
    """The rejection witnesses of a property.

    ``kind == "explicit"``: a list of rooted (optionally coloured) patterns,
    matched as root- and colour-compatible subgraphs.  ``kind ==
    "predicate"``: ``finder(h)`` searches ``h`` directly and ``checker(g, w)``
    re-validates a witness against the full input graph.

    ``anchors`` are vertices a tester always explores from (e.g. ``s`` for
    (s,t)-disconnectivity); ``modes`` lists the query models the family may
    be used with.
    """

    name: str
    kind: str
    patterns: tuple[tuple[str, Subgraph], ...] = ()
    finder: Callable[[Subgraph], Witness | None] | None = field(default=None, compare=False)
    checker: Callable[[Graph, Witness], bool] | None = field(default=None, compare=False)
    anchors: tuple[int, ...] = ()
    modes: frozenset[str] = frozenset({"neighbor", "neighbor/edge"})
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def explicit(cls, name: str, patterns: Iterable[tuple[str, Subgraph]]) -> "ForbiddenFamily":
        pats = tuple((label, as_subgraph(p)) for label, p in patterns)
        for label, p in pats:
            if len(p.vertices) > MAX_PATTERN_VERTICES:
                raise PatternTooLarge(f"pattern {label!r} has {len(p.vertices)} vertices")
        return cls(name=name, kind="explicit", patterns=pats)

    def validate(self, g: Graph, w: Witness) -> bool:
        """Re-check a witness against the original graph, independent of sampling."""
        if self.kind == "predicate":
            return bool(self.checker and self.checker(g, w))
        pats = dict(self.patterns)
        if w.pattern not in pats:
            return False
        p = pats[w.pattern]
        f = dict(w.embedding)
        if set(f) != set(p.vertices) or len(set(f.values())) != len(f):
            return False
        if any(not 0 <= x < g.n for x in f.values()):
            return False
        return all(g.has_edge(f[a], f[b]) for a, b in p.edges)


def find_embedding(pattern, host, require_roots: bool = True) -> dict[int, int] | None:
    """Backtracking search for an injective, edge-preserving map pattern -> host.

    Pattern roots go to host roots (when ``require_roots``) and coloured
    pattern vertices go to host vertices of the same colour.
    """
    p, h = as_subgraph(pattern), as_subgraph(host)
    if len(p.vertices) > MAX_PATTERN_VERTICES:
        raise PatternTooLarge(f"pattern has {len(p.vertices)} vertices")
    if len(p.vertices) > len(h.vertices) or len(p.edges) > len(h.edges):
        return None
    padj, hadj = p.adjacency, h.adjacency
    pcol, hcol = p.color_map, h.color_map

    # most constrained first, then grow along edges
    order: list[int] = []
    rest = set(p.vertices)
    while rest:
        frontier = [v for v in rest if any(u in order for u in padj[v])]
        pool = frontier or list(rest)
        v = max(pool, key=lambda x: (x in p.roots, x in pcol, len(padj[x]), -x))
        order.append(v)
        rest.discard(v)

    def ok(pv: int, hv: int) -> bool:
        if require_roots and pv in p.roots and hv not in h.roots:
            return False
        if pv in pcol and hcol.get(hv) != pcol[pv]:
            return False
        return len(hadj[hv]) >= len(padj[pv])

    f: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        pv = order[i]
        mapped_nbrs = [f[u] for u in padj[pv] if u in f]
        if mapped_nbrs:
            cands = set(hadj[mapped_nbrs[0]])
            for x in mapped_nbrs[1:]:
                cands &= hadj[x]
        else:
            cands = set(h.vertices)
        for hv in sorted(cands - used):
            if not ok(pv, hv):
                continue
            f[pv] = hv
            used.add(hv)
            if rec(i + 1):
                return True
            del f[pv]
            used.discard(hv)
        return False

    return dict(f) if rec(0) else None


def contains_forbidden(h, fam: ForbiddenFamily) -> Witness | None:
    """Some witness of ``fam`` inside ``h``, or ``None`` when nothing matches."""
    sub = as_subgraph(h)
    if fam.kind == "predicate":
        return fam.finder(sub)
    for label, p in fam.patterns:
        f = find_embedding(p, sub)
        if f is not None:
            edges = tuple(sorted(norm_edge(f[a], f[b]) for a, b in p.edges))
            return Witness(
                fam.name,
                label,
                tuple(sorted(f.values())),
                edges,
                tuple(sorted(f.items())),
            )
    return None


def parse_pattern(text: str) -> Subgraph:
    header = None
    edges: list[tuple[int, int]] = []
    roots: list[int] = []
    colors: dict[int, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "root":
                roots.append(int(parts[1]))
            elif parts[0] == "color":
                colors[int(parts[1])] = int(parts[2])
            elif header is None:
                header = (int(parts[0]), int(parts[1]))
            else:
                edges.append((int(parts[0]), int(parts[1])))
        except (ValueError, IndexError):
            raise InvalidGraph(f"malformed pattern line: {line!r}") from None
    if header is None:
        raise InvalidGraph("missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise InvalidGraph(f"header announces {m} edges, found {len(edges)}")
    for v in [x for e in edges for x in e] + roots + list(colors):
        if not 0 <= v < n:
            raise InvalidGraph(f"vertex {v} out of range for n={n}")
    return Subgraph.make(range(n), edges, roots, colors)


def format_pattern(p: Subgraph) -> str:
    # vertices are renumbered densely in sorted order
    ids = {v: i for i, v in enumerate(sorted(p.vertices))}
    lines = [f"{len(ids)} {len(p.edges)}"]
    lines += [f"root {ids[r]}" for r in sorted(p.roots)]
    lines += [f"color {ids[v]} {c}" for v, c in p.colors]
    lines += [f"{ids[a]} {ids[b]}" for a, b in sorted(p.edges)]
    return "\n".join(lines) + "\n"


def read_pattern(path: str | Path) -> Subgraph:
    return parse_pattern(Path(path).read_text())
