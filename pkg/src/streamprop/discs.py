"""Disc types: canonical codes, isomorphism, stitching and decomposition.

A rooted coloured graph is canonicalised by the lexicographically smallest
encoding over all vertex orderings.  Each vertex contributes one chunk::

    (root flag, colour flag, colour, adjacency bits to earlier vertices)

so roots come first, then coloured vertices by colour, then the rest.  The
search only ever extends an ordering with a vertex whose chunk is minimal
(any other choice is strictly larger) and branches on one representative per
class of twins, which swap by an automorphism.  The result is the exact
minimum, computed without walking all ``k!`` orderings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    ColorRepeatedWithinDisc,
    DiscTooLarge,
    InvalidParameter,
    NotDecomposable,
    PaletteTooLarge,
)
from .graph import Edge, Subgraph, as_subgraph, norm_edge
from .rbfs import RootedDisc, c_bound

DEFAULT_CAP = 16

_NO_COLOR = 0xFFFFFFFF


def _label(sub: Subgraph, v: int) -> tuple[int, int, int]:
    c = sub.color_map.get(v)
    return (0 if v in sub.roots else 1, 0 if c is not None else 1, c if c is not None else _NO_COLOR)


def _encode(chunks: Sequence[tuple]) -> bytes:
    out = bytearray(len(chunks).to_bytes(2, "big"))
    for (root_flag, color_flag, color), bits in chunks:
        out.append(root_flag)
        out.append(color_flag)
        out += int(color).to_bytes(4, "big")
        packed = 0
        for b in bits:
            packed = (packed << 1) | b
        out += packed.to_bytes((len(bits) + 7) // 8, "big")
    return bytes(out)


def canonical_code(h, cap: int = DEFAULT_CAP) -> bytes:
    """Canonical byte code of a rooted, partially coloured graph.

    ``code(a) == code(b)`` iff ``a`` and ``b`` are isomorphic by a bijection
    that maps roots to roots and keeps every colour.
    """
    sub = as_subgraph(h)
    k = len(sub.vertices)
    if k > cap:
        raise DiscTooLarge(f"{k} vertices exceeds canonicalisation cap {cap}")
    adj = sub.adjacency
    lab = {v: _label(sub, v) for v in sub.vertices}
    best: list | None = None

    def twins(u: int, w: int) -> bool:
        return lab[u] == lab[w] and (adj[u] - {w}) == (adj[w] - {u})

    def rec(prefix: list[int], remaining: set[int], chunks: list) -> None:
        nonlocal best
        if not remaining:
            if best is None or chunks < best:
                best = list(chunks)
            return
        j = len(prefix)
        # adjacency bits are inverted so that orderings following edges win
        cand = {v: (lab[v], tuple(0 if p in adj[v] else 1 for p in prefix)) for v in remaining}
        low = min(cand.values())
        if best is not None:
            probe = chunks + [low]
            if probe > best[: j + 1]:
                return
        reps: list[int] = []
        for v in sorted(remaining):
            if cand[v] == low and not any(twins(v, r) for r in reps):
                reps.append(v)
        chunks.append(low)
        for v in reps:
            prefix.append(v)
            remaining.discard(v)
            rec(prefix, remaining, chunks)
            remaining.add(v)
            prefix.pop()
        chunks.pop()

    rec([], set(sub.vertices), [])
    return _encode(best or [])


def code_hex(h, cap: int = DEFAULT_CAP) -> str:
    return canonical_code(h, cap).hex()


def is_isomorphic(d1, d2, cap: int = DEFAULT_CAP) -> bool:
    return canonical_code(d1, cap) == canonical_code(d2, cap)


def isomorphic_by_permutation(h1, h2) -> bool:
    """Brute-force root- and colour-preserving isomorphism test.

    Tries every bijection that maps each label class (root flag, colour) onto
    the same class.  Exponential; meant for small graphs and as a check on
    :func:`canonical_code`.
    """
    a, b = as_subgraph(h1), as_subgraph(h2)
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return False
    classes_a: dict[tuple, list[int]] = {}
    classes_b: dict[tuple, list[int]] = {}
    for v in sorted(a.vertices):
        classes_a.setdefault(_label(a, v), []).append(v)
    for v in sorted(b.vertices):
        classes_b.setdefault(_label(b, v), []).append(v)
    if {k: len(v) for k, v in classes_a.items()} != {k: len(v) for k, v in classes_b.items()}:
        return False
    keys = sorted(classes_a)
    src = [v for k in keys for v in classes_a[k]]
    for parts in itertools.product(*(itertools.permutations(classes_b[k]) for k in keys)):
        dst = [v for p in parts for v in p]
        f = dict(zip(src, dst))
        if all(norm_edge(f[u], f[v]) in b.edges for u, v in a.edges):
            return True
    return False


# -- bounded discs -----------------------------------------------------------


def is_bounded_disc(h, root: int, q: int) -> bool:
    """Whether ``h`` (rooted at ``root``) can be the exact output of a q-RBFS.

    Checked by nondeterministically running the exploration on ``h`` itself:
    every popped vertex picks an ordered set of 1..q distinct neighbours
    (the order of first appearance among its q draws).
    """
    sub = as_subgraph(h)
    if root not in sub.vertices:
        return False
    target = sub.edges
    adj = {v: sorted(ns) for v, ns in sub.adjacency.items()}
    failed: set = set()

    def run(queue: tuple, label: dict, popped: frozenset, edges: frozenset) -> bool:
        if not queue:
            return edges == target
        key = (queue, tuple(sorted(label.items())), popped, edges)
        if key in failed:
            return False
        u, rest = queue[0], queue[1:]
        nbrs = adj[u]
        done = popped | {u}
        if not nbrs:
            ok = run(rest, label, done, edges)
        else:
            ok = False
            lu = label[u]
            for size in range(1, min(q, len(nbrs)) + 1):
                for seq in itertools.permutations(nbrs, size):
                    new_edges = edges | {norm_edge(u, s) for s in seq}
                    # edges between u and already-popped vertices can never appear later
                    if any(norm_edge(u, w) not in new_edges for w in nbrs if w in popped):
                        continue
                    new_label = dict(label)
                    new_queue = list(rest)
                    if lu < q - 1:
                        for s in seq:
                            if s not in new_label:
                                new_label[s] = lu + 1
                                new_queue.append(s)
                    if run(tuple(new_queue), new_label, done, new_edges):
                        ok = True
                        break
                if ok:
                    break
        if not ok:
            failed.add(key)
        return ok

    return run((root,), {root: 0}, frozenset(), frozenset())


def disc_from_subgraph(h, root: int, coloring: Mapping[int, int] | None = None) -> RootedDisc:
    """Wrap a connected rooted subgraph as a ``RootedDisc`` (BFS discovery order)."""
    sub = as_subgraph(h)
    adj = sub.adjacency
    depth = {root: 0}
    order = [root]
    for v in order:
        for w in sorted(adj[v]):
            if w not in depth:
                depth[w] = depth[v] + 1
                order.append(w)
    if len(order) != len(sub.vertices):
        raise InvalidParameter("disc must be connected")
    coloring = sub.color_map if coloring is None else coloring
    cs = tuple(sorted((v, coloring[v]) for v in order if v in coloring))
    return RootedDisc(root, tuple(order), sub.edges, tuple(depth[v] for v in order), cs)


# -- coloured multisets, stitching and decomposition -------------------------


@dataclass(frozen=True, eq=False)
class ColoredDiscMultiset:
    """A multiset of coloured rooted discs; equal when their types agree."""

    discs: tuple[RootedDisc, ...]

    @classmethod
    def build(
        cls,
        discs: Iterable[RootedDisc],
        palette_bound: float | None = None,
        allow_large_palette: bool = False,
    ) -> "ColoredDiscMultiset":
        discs = tuple(discs)
        out = cls(discs)
        if palette_bound is not None and not allow_large_palette and len(out.palette) > palette_bound:
            raise PaletteTooLarge(f"{len(out.palette)} colours exceed bound {palette_bound}")
        return out

    @cached_property
    def palette(self) -> frozenset[int]:
        return frozenset(c for d in self.discs for _, c in d.colors)

    @cached_property
    def key(self) -> tuple[bytes, ...]:
        return tuple(sorted(canonical_code(d) for d in self.discs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredDiscMultiset):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __len__(self) -> int:
        return len(self.discs)


def palette_bound(q: int, alpha: float) -> float:
    return c_bound(q) / alpha


def stitch(s: ColoredDiscMultiset | Sequence[RootedDisc]) -> Subgraph:
    """Glue discs together by identifying every pair of equally coloured vertices.

    Output ids: colours first (ascending colour id), then the uncoloured
    vertices of each disc in the disc's discovery order.
    """
    discs = s.discs if isinstance(s, ColoredDiscMultiset) else tuple(s)
    for d in discs:
        cs = [c for _, c in d.colors]
        if len(cs) != len(set(cs)):
            raise ColorRepeatedWithinDisc(f"disc rooted at {d.root} repeats a colour")
    palette = sorted({c for d in discs for _, c in d.colors})
    color_id = {c: i for i, c in enumerate(palette)}
    next_id = len(palette)
    edges: set[Edge] = set()
    roots: set[int] = set()
    vertices: set[int] = set(color_id.values())
    for d in discs:
        cmap = d.color_map
        local: dict[int, int] = {}
        for v in d.vertices:
            if v in cmap:
                local[v] = color_id[cmap[v]]
            else:
                local[v] = next_id
                next_id += 1
            vertices.add(local[v])
        roots.add(local[d.root])
        edges.update(norm_edge(local[a], local[b]) for a, b in d.edges)
    colors = tuple((i, c) for c, i in color_id.items())
    return Subgraph(frozenset(vertices), frozenset(edges), frozenset(roots), colors)


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def decompose(
    f,
    coloring: Mapping[int, int] | None,
    q: int,
    max_vertices: int = DEFAULT_CAP,
    max_assignments: int = 1_000_000,
) -> list[ColoredDiscMultiset]:
    """All ways to split a rooted coloured graph into coloured q-bounded discs.

    One disc per root; discs share only coloured vertices and no edges, and
    stitching any returned multiset gives back ``f`` up to isomorphism.
    Distinct multisets (as multisets of disc types) are returned once each.
    """
    sub = as_subgraph(f)
    if len(sub.vertices) > max_vertices:
        raise DiscTooLarge(f"{len(sub.vertices)} vertices exceeds decomposition cap {max_vertices}")
    colors = dict(sub.color_map if coloring is None else coloring)
    colors = {v: c for v, c in colors.items() if v in sub.vertices}
    if len(set(colors.values())) != len(colors):
        raise ColorRepeatedWithinDisc("a colour marks more than one vertex")
    roots = sorted(sub.roots)
    if not roots:
        raise NotDecomposable("graph has no roots")
    R = len(roots)
    uncolored = [v for v in sorted(sub.vertices) if v not in colors]
    dsu = _DSU(uncolored)
    for a, b in sub.edges:
        if a not in colors and b not in colors:
            dsu.union(a, b)
    comp_owner: dict[int, int] = {}
    for i, r in enumerate(roots):
        if r in colors:
            continue
        c = dsu.find(r)
        if c in comp_owner:
            raise NotDecomposable("two roots share an uncoloured component")
        comp_owner[c] = i
    free_comps = sorted({dsu.find(v) for v in uncolored} - set(comp_owner))
    free_edges = sorted(e for e in sub.edges if e[0] in colors and e[1] in colors)
    slots = len(free_comps) + len(free_edges)
    if R**slots > max_assignments:
        raise DiscTooLarge(f"{R}**{slots} edge assignments exceed the search cap")

    bounded_cache: dict[tuple, bool] = {}
    found: dict[tuple, ColoredDiscMultiset] = {}
    for choice in itertools.product(range(R), repeat=slots):
        owner = dict(comp_owner)
        owner.update(zip(free_comps, choice[: len(free_comps)]))
        disc_edges: list[set[Edge]] = [set() for _ in range(R)]
        for e, i in zip(free_edges, choice[len(free_comps):]):
            disc_edges[i].add(e)
        for a, b in sub.edges:
            if a in colors and b in colors:
                continue
            x = a if a not in colors else b
            disc_edges[owner[dsu.find(x)]].add((a, b))
        covered: set[int] = set()
        discs = []
        for i, r in enumerate(roots):
            es = frozenset(disc_edges[i])
            part = Subgraph.make([r], es, [r])
            covered |= part.vertices
            try:
                disc = disc_from_subgraph(part, r, colors)
            except InvalidParameter:
                break
            ck = (r, es)
            if ck not in bounded_cache:
                bounded_cache[ck] = is_bounded_disc(part, r, q)
            if not bounded_cache[ck]:
                break
            discs.append(disc)
        else:
            if covered != sub.vertices:
                continue
            ms = ColoredDiscMultiset(tuple(discs))
            found.setdefault(ms.key, ms)
    if not found:
        raise NotDecomposable("no cover by edge-disjoint coloured bounded discs exists")
    return list(found.values())
