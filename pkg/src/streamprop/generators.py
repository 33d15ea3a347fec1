"""Deterministic graph generators for experiment corpora."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter
from .graph import Graph, build_graph

KINDS = ("path", "cycle", "star", "clique", "er", "empty", "planted")
PATTERNS = ("path", "star")


def _size(n, least: int = 0) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < least:
        raise InvalidParameter(f"size must be an integer >= {least}, got {n!r}")
    return int(n)


def path(n: int) -> Graph:
    n = _size(n)
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    n = _size(n, 3)
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> Graph:
    """``n`` vertices, centre 0."""
    n = _size(n, 1)
    return build_graph(n, [(0, i) for i in range(1, n)])


def clique(n: int) -> Graph:
    n = _size(n)
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def empty(n: int) -> Graph:
    return build_graph(_size(n), [])


def er(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p).  Edges are drawn by geometric skipping, so sparse graphs with large ``n`` are cheap."""
    n = _size(n)
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"p must lie in [0, 1], got {p}")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return build_graph(n, [])
    rng = np.random.default_rng(seed)
    if p == 1.0:
        idx = np.arange(total, dtype=np.int64)
    else:
        # expected count plus slack; extend if the draws run short
        chunk = int(total * p + 10 * np.sqrt(total * p) + 100)
        gaps = rng.geometric(p, size=chunk)
        pos = np.cumsum(gaps) - 1
        while pos[-1] < total:
            more = np.cumsum(rng.geometric(p, size=chunk)) + pos[-1]
            pos = np.concatenate([pos, more])
        idx = pos[pos < total]
    # unrank idx -> (i, j) with i < j, row-major over the upper triangle
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(starts, idx, side="right") - 1
    j = idx - starts[i] + i + 1
    return build_graph(n, zip(i.tolist(), j.tolist()))


def pattern_edges(kind: str, k: int) -> tuple[int, list[tuple[int, int]]]:
    """Vertex count and edges of a violation pattern: ``path`` with ``k`` edges or ``star`` with ``k`` leaves."""
    k = _size(k, 1)
    if kind == "path":
        return k + 1, [(i, i + 1) for i in range(k)]
    if kind == "star":
        return k + 1, [(0, i) for i in range(1, k + 1)]
    raise InvalidParameter(f"unknown pattern {kind!r}; expected one of {PATTERNS}")


def planted(base: Graph, kind: str, k: int, seed: int = 0) -> Graph:
    """``base`` plus a copy of the pattern on uniformly chosen distinct vertices."""
    size, edges = pattern_edges(kind, k)
    if size > base.n:
        raise InvalidParameter(f"pattern needs {size} vertices, base has {base.n}")
    rng = np.random.default_rng(seed)
    at = rng.choice(base.n, size=size, replace=False).tolist()
    return build_graph(base.n, list(base.edges) + [(at[a], at[b]) for a, b in edges])


def generate(kind: str, *args, seed: int = 0) -> Graph:
    """Dispatch by name: ``generate("er", 100, 0.05, seed=3)``, ``generate("planted", base, "path", 3)``."""
    try:
        if kind == "path":
            return path(*args)
        if kind == "cycle":
            return cycle(*args)
        if kind == "star":
            return star(*args)
        if kind == "clique":
            return clique(*args)
        if kind == "empty":
            return empty(*args)
        if kind == "er":
            return er(*args, seed=seed)
        if kind == "planted":
            return planted(*args, seed=seed)
    except TypeError as exc:
        raise InvalidParameter(f"bad arguments for {kind!r}: {exc}") from None
    raise InvalidParameter(f"unknown generator {kind!r}; expected one of {KINDS}")


def _num(tok: str):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise InvalidParameter(f"not a number: {tok!r}") from None


def from_spec(spec: str, seed: int = 0) -> Graph:
    """Build a graph from a compact string.

    ``path:6``, ``cycle:5``, ``star:4``, ``clique:4``, ``empty:10``,
    ``er:100,0.05`` and ``planted:<base spec>+<path|star>:<k>``, for example
    ``planted:star:20+path:3``.
    """
    kind, _, rest = spec.partition(":")
    if kind == "planted":
        base, plus, pat = rest.rpartition("+")
        if not plus:
            raise InvalidParameter(f"planted spec needs '<base>+<pattern>:<k>', got {spec!r}")
        pkind, _, pk = pat.partition(":")
        return planted(from_spec(base, seed), pkind, _num(pk), seed=seed)
    args = [_num(t) for t in rest.split(",")] if rest else []
    return generate(kind, *args, seed=seed)
