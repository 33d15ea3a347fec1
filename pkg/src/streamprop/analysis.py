"""Reach probabilities, exact brute-force oracles and empirical lemma checks.

Exact quantities are ``fractions.Fraction``; Monte Carlo estimates carry
their trial count and standard error.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import InsufficientTrials, InvalidParameter, StateSpaceTooLarge, TooManyEdges
from .discs import canonical_code
from .graph import Graph, norm_edge
from .oracle import derive_seed
from .patterns import find_embedding
from .rbfs import RootedDisc, c_bound, random_bfs_batch
from .stream import CollectorState, c_prime, multi_collect, random_order

MAX_BRANCHES = 10**6
MAX_STREAM_EDGES = 8


def frac_str(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


# -- parameters ---------------------------------------------------------------


def _exact_sqrt(x: Fraction) -> Fraction | None:
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


@dataclass
class Params:
    q: int
    c_q: int
    c_prime_q: int
    alpha: Fraction
    delta: Fraction | None = None
    hq_size: int | None = None
    hq_is_bound: bool = False
    cst: Fraction | None = None
    s_min: Fraction | float | None = None
    n0: Fraction | None = None
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def practical(cls, q: int, alpha, delta=None, cst=None) -> "Params":
        """Desk-scale parameters with a hand-picked ``alpha``."""
        if q < 1:
            raise InvalidParameter(f"q must be >= 1, got {q}")
        a = Fraction(alpha).limit_denominator(10**12)
        if not 0 < a:
            raise InvalidParameter(f"alpha must be positive, got {alpha}")
        cq = c_bound(q)
        return cls(
            q=q,
            c_q=cq,
            c_prime_q=c_prime(q),
            alpha=a,
            delta=None if delta is None else Fraction(delta),
            cst=None if cst is None else Fraction(cst),
            n0=q * cq / (a * a),
        )

    def to_json(self) -> dict:
        return _jsonable(
            {
                "q": self.q,
                "c_q": self.c_q,
                "c_prime_q": self.c_prime_q,
                "alpha": self.alpha,
                "delta": self.delta,
                "hq_size": self.hq_size,
                "hq_is_bound": self.hq_is_bound,
                "cst": self.cst,
                "s_min": self.s_min,
                "n0": self.n0,
                "warnings": self.warnings,
            }
        )


def theoretical_params(q: int, hq_size: int | None = None, palette: int | None = None, cst=None) -> Params:
    """Exact constants of the streaming tester for a given ``q``.

    ``|H_q|`` is taken from ``hq_size``; without it the crude bound
    ``2**(c_q**2) * (palette + 1)**c_q`` is used (``palette`` defaults to
    ``c_q``) and flagged.  ``cst`` defaults to 1, also flagged.
    """
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    cq = c_bound(q)
    if q >= 2:
        assert cq == (q ** (q + 1) - 1) // (q - 1)
    cp = c_prime(q)
    warnings = []
    hq_is_bound = hq_size is None
    if hq_is_bound:
        pal = cq if palette is None else palette
        hq_size = 2 ** (cq * cq) * (pal + 1) ** cq
        warnings.append(f"|H_q| replaced by the crude upper bound 2^(c_q^2)*(palette+1)^c_q with palette={pal}")
    if cst is None:
        cst = Fraction(1)
        warnings.append("cst(q) has no closed form; 1 is used as a placeholder")
    cst = Fraction(cst)
    delta = Fraction(1, 200 * hq_size)
    alpha = delta**6 / (6400 * hq_size**2 * q ** (2 * q) * cp)
    root = _exact_sqrt(alpha * q ** (2 * q) * cp)
    first = 1 / (20 * root) if root is not None else 1 / (20 * math.sqrt(alpha * q ** (2 * q) * cp))
    second = 5000 * hq_size / (cst * delta**3)
    n0 = q * cq / (alpha * alpha)
    warnings.append("theoretical constants are astronomically large; use practical overrides for experiments")
    return Params(
        q=q,
        c_q=cq,
        c_prime_q=cp,
        alpha=alpha,
        delta=delta,
        hq_size=hq_size,
        hq_is_bound=hq_is_bound,
        cst=cst,
        s_min=max(first, second),
        n0=n0,
        warnings=warnings,
    )


# -- exact oracles --------------------------------------------------------------


def exact_rbfs_oracle(g: Graph, v: int, q: int, max_branches: int = MAX_BRANCHES) -> dict[RootedDisc, Fraction]:
    """Exact output distribution of one q-RBFS from ``v``.

    Every popped vertex's ``q`` draws are enumerated as ordered tuples over
    its neighbours; identical outcomes are merged before recursing.  Raises
    ``StateSpaceTooLarge`` once more than ``max_branches`` tuples were needed.
    """
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    g._check(v)
    dist: dict[RootedDisc, Fraction] = {}
    budget = [max_branches]

    def rec(queue: tuple, label: dict, order: tuple, depth: dict, edges: frozenset, p: Fraction) -> None:
        if not queue:
            disc = RootedDisc(v, order, edges, tuple(depth[x] for x in order))
            dist[disc] = dist.get(disc, 0) + p
            return
        u, rest = queue[0], queue[1:]
        nbrs = g.adjacency[u]
        if not nbrs:
            rec(rest, label, order, depth, edges, p)
            return
        total = len(nbrs) ** q
        budget[0] -= total
        if budget[0] < 0:
            raise StateSpaceTooLarge(f"more than {max_branches} draw tuples")
        lu = label[u]
        outcomes: Counter = Counter()
        for draws in itertools.product(nbrs, repeat=q):
            new_edges = set(edges)
            new_order = list(order)
            new_depth = dict(depth)
            new_label = dict(label)
            new_queue = list(rest)
            for s in draws:
                new_edges.add(norm_edge(u, s))
                if s not in new_depth:
                    new_depth[s] = lu + 1
                    new_order.append(s)
                if lu < q - 1 and s not in new_label:
                    new_label[s] = lu + 1
                    new_queue.append(s)
            key = (
                tuple(new_queue),
                tuple(sorted(new_label.items())),
                tuple(new_order),
                frozenset(new_edges),
            )
            outcomes[key] += 1
        for (nq, nl, no, ne), cnt in outcomes.items():
            nd = dict(depth)
            for x in no[len(order):]:
                nd[x] = lu + 1
            rec(nq, dict(nl), no, nd, ne, p * Fraction(cnt, total))

    rec((v,), {v: 0}, (v,), {v: 0}, frozenset(), Fraction(1))
    return dist


def exact_stream_oracle(g: Graph, v: int, q: int, max_edges: int = MAX_STREAM_EDGES) -> dict[RootedDisc, Fraction]:
    """Exact output distribution of StreamCollect from ``v`` over all ``m!`` edge orders."""
    if g.m > max_edges:
        raise TooManyEdges(f"{g.m} edges; exact enumeration supports at most {max_edges}")
    g._check(v)
    counts: Counter = Counter()
    total = 0
    for perm in itertools.permutations(g.edges):
        c = CollectorState(v, q)
        for u, w in perm:
            c.offer(u, w)
        counts[c.disc()] += 1
        total += 1
    return {d: Fraction(k, total) for d, k in counts.items()}


def containment_probability(dist: Mapping[RootedDisc, Fraction], d: RootedDisc) -> Fraction:
    """Probability that an output drawn from ``dist`` contains ``d`` as a labelled subgraph."""
    return sum(
        (p for out, p in dist.items() if d.edges <= out.edges and d.vertex_set <= out.vertex_set),
        Fraction(0),
    )


def group_by_type(dist: Mapping[RootedDisc, Fraction], coloring: Mapping[int, int] | None = None) -> dict[bytes, Fraction]:
    """Aggregate a disc distribution by (coloured) disc type."""
    out: dict[bytes, Fraction] = {}
    for d, p in dist.items():
        if coloring:
            d = d.with_colors(coloring)
        k = canonical_code(d)
        out[k] = out.get(k, 0) + p
    return out


def exact_reach_vertex(g: Graph, q: int) -> dict[int, Fraction]:
    """Exact ``r(v)``: probability that a q-RBFS from a uniform start visits ``v``."""
    r = {v: Fraction(0) for v in range(g.n)}
    for start in range(g.n):
        for d, p in exact_rbfs_oracle(g, start, q).items():
            for x in d.vertices:
                r[x] += p
    return {v: x / g.n for v, x in r.items()}


def exact_mean_explored(g: Graph, q: int) -> Fraction:
    """Exact expected number of vertices explored by a q-RBFS from a uniform start."""
    total = Fraction(0)
    for start in range(g.n):
        for d, p in exact_rbfs_oracle(g, start, q).items():
            total += p * len(d.vertices)
    return total / g.n


# -- Monte Carlo ------------------------------------------------------------------


@dataclass
class ReachEstimate:
    target: object
    value: Fraction | float
    trials: int
    stderr: float
    method: str  # "monte_carlo" | "exact"

    def to_json(self) -> dict:
        return _jsonable(
            {"target": self.target, "value": self.value, "trials": self.trials, "stderr": self.stderr, "method": self.method}
        )


def _stderr(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


def _batches(trials: int, size: int = 20_000):
    done = 0
    while done < trials:
        k = min(size, trials - done)
        yield k
        done += k


def estimate_reach_vertex(g: Graph, q: int, trials: int, seed: int) -> dict[int, ReachEstimate]:
    """Monte Carlo ``r(v)`` from ``trials`` q-RBFS runs with uniform starts."""
    if trials < 1:
        raise InsufficientTrials("trials must be >= 1")
    rng = np.random.default_rng(seed)
    hits = np.zeros(g.n, dtype=np.int64)
    for k in _batches(trials):
        starts = rng.integers(0, g.n, size=k)
        b = random_bfs_batch(g, starts, q, rng)
        vs = b.verts[b.verts >= 0]
        hits += np.bincount(vs, minlength=g.n)
    out = {}
    for v in range(g.n):
        p = hits[v] / trials
        out[v] = ReachEstimate(v, float(p), trials, _stderr(float(p), trials), "monte_carlo")
    return out


@dataclass
class VAlpha:
    alpha: Fraction | float
    method: str
    entries: dict[int, ReachEstimate]

    @property
    def members(self) -> set[int]:
        return {v for v, e in self.entries.items() if e.value >= self.alpha}

    def margins(self) -> dict[int, float]:
        return {v: self.entries[v].value - self.alpha for v in sorted(self.members)}

    def to_json(self) -> dict:
        return _jsonable(
            {
                "alpha": self.alpha,
                "method": self.method,
                "members": sorted(self.members),
                "margins": self.margins(),
                "stderr": {v: self.entries[v].stderr for v in sorted(self.members)},
            }
        )


def extract_v_alpha(g: Graph, q: int, alpha, trials: int = 100_000, seed: int = 0, method: str = "auto") -> VAlpha:
    """Vertices with reach probability at least ``alpha`` (exact when feasible)."""
    if method not in ("auto", "exact", "monte_carlo"):
        raise InvalidParameter(f"unknown method {method!r}")
    if method in ("auto", "exact"):
        try:
            if method == "auto" and g.n > 64:
                raise StateSpaceTooLarge("auto mode only enumerates small graphs")
            r = exact_reach_vertex(g, q)
            a = Fraction(alpha) if not isinstance(alpha, float) else Fraction(alpha).limit_denominator(10**12)
            return VAlpha(a, "exact", {v: ReachEstimate(v, x, 0, 0.0, "exact") for v, x in r.items()})
        except StateSpaceTooLarge:
            if method == "exact":
                raise
    return VAlpha(alpha, "monte_carlo", estimate_reach_vertex(g, q, trials, seed))


def rbfs_type_frequencies(g: Graph, v: int, q: int, trials: int, seed: int) -> dict[RootedDisc, int]:
    """Counts of each disc over ``trials`` q-RBFS runs from ``v``."""
    rng = np.random.default_rng(seed)
    counts: Counter = Counter()
    for k in _batches(trials):
        b = random_bfs_batch(g, np.full(k, v), q, rng)
        if g.m <= 63:
            masks, freq = np.unique(b.edge_masks(g), return_counts=True)
            for mask, f in zip(masks.tolist(), freq.tolist()):
                es = frozenset(e for i, e in enumerate(g.edges) if mask >> i & 1)
                verts = {v} | {x for e in es for x in e}
                counts[(es, frozenset(verts))] += f
        else:
            for t in range(k):
                d = b.disc(t)
                counts[(d.edges, d.vertex_set)] += 1
    out = {}
    for (es, vs), f in counts.items():
        out[RootedDisc(v, (v, *sorted(vs - {v})), es, (0,) * len(vs))] = f
    return out


# -- lemma checks -----------------------------------------------------------------


@dataclass
class LemmaCheck:
    name: str
    lhs: object
    rhs: object
    holds: bool
    margin: object
    applicable: bool = True
    detail: str = ""

    def to_json(self) -> dict:
        return _jsonable(
            {
                "name": self.name,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "holds": self.holds,
                "margin": self.margin,
                "applicable": self.applicable,
                "detail": self.detail,
            }
        )


@dataclass
class LemmaReport:
    n: int
    m: int
    params: Params
    trials: int
    v_alpha: VAlpha
    checks: list[LemmaCheck]

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[LemmaCheck]:
        return [c for c in self.checks if not c.holds]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "params": self.params.to_json(),
            "trials": self.trials,
            "v_alpha": self.v_alpha.to_json(),
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }


def collision_checks(g: Graph, q: int, v_alpha: VAlpha, alpha, require_large_n: bool) -> list[LemmaCheck]:
    """Size of ``V_alpha`` and the degree of its members.

    Exact rationals are compared exactly.  The degree bound is only claimed
    for non-isolated vertices.
    """
    cq = c_bound(q)
    exact = v_alpha.method == "exact"
    a = Fraction(alpha) if exact else float(alpha)
    members = sorted(v_alpha.members)
    size_rhs = cq / a
    checks = [
        LemmaCheck(
            "number_collisions",
            len(members),
            size_rhs,
            len(members) <= size_rhs,
            size_rhs - len(members),
            detail="|V_alpha| <= c_q / alpha",
        )
    ]
    deg_rhs = g.n * a / cq
    applicable = (not require_large_n) or g.n >= q * cq / (a * a)
    nonisolated = [v for v in members if g.degree(v) > 0]
    margins = {v: g.degree(v) - deg_rhs for v in nonisolated}
    worst = min(margins.values()) if margins else None
    holds = (not applicable) or all(m >= 0 for m in margins.values())
    checks.append(
        LemmaCheck(
            "collision_high_degree",
            {v: g.degree(v) for v in nonisolated},
            deg_rhs,
            holds,
            worst,
            applicable,
            "deg(v) >= n*alpha/c_q for every non-isolated v in V_alpha",
        )
    )
    return checks


def verify_collision_lemmas_exact(g: Graph, q: int, alpha) -> list[LemmaCheck]:
    """Both collision lemmas with exact reach values and exact arithmetic."""
    va = extract_v_alpha(g, q, Fraction(alpha), method="exact")
    return collision_checks(g, q, va, Fraction(alpha), require_large_n=False)


def _share_edge(a: RootedDisc, b: RootedDisc) -> bool:
    return bool(a.edges & b.edges)


def verify_lemmas(
    g: Graph,
    p: Params,
    trials: int,
    seed: int,
    stream_trials: int | None = None,
) -> LemmaReport:
    """Empirical check of the RBFS collision lemmas and their streaming analogue.

    (a) ``|V_alpha| <= c_q/alpha``; (b) members of ``V_alpha`` have degree
    at least ``n*alpha/c_q`` (when ``n >= q*c_q/alpha**2``); (c) two RBFS
    from random starts share an edge with frequency at most
    ``2*q*c_q*alpha`` (+3 s.e.); (d) mean explored vertices at most ``c_q``
    (+3 s.e.); (e) two stream collectors share an edge with frequency at
    most ``3*sqrt(alpha_0)`` (+3 s.e.), ``alpha_0 = alpha*q**(2q)*c'_q``.
    """
    q, cq = p.q, p.c_q
    alpha = float(p.alpha)
    if 0.5 / math.sqrt(trials) >= alpha / 10:
        raise InsufficientTrials(f"{trials} trials cannot resolve alpha={alpha} (need stderr < alpha/10)")
    stream_trials = min(trials, 10_000) if stream_trials is None else stream_trials
    rng = np.random.default_rng(derive_seed(seed, 0))

    va = VAlpha(alpha, "monte_carlo", estimate_reach_vertex(g, q, trials, derive_seed(seed, 1)))
    large_n = g.n >= q * cq / alpha**2
    checks = collision_checks(g, q, va, alpha, require_large_n=True)

    shared = 0
    explored_sum = 0.0
    explored_sq = 0.0
    for k in _batches(trials):
        a = random_bfs_batch(g, rng.integers(0, g.n, size=k), q, rng)
        b = random_bfs_batch(g, rng.integers(0, g.n, size=k), q, rng)
        explored_sum += float(a.nverts.sum())
        explored_sq += float((a.nverts.astype(float) ** 2).sum())
        ea = np.sort(np.where(a.edges[..., 0] >= 0, a.edges.min(axis=2) * g.n + a.edges.max(axis=2), -1), axis=1)
        eb = np.where(b.edges[..., 0] >= 0, b.edges.min(axis=2) * g.n + b.edges.max(axis=2), -2)
        hit = np.zeros(k, dtype=bool)
        for j in range(eb.shape[1]):
            col = eb[:, j][:, None]
            hit |= (ea == col).any(axis=1)
        shared += int(hit.sum())
    f_share = shared / trials
    se_share = _stderr(f_share, trials)
    bound_c = 2 * q * cq * alpha
    checks.append(
        LemmaCheck(
            "random_bfs_visit_edges",
            f_share,
            bound_c,
            (not large_n) or f_share <= bound_c + 3 * se_share,
            bound_c + 3 * se_share - f_share,
            large_n,
            "Pr[two RBFS share an edge] <= 2*q*c_q*alpha (+3 s.e.)",
        )
    )
    mean_x = explored_sum / trials
    var_x = max(explored_sq / trials - mean_x**2, 0.0)
    se_x = math.sqrt(var_x / trials)
    checks.append(
        LemmaCheck(
            "explored_vertices",
            mean_x,
            cq,
            mean_x <= cq + 3 * se_x,
            cq + 3 * se_x - mean_x,
            detail="E[X] <= c_q (+3 s.e.)",
        )
    )

    alpha0 = alpha * q ** (2 * q) * p.c_prime_q
    bound_e = 3 * math.sqrt(alpha0)
    srng = random.Random(derive_seed(seed, 2))
    s_shared = 0
    for t in range(stream_trials):
        order = random_order(g, derive_seed(seed, 1000 + t))
        u, v = srng.randrange(g.n), srng.randrange(g.n)
        du, dv = multi_collect(order, [u, v], q)
        s_shared += _share_edge(du, dv)
    f_s = s_shared / stream_trials if stream_trials else 0.0
    se_s = _stderr(f_s, stream_trials) if stream_trials else 0.0
    stream_applicable = g.n >= q ** (2 * q) * p.c_prime_q / alpha**2
    checks.append(
        LemmaCheck(
            "stream_collect_visit_edges",
            f_s,
            bound_e,
            (not stream_applicable) or f_s <= bound_e + 3 * se_s,
            bound_e + 3 * se_s - f_s,
            stream_applicable,
            "Pr[two collectors share an edge] <= 3*sqrt(alpha_0) (+3 s.e.)",
        )
    )
    return LemmaReport(g.n, g.m, p, trials, va, checks)


# -- stream versus RBFS -----------------------------------------------------------


@dataclass
class CstEntry:
    root: int
    disc: RootedDisc
    rbfs_probability: Fraction
    stream_probability: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.stream_probability / self.rbfs_probability

    def to_json(self) -> dict:
        return _jsonable(
            {
                "root": self.root,
                "edges": [list(e) for e in sorted(self.disc.edges)],
                "rbfs_probability": self.rbfs_probability,
                "stream_probability": self.stream_probability,
                "ratio": self.ratio,
            }
        )


@dataclass
class CstReport:
    q: int
    mode: str
    entries: list[CstEntry] = field(default_factory=list)
    per_type: list[dict] = field(default_factory=list)

    @property
    def min_ratio(self) -> Fraction | None:
        return min((e.ratio for e in self.entries), default=None)

    @property
    def support_ok(self) -> bool:
        return all(e.stream_probability > 0 for e in self.entries)

    @property
    def passed(self) -> bool:
        if self.mode == "exact":
            return self.support_ok and (self.min_ratio is None or self.min_ratio > 0)
        return all(t["holds"] for t in self.per_type)

    def to_json(self) -> dict:
        out = {"q": self.q, "mode": self.mode, "passed": self.passed}
        if self.mode == "exact":
            out["min_ratio"] = _jsonable(self.min_ratio)
            out["support_ok"] = self.support_ok
            out["entries"] = [e.to_json() for e in self.entries]
        else:
            out["per_type"] = _jsonable(self.per_type)
        return out


def verify_stream_lower_bound_exact(g: Graph, q: int, roots=None) -> CstReport:
    """For every root and every disc the RBFS can return, compare the exact
    probability that StreamCollect's output contains it with the RBFS probability.
    """
    if g.m > MAX_STREAM_EDGES:
        raise TooManyEdges(f"{g.m} edges; exact mode supports at most {MAX_STREAM_EDGES}")
    report = CstReport(q, "exact")
    for v in range(g.n) if roots is None else roots:
        rb = exact_rbfs_oracle(g, v, q)
        st = exact_stream_oracle(g, v, q)
        for d, p in sorted(rb.items(), key=lambda kv: sorted(kv[0].edges)):
            report.entries.append(CstEntry(v, d, p, containment_probability(st, d)))
    return report


def verify_stream_lower_bound_mc(
    g: Graph,
    q: int,
    s: int,
    delta: float,
    trials: int,
    seed: int,
    cst: float = 1.0,
    alpha: float | None = None,
) -> CstReport:
    """Compare ``X_Delta / (cst * s)`` with ``reach_G(Delta) - delta`` per coloured type.

    ``reach_G(Delta)`` is estimated from ``trials`` RBFS runs from uniform
    starts; ``V_alpha`` (coloured) comes from the same kind of estimate when
    ``alpha`` is given.  ``X_Delta`` counts the collectors (one random order,
    ``s`` uniform roots) whose output contains a copy of ``Delta`` at its root.
    """
    coloring: dict[int, int] = {}
    if alpha is not None:
        va = extract_v_alpha(g, q, alpha, trials=trials, seed=derive_seed(seed, 3), method="monte_carlo")
        coloring = {v: i for i, v in enumerate(sorted(va.members))}
    rng = np.random.default_rng(derive_seed(seed, 4))
    types: dict[bytes, list] = {}
    for k in _batches(trials):
        b = random_bfs_batch(g, rng.integers(0, g.n, size=k), q, rng)
        for t in range(k):
            d = b.disc(t).with_colors(coloring)
            code = canonical_code(d)
            if code in types:
                types[code][1] += 1
            else:
                types[code] = [d, 1]
    order = random_order(g, derive_seed(seed, 5))
    srng = random.Random(derive_seed(seed, 6))
    roots = [srng.randrange(g.n) for _ in range(s)]
    collected = [d.with_colors(coloring) for d in multi_collect(order, roots, q)]
    report = CstReport(q, "monte_carlo")
    for code, (rep, cnt) in sorted(types.items(), key=lambda kv: -kv[1][1]):
        reach = cnt / trials
        x = sum(1 for h in collected if find_embedding(rep, h) is not None)
        qd = x / (cst * s)
        report.per_type.append(
            {
                "type": code.hex(),
                "reach": reach,
                "X": x,
                "s": s,
                "q_delta": qd,
                "threshold": reach - delta,
                "holds": qd >= reach - delta,
            }
        )
    return report
