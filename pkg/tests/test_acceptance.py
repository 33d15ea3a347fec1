"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its runtime."""

from __future__ import annotations

import contextlib
import itertools
import random
import time
from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from conftest import brute_canonical_form, nx_isomorphic, small_connected_graphs, small_graphs
from streamprop import (
    ColoredDiscMultiset,
    QueryOracle,
    RootedDisc,
    builtin_family,
    c_bound,
    canonical_code,
    canonical_test,
    decompose,
    random_bfs,
    random_bfs_batch,
    random_order,
    stitch,
    stream_test,
)
from streamprop import TesterParams as Settings
from streamprop.analysis import (
    exact_mean_explored,
    exact_rbfs_oracle,
    exact_stream_oracle,
    group_by_type,
    rbfs_type_frequencies,
    verify_collision_lemmas_exact,
    verify_stream_lower_bound_exact,
)
from streamprop.generators import er, path, star
from streamprop.graph import Graph, Subgraph, build_graph
from streamprop.oracle import derive_seed
from streamprop.stream import CollectorState

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def criterion(k: int, limit_s: float, capsys, title: str):
    """Time the block, print one PASS/FAIL line, then enforce the time limit."""
    info: dict = {}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit_s
        detail = info.get("detail", "")
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s / {limit_s:.0f}s) {title}. {detail}")
    assert elapsed < limit_s, f"criterion {k} took {elapsed:.1f}s, limit {limit_s}s"


# -- satisfying corpora -------------------------------------------------------


def _two_paths(k: int) -> Graph:
    edges = [(i, i + 1) for i in range(k - 1)] + [(k + i, k + i + 1) for i in range(k - 1)]
    return build_graph(2 * k, edges)


def satisfying_corpus():
    """(family, mode, graph) triples on which the property holds."""
    pk = builtin_family("pk_free", 3)
    db = builtin_family("d_bounded", 2)
    st = builtin_family("st_disc", 0, 7, 3)
    return [
        (pk, "neighbor", build_graph(6, [])),
        (pk, "neighbor", star(4)),
        (pk, "neighbor", star(8)),
        (db, "neighbor/edge", build_graph(6, [])),
        (db, "neighbor/edge", path(5)),
        (db, "neighbor/edge", path(10)),
        (st, "neighbor", build_graph(8, [])),
        (st, "neighbor", _two_paths(4)),
        (st, "neighbor", build_graph(8, [(0, 1), (1, 2), (0, 2), (5, 7), (6, 7)])),
    ]


def test_criterion_1_one_sided_query(capsys):
    runs = 10_000
    with criterion(1, 60, capsys, "one-sided error, query model") as info:
        rejections = 0
        for fam, mode, g in satisfying_corpus():
            p = Settings(q=3, s=16, mode=mode)
            for seed in range(runs):
                if canonical_test(QueryOracle(g, seed), p, fam).rejected:
                    rejections += 1
        total = runs * len(satisfying_corpus())
        info["detail"] = f"accepted {total - rejections}/{total}"
        assert rejections == 0


def test_criterion_2_one_sided_stream(capsys):
    runs = 10_000
    with criterion(2, 120, capsys, "one-sided error, streaming") as info:
        rejections = 0
        for j, (fam, _, g) in enumerate(satisfying_corpus()):
            p = Settings(q=3, s=16)
            for seed in range(runs):
                order = random_order(g, derive_seed(seed, j))
                if stream_test(order, p, fam, seed=seed).rejected:
                    rejections += 1
        total = runs * len(satisfying_corpus())
        info["detail"] = f"accepted {total - rejections}/{total}"
        assert rejections == 0


def test_criterion_3_soundness(capsys):
    runs = 1000
    cases = [
        ("path(6) vs pk_free(3)", path(6), builtin_family("pk_free", 3), "neighbor"),
        ("K_1,3 vs d_bounded(2)", star(4), builtin_family("d_bounded", 2), "neighbor/edge"),
        ("edge{s,t} vs st_disc", build_graph(2, [(0, 1)]), builtin_family("st_disc", 0, 1, 3), "neighbor"),
    ]
    with criterion(3, 120, capsys, "soundness on planted violations") as info:
        rates = []
        bad_witnesses = 0
        for name, g, fam, mode in cases:
            p = Settings(q=3, s=16, mode=mode)
            stream_rej = query_rej = 0
            for seed in range(runs):
                v = stream_test(random_order(g, seed), p, fam, seed=seed)
                if v.rejected:
                    stream_rej += 1
                    bad_witnesses += not fam.validate(g, v.witness)
                v = canonical_test(QueryOracle(g, seed), p, fam)
                if v.rejected:
                    query_rej += 1
                    bad_witnesses += not fam.validate(g, v.witness)
            rates.append((name, stream_rej / runs, query_rej / runs))
        info["detail"] = "; ".join(f"{n}: stream {a:.3f}, query {b:.3f}" for n, a, b in rates)
        info["detail"] += f"; invalid witnesses {bad_witnesses}"
        assert bad_witnesses == 0
        assert all(a > 0.5 and b > 0.5 for _, a, b in rates)


# -- exact oracles vs Monte Carlo ----------------------------------------------


def _stream_type_counts(g: Graph, roots: range, q: int, trials: int, rng: np.random.Generator) -> list[Counter]:
    """Disc-type counts of StreamCollect over ``trials`` uniformly random edge orders.

    Orders are sampled as whole permutations; the collector output of each
    distinct order is computed once and reused for repeated draws.
    """
    m = g.m
    if m == 0:
        return [Counter({canonical_code(RootedDisc.singleton(v)): trials}) for v in roots]
    perms = rng.permuted(np.tile(np.arange(m), (trials, 1)), axis=1)
    keys = perms @ (m ** np.arange(m))
    uniq, first, freq = np.unique(keys, return_index=True, return_counts=True)
    out = [Counter() for _ in roots]
    for i, f in zip(first.tolist(), freq.tolist()):
        edges = [g.edges[j] for j in perms[i].tolist()]
        for k, v in enumerate(roots):
            c = CollectorState(v, q)
            for a, b in edges:
                c.offer(a, b)
            out[k][canonical_code(c.disc())] += f
    return out


def _within(exact: dict, counts: Counter, trials: int, z: float = 4.0) -> tuple[int, int]:
    ok = total = 0
    for t in set(exact) | set(counts):
        p = float(exact.get(t, 0))
        se = (p * (1 - p) / trials) ** 0.5
        total += 1
        ok += abs(counts.get(t, 0) / trials - p) <= z * se
    return ok, total


def test_criterion_4_exact_oracle_agreement(capsys):
    trials = 100_000
    with criterion(4, 600, capsys, "exact oracles vs Monte Carlo") as info:
        corpus = small_connected_graphs(6, 6)
        rng = np.random.default_rng(2024)
        sums_ok = True
        ok = total = 0
        for q in (1, 2):
            for g in corpus:
                stream_counts = _stream_type_counts(g, range(g.n), q, trials, rng)
                for v in range(g.n):
                    rb = exact_rbfs_oracle(g, v, q)
                    st = exact_stream_oracle(g, v, q)
                    sums_ok &= sum(rb.values()) == 1 and sum(st.values()) == 1
                    sums_ok &= all(isinstance(p, Fraction) for p in (*rb.values(), *st.values()))
                    freq = rbfs_type_frequencies(g, v, q, trials, seed=int(rng.integers(2**31)))
                    rb_counts: Counter = Counter()
                    for d, f in freq.items():
                        rb_counts[canonical_code(d)] += f
                    for exact, counts in ((group_by_type(rb), rb_counts), (group_by_type(st), stream_counts[v])):
                        a, b = _within(exact, counts, trials)
                        ok += a
                        total += b
        info["detail"] = f"{len(corpus)} graphs, sums exact: {sums_ok}, within 4 se: {ok}/{total} ({ok / total:.4f})"
        assert sums_ok
        assert ok >= 0.99 * total


def test_criterion_5_collision_lemmas(capsys):
    with criterion(5, 300, capsys, "collision lemmas with exact reach probabilities") as info:
        corpus = small_graphs(7, 6)
        checks = failures = 0
        for q in (1, 2):
            for g in corpus:
                for alpha in (Fraction(1, 10), Fraction(3, 10), Fraction(1, 2)):
                    for c in verify_collision_lemmas_exact(g, q, alpha):
                        checks += 1
                        failures += not c.holds
        info["detail"] = f"{len(corpus)} graphs, {checks} checks, {failures} violations"
        assert failures == 0


def test_criterion_6_stream_support(capsys):
    with criterion(6, 600, capsys, "stream collect covers the RBFS support") as info:
        corpus = small_graphs(7, 6)
        worst = None
        entries = 0
        all_ok = True
        for q in (1, 2):
            for g in corpus:
                rep = verify_stream_lower_bound_exact(g, q)
                entries += len(rep.entries)
                all_ok &= rep.support_ok and rep.min_ratio is not None and rep.min_ratio > 0
                if worst is None or rep.min_ratio < worst:
                    worst = rep.min_ratio
        info["detail"] = f"{len(corpus)} graphs, {entries} (root, disc) entries, min ratio {worst}"
        assert all_ok


def test_criterion_7_mean_explored(capsys):
    trials = 100_000
    with criterion(7, 120, capsys, "mean explored vertices at most c_q") as info:
        rng = np.random.default_rng(7)
        worst = -np.inf
        for q in (1, 2):
            for g in small_connected_graphs(6, 6):
                b = random_bfs_batch(g, rng.integers(0, g.n, size=trials), q, rng)
                x = b.nverts.astype(float)
                se = x.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
                worst = max(worst, x.mean() - c_bound(q) - 3 * se)
        p3 = exact_mean_explored(path(3), 1)
        info["detail"] = f"max(mean - c_q - 3 se) = {worst:.4f}, exact E[X] on P3 with q=1 = {p3}"
        assert worst <= 0
        assert p3 == 2 == c_bound(1)


def test_criterion_8_constant_space(capsys):
    with criterion(8, 300, capsys, "constant space across n") as info:
        fam = builtin_family("pk_free", 3)
        p = Settings(q0=1, q=2, s=16)
        peaks, live = [], []
        for n in (10**2, 10**3, 10**4, 10**5):
            g = er(n, 6 / (n - 1), seed=n)
            v = stream_test(random_order(g, n), p, fam, seed=n)
            peaks.append(v.transcript["words"])
            live.append(v.transcript["live_words"])
        spread = (max(peaks) - min(peaks)) / max(peaks)
        live_spread = (max(live) - min(live)) / max(live)
        info["detail"] = f"peak words {peaks} (spread {spread:.2%}); live words {live} (spread {live_spread:.2%})"
        assert spread < 0.01


# -- stitching and canonical codes -------------------------------------------


def _two_roots_sharing_a_coloured_edge():
    u, v, w, x, y = range(5)
    f = Subgraph.make(range(5), [(u, w), (u, x), (u, y), (v, x), (v, y), (x, y)], [u, v], {x: 1, y: 2})
    return f, {x: 1, y: 2}


def _random_stitched_instance(rng: random.Random):
    """Union of edge-disjoint RBFS discs on a random graph; shared vertices get unique colours."""
    while True:
        n = rng.randint(2, 10)
        g = er(n, rng.uniform(0.2, 0.7), seed=rng.randrange(2**31))
        if g.m == 0:
            continue
        q = rng.choice((1, 2))
        k = rng.randint(1, 3)
        roots = rng.sample(range(n), min(k, n))
        o = QueryOracle(g, rng.randrange(2**31))
        discs = [random_bfs(o, r, q) for r in roots]
        if any(a.edges & b.edges for a, b in itertools.combinations(discs, 2)):
            continue
        owners = Counter(x for d in discs for x in d.vertex_set)
        shared = sorted(x for x, c in owners.items() if c > 1)
        extra = [x for x in sorted(owners) if x not in shared and rng.random() < 0.2]
        colored = shared + extra
        palette = rng.sample(range(1, 50), len(colored))
        coloring = dict(zip(colored, palette))
        f = Subgraph.make(owners, (e for d in discs for e in d.edges), roots, coloring)
        return f, coloring, q


def test_criterion_9_stitch_round_trip(capsys):
    with criterion(9, 180, capsys, "decompose then stitch is the identity up to isomorphism") as info:
        rng = random.Random(9)
        instances = [_random_stitched_instance(rng) for _ in range(1000)]
        decompositions = failures = 0
        for f, coloring, q in instances:
            found = decompose(f, coloring, q)
            assert found
            for ms in found:
                decompositions += 1
                back = stitch(ms)
                failures += not (canonical_code(back) == canonical_code(f) and nx_isomorphic(back, f))
        shared, shared_colors = _two_roots_sharing_a_coloured_edge()
        shared_found = decompose(shared, shared_colors, 3)
        shared_ok = all(canonical_code(stitch(ms)) == canonical_code(shared) for ms in shared_found)
        info["detail"] = (
            f"{len(instances)} instances, {decompositions} decompositions, {failures} mismatches; "
            f"two roots sharing a coloured edge: {len(shared_found)} decompositions, all stitch back: {shared_ok}"
        )
        assert failures == 0
        assert len(shared_found) >= 2 and shared_ok
        assert all(isinstance(ms, ColoredDiscMultiset) for ms in shared_found)


def _root_sets(n: int):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def _partition_mismatches(objs) -> int:
    """Count objects whose canonical code and brute-force form disagree on class membership."""
    code_to_form: dict = {}
    form_to_code: dict = {}
    bad = 0
    for h in objs:
        c, b = canonical_code(h), brute_canonical_form(h)
        if code_to_form.setdefault(c, b) != b or form_to_code.setdefault(b, c) != c:
            bad += 1
    return bad


def _exhaustive_small():
    # up to 4 vertices: every labelled graph, every root set, every colouring from {1, 2}
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
            for roots in _root_sets(n):
                for cols in itertools.product((None, 1, 2), repeat=n):
                    yield n, Subgraph.make(range(n), edges, roots, {v: c for v, c in enumerate(cols) if c})
    # 5 vertices: every isomorphism class, every root set, every colouring from {1, 2}
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != 5:
            continue
        for roots in _root_sets(5):
            for cols in itertools.product((None, 1, 2), repeat=5):
                yield 5, Subgraph.make(range(5), h.edges(), roots, {v: c for v, c in enumerate(cols) if c})
    # 6 vertices: every isomorphism class, every root set, at most one coloured vertex
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != 6:
            continue
        for roots in _root_sets(6):
            for cv in (None, *range(6)):
                yield 6, Subgraph.make(range(6), h.edges(), roots, {} if cv is None else {cv: 1})


def _random_pair(rng: random.Random) -> tuple[Subgraph, Subgraph]:
    n = 8
    pairs = list(itertools.combinations(range(n), 2))
    edges = [e for e in pairs if rng.random() < 0.4]
    roots = [v for v in range(n) if rng.random() < 0.3]
    colors = {v: rng.choice((1, 2, 3)) for v in range(n) if rng.random() < 0.3}
    a = Subgraph.make(range(n), edges, roots, colors)
    perm = list(range(n))
    rng.shuffle(perm)
    b_edges = [(perm[x], perm[y]) for x, y in edges]
    b_roots = [perm[x] for x in roots]
    b_colors = {perm[x]: c for x, c in colors.items()}
    if rng.random() < 0.5:
        # perturb: toggle one edge, which may or may not change the class
        x, y = rng.choice(pairs)
        e = (perm[x], perm[y])
        b_set = {tuple(sorted(t)) for t in b_edges}
        b_set ^= {tuple(sorted(e))}
        b_edges = list(b_set)
    return a, Subgraph.make(range(n), b_edges, b_roots, b_colors)


def test_criterion_10_canonicalization(capsys):
    with criterion(10, 300, capsys, "canonical codes match brute-force isomorphism") as info:
        by_n: dict[int, list] = {}
        for n, h in _exhaustive_small():
            by_n.setdefault(n, []).append(h)
        exhaustive_bad = sum(_partition_mismatches(hs) for hs in by_n.values())
        count = sum(len(hs) for hs in by_n.values())
        rng = random.Random(10)
        pair_bad = 0
        iso_pairs = 0
        for _ in range(1000):
            a, b = _random_pair(rng)
            truth = brute_canonical_form(a) == brute_canonical_form(b)
            iso_pairs += truth
            pair_bad += (canonical_code(a) == canonical_code(b)) != truth
        info["detail"] = (
            f"exhaustive: {count} rooted coloured graphs, {exhaustive_bad} mismatches; "
            f"random 8-vertex pairs: 1000 ({iso_pairs} isomorphic), {pair_bad} mismatches"
        )
        assert exhaustive_bad == 0
        assert pair_bad == 0
