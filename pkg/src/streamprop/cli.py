"""Command-line front end.

Every subcommand resolves its settings as flags > config file > defaults,
validates them before doing any work and writes a report that embeds the
resolved config.  Reports are byte-identical for identical configs; the
wall-clock timestamp goes to a ``.meta.json`` sidecar next to ``--out``.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .analysis import (
    MAX_STREAM_EDGES,
    Params,
    estimate_reach_vertex,
    exact_rbfs_oracle,
    exact_stream_oracle,
    extract_v_alpha,
    frac_str,
    theoretical_params,
    verify_lemmas,
    verify_stream_lower_bound_exact,
    verify_stream_lower_bound_mc,
)
from .errors import InvalidConfig, StreamPropError
from .generators import from_spec
from .graph import Graph, format_edge_list, read_graph
from .oracle import QueryOracle, derive_seed
from .rbfs import random_bfs
from .stream import SpaceMeter, multi_collect, random_order, read_stream
from .testers import TesterParams, canonical_test, parse_property, stream_test

GLOBAL_DEFAULTS = {"seed": 0, "threads": 1, "out": None, "format": "json"}

COMMAND_DEFAULTS: dict[str, dict] = {
    "generate": {"gen": None},
    "rbfs": {"graph": None, "gen": None, "root": 0, "q": 2, "trials": 1},
    "collect": {"graph": None, "gen": None, "stream": None, "order_seed": 0, "roots": "0", "q": 2},
    "test": {
        "graph": None,
        "gen": None,
        "property": None,
        "mode": "query",
        "model": "neighbor",
        "q": 3,
        "samples": 16,
        "trials": 100,
        "order_seed": None,
        "epsilon": 0.1,
        "repetitions": None,
    },
    "estimate": {"graph": None, "gen": None, "q": 2, "trials": 10_000, "alpha": None},
    "oracle": {"graph": None, "gen": None, "kind": "rbfs", "root": 0, "q": 1},
    "verify": {
        "graph": None,
        "gen": None,
        "check": "lemmas",
        "q": 1,
        "alpha": 0.5,
        "trials": 100_000,
        "stream_trials": None,
        "samples": 16,
        "delta": 0.1,
        "cst": 1.0,
    },
    "params": {"q": 2, "hq_size": None, "palette": None, "cst": None},
}


# -- config resolution ----------------------------------------------------------


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidConfig("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def resolve(command: str, flags: dict, file_cfg: dict) -> dict:
    """Merge defaults, config-file values and explicit flags, in rising priority."""
    allowed = {**GLOBAL_DEFAULTS, **COMMAND_DEFAULTS[command]}
    unknown = sorted(set(file_cfg) - set(allowed) - {"command"})
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(unknown)}")
    if file_cfg.get("command", command) != command:
        raise InvalidConfig(f"config is for {file_cfg['command']!r}, not {command!r}")
    cfg = dict(allowed)
    cfg.update({k: v for k, v in file_cfg.items() if k != "command"})
    cfg.update({k: v for k, v in flags.items() if v is not None})
    cfg["command"] = command
    if cfg["format"] not in ("json", "csv"):
        raise InvalidConfig(f"format must be json or csv, got {cfg['format']!r}")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise InvalidConfig("threads must be a positive integer")
    for key in ("q", "trials", "samples"):
        if key in cfg and cfg[key] is not None and (not isinstance(cfg[key], int) or cfg[key] < 1):
            raise InvalidConfig(f"{key} must be a positive integer")
    return cfg


def load_graph(cfg: dict) -> Graph:
    if cfg.get("graph") and cfg.get("gen"):
        raise InvalidConfig("give either graph or gen, not both")
    if cfg.get("graph"):
        return read_graph(cfg["graph"])
    if cfg.get("gen"):
        return from_spec(cfg["gen"], seed=cfg["seed"])
    raise InvalidConfig("a graph source is required (graph or gen)")


def _ordered_map(fn, items, threads: int) -> list:
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -- output ------------------------------------------------------------------------


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        fields = list(rows[0])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def emit(cfg: dict, result: dict, rows: list[dict]) -> None:
    report = {"command": cfg["command"], "version": __version__, "config": cfg, "result": result}
    if cfg["format"] == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = _csv_text(rows)
    out = cfg["out"]
    if out is None:
        click.echo(text, nl=False)
        return
    Path(out).write_text(text)
    meta = {"generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "report": str(out)}
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


# -- commands ----------------------------------------------------------------------


def cmd_generate(cfg: dict):
    if not cfg["gen"]:
        raise InvalidConfig("generate needs --gen")
    g = from_spec(cfg["gen"], seed=cfg["seed"])
    return g


def cmd_rbfs(cfg: dict):
    g = load_graph(cfg)
    q, root = cfg["q"], cfg["root"]

    def one(t: int) -> dict:
        o = QueryOracle(g, derive_seed(cfg["seed"], t))
        d = random_bfs(o, root, q)
        return {"trial": t, "queries": o.query_count, **d.to_json()}

    rec = _ordered_map(one, range(cfg["trials"]), cfg["threads"])
    rows = [{"trial": r["trial"], "vertices": r["vertices"], "edges": r["edges"], "queries": r["queries"]} for r in rec]
    return {"trials": rec}, rows, 0


def cmd_collect(cfg: dict):
    if cfg["stream"]:
        s = read_stream(cfg["stream"])
    else:
        s = random_order(load_graph(cfg), cfg["order_seed"])
    try:
        roots = [int(x) for x in str(cfg["roots"]).split(",")]
    except ValueError:
        raise InvalidConfig(f"roots must be comma-separated integers, got {cfg['roots']!r}") from None
    meter = SpaceMeter()
    discs = multi_collect(s, roots, cfg["q"], meter)
    out = [d.to_json() for d in discs]
    result = {
        "discs": out,
        "words": meter.peak_words,
        "live_words": meter.peak_live_words,
        "edges_seen": meter.edges_seen,
    }
    rows = [{"root": d["root"], "vertices": d["vertices"], "edges": d["edges"]} for d in out]
    return result, rows, 0


def cmd_test(cfg: dict):
    g = load_graph(cfg)
    if cfg["property"] is None:
        raise InvalidConfig("test needs --property")
    if cfg["mode"] not in ("query", "stream"):
        raise InvalidConfig(f"mode must be query or stream, got {cfg['mode']!r}")
    fam = parse_property(cfg["property"], cfg["q"])
    p = TesterParams(
        q0=1,
        q=cfg["q"],
        s=cfg["samples"],
        epsilon=cfg["epsilon"],
        mode=cfg["model"],
        anchor_repetitions=cfg["repetitions"],
    )

    def one(t: int) -> dict:
        seed = derive_seed(cfg["seed"], t)
        if cfg["mode"] == "query":
            v = canonical_test(QueryOracle(g, seed), p, fam)
        else:
            oseed = derive_seed(cfg["order_seed"], t) if cfg["order_seed"] is not None else derive_seed(seed, 1)
            v = stream_test(random_order(g, oseed), p, fam, seed=seed)
        rec = {"trial": t, **v.to_json()}
        if v.witness is not None:
            rec["witness_valid"] = fam.validate(g, v.witness)
        return rec

    rec = _ordered_map(one, range(cfg["trials"]), cfg["threads"])
    rejects = sum(r["decision"] == "reject" for r in rec)
    freq = Fraction(rejects, len(rec))
    majority = "reject" if 2 * rejects > len(rec) else "accept"
    result = {
        "property": fam.name,
        "n": g.n,
        "m": g.m,
        "rejections": rejects,
        "rejection_frequency": float(freq),
        "majority": majority,
        "trials": rec,
    }
    rows = [
        {
            "trial": r["trial"],
            "decision": r["decision"],
            "witness": r["witness"]["vertices"] if r["witness"] else "",
        }
        for r in rec
    ]
    return result, rows, 1 if majority == "reject" else 0


def cmd_estimate(cfg: dict):
    g = load_graph(cfg)
    est = estimate_reach_vertex(g, cfg["q"], cfg["trials"], cfg["seed"])
    result = {"reach": [est[v].to_json() for v in range(g.n)]}
    if cfg["alpha"] is not None:
        va = extract_v_alpha(g, cfg["q"], cfg["alpha"], trials=cfg["trials"], seed=cfg["seed"], method="monte_carlo")
        result["v_alpha"] = va.to_json()
    rows = [{"vertex": v, "value": est[v].value, "stderr": est[v].stderr, "trials": est[v].trials} for v in range(g.n)]
    return result, rows, 0


def cmd_oracle(cfg: dict):
    g = load_graph(cfg)
    if cfg["kind"] == "rbfs":
        dist = exact_rbfs_oracle(g, cfg["root"], cfg["q"])
    elif cfg["kind"] == "stream":
        dist = exact_stream_oracle(g, cfg["root"], cfg["q"])
    else:
        raise InvalidConfig(f"kind must be rbfs or stream, got {cfg['kind']!r}")
    items = sorted(dist.items(), key=lambda kv: (sorted(kv[0].edges), sorted(kv[0].vertex_set)))
    out = [{"edges": [list(e) for e in sorted(d.edges)], "vertices": sorted(d.vertex_set), "probability": frac_str(p)} for d, p in items]
    total = sum(dist.values(), Fraction(0))
    return {"root": cfg["root"], "distribution": out, "total": frac_str(total)}, out, 0


def cmd_verify(cfg: dict):
    g = load_graph(cfg)
    if cfg["check"] == "lemmas":
        rep = verify_lemmas(g, Params.practical(cfg["q"], cfg["alpha"]), cfg["trials"], cfg["seed"], cfg["stream_trials"])
        result = rep.to_json()
        rows = [{k: c[k] for k in ("name", "lhs", "rhs", "holds", "margin", "applicable")} for c in result["checks"]]
        return result, rows, 0 if rep.passed else 1
    if cfg["check"] == "stream-lower-bound":
        # exact over all edge orders when feasible, sampled otherwise
        if g.m <= MAX_STREAM_EDGES:
            rep = verify_stream_lower_bound_exact(g, cfg["q"])
        else:
            rep = verify_stream_lower_bound_mc(
                g, cfg["q"], cfg["samples"], cfg["delta"], cfg["trials"], cfg["seed"], cst=cfg["cst"], alpha=cfg["alpha"]
            )
        result = rep.to_json()
        rows = result["entries"] if rep.mode == "exact" else result["per_type"]
        return result, rows, 0 if rep.passed else 1
    raise InvalidConfig(f"check must be lemmas or stream-lower-bound, got {cfg['check']!r}")


def cmd_params(cfg: dict):
    p = theoretical_params(cfg["q"], cfg["hq_size"], cfg["palette"], cfg["cst"])
    result = p.to_json()
    rows = [{"name": k, "value": v} for k, v in result.items() if k != "warnings"]
    return result, rows, 0


# -- click wiring ------------------------------------------------------------------


def _run(ctx: click.Context, command: str, flags: dict) -> None:
    obj = ctx.obj
    try:
        file_cfg = load_config(obj["config"])
        merged_flags = {**obj["globals"], **flags}
        cfg = resolve(command, merged_flags, file_cfg)
        if command == "generate":
            g = cmd_generate(cfg)
            if cfg["format"] == "json":
                emit(cfg, {"n": g.n, "m": g.m, "edges": [list(e) for e in g.edges]}, [])
            else:
                text = format_edge_list(g)
                if cfg["out"]:
                    Path(cfg["out"]).write_text(text)
                else:
                    click.echo(text, nl=False)
            ctx.exit(0)
        handler = {
            "rbfs": cmd_rbfs,
            "collect": cmd_collect,
            "test": cmd_test,
            "estimate": cmd_estimate,
            "oracle": cmd_oracle,
            "verify": cmd_verify,
            "params": cmd_params,
        }[command]
        result, rows, code = handler(cfg)
        emit(cfg, result, rows)
    except (StreamPropError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(2)
    ctx.exit(code)


graph_options = [
    click.option("--graph", type=click.Path(dir_okay=False), default=None, help="Edge-list file."),
    click.option("--gen", default=None, help="Generator spec, e.g. path:6 or er:100,0.05."),
]


def with_graph(f):
    for opt in reversed(graph_options):
        f = opt(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--seed", type=int, default=None, help="Master seed (default 0).")
@click.option("--threads", type=int, default=None, help="Trial workers (default 1).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report path (default stdout).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None)
@click.option("--config", type=click.Path(dir_okay=False), default=None, help="JSON config document.")
@click.version_option(__version__)
@click.pass_context
def main(ctx: click.Context, seed, threads, out, fmt, config) -> None:
    """Constant-query graph property testers and their streaming emulation."""
    ctx.obj = {"globals": {"seed": seed, "threads": threads, "out": out, "format": fmt}, "config": config}


@main.command()
@click.option("--gen", default=None, help="Generator spec, e.g. path:6, er:100,0.05, planted:star:20+path:3.")
@click.pass_context
def generate(ctx, gen):
    """Generate a graph (edge list with --format csv, JSON otherwise)."""
    _run(ctx, "generate", {"gen": gen})


@main.command()
@with_graph
@click.option("--root", type=int, default=None)
@click.option("--q", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.pass_context
def rbfs(ctx, **kw):
    """Run q-RBFS from a root in the random neighbor model."""
    _run(ctx, "rbfs", kw)


@main.command()
@with_graph
@click.option("--stream", type=click.Path(dir_okay=False), default=None, help="Stream file (edges in arrival order).")
@click.option("--order-seed", type=int, default=None)
@click.option("--roots", default=None, help="Comma-separated root ids.")
@click.option("--q", type=int, default=None)
@click.pass_context
def collect(ctx, **kw):
    """Collect bounded discs around roots in one pass over a random-order stream."""
    _run(ctx, "collect", kw)


@main.command()
@with_graph
@click.option("--property", "property", default=None, help="pk_free:k, d_bounded:d or st_disc:s,t[,L].")
@click.option("--mode", type=click.Choice(["query", "stream"]), default=None)
@click.option("--model", type=click.Choice(["neighbor", "neighbor/edge"]), default=None, help="Query model.")
@click.option("--q", type=int, default=None)
@click.option("--samples", type=int, default=None, help="Roots per streaming run.")
@click.option("--trials", type=int, default=None)
@click.option("--order-seed", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--repetitions", type=int, default=None, help="Explorations per anchor vertex.")
@click.pass_context
def test(ctx, **kw):
    """Run a property tester; exit 1 when most trials reject."""
    _run(ctx, "test", kw)


@main.command()
@with_graph
@click.option("--q", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--alpha", type=float, default=None, help="Also report V_alpha.")
@click.pass_context
def estimate(ctx, **kw):
    """Monte Carlo reach probabilities."""
    _run(ctx, "estimate", kw)


@main.command()
@with_graph
@click.option("--kind", type=click.Choice(["rbfs", "stream"]), default=None)
@click.option("--root", type=int, default=None)
@click.option("--q", type=int, default=None)
@click.pass_context
def oracle(ctx, **kw):
    """Exact output distribution of q-RBFS or StreamCollect from a root."""
    _run(ctx, "oracle", kw)


@main.command()
@with_graph
@click.option("--check", type=click.Choice(["lemmas", "stream-lower-bound"]), default=None)
@click.option("--q", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--stream-trials", type=int, default=None)
@click.option("--samples", type=int, default=None, help="Collectors per pass (sampled stream-lower-bound).")
@click.option("--delta", type=float, default=None)
@click.option("--cst", type=float, default=None)
@click.pass_context
def verify(ctx, **kw):
    """Empirical lemma checks or the stream-versus-RBFS comparison.

    The comparison is exact over all edge orders for graphs with at most
    8 edges and sampled otherwise.
    """
    _run(ctx, "verify", kw)


@main.command()
@click.option("--q", type=int, default=None)
@click.option("--hq-size", type=int, default=None, help="Number of coloured disc types, if known.")
@click.option("--palette", type=int, default=None)
@click.option("--cst", type=float, default=None)
@click.pass_context
def params(ctx, **kw):
    """Exact theoretical constants for a given q."""
    _run(ctx, "params", kw)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
