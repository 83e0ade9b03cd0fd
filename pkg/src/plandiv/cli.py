"""Command-line interface.

Subcommands: gen, cut, divide, estimate, mpc, emst.  Every stats output is
JSON with the stable schema {command, config, seed, metrics{...},
timing_ms}; byte-identical for a fixed seed apart from timing_ms.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from .config import DEFAULT
from .cutting import sample_cutting, verify_cutting
from .division import build_division_oracle, verify_pseudodivision
from .estimator import builtin_specs, estimate_parameter, test_property_distance
from .graph import QueryHandle, load_graph, save_graph
from .harness import (
    GeneratorSpec,
    brute_force_emst,
    component_labels,
    dijkstra,
    emst,
    generate,
    graph_mst,
)
from . import mpc as mpc_mod

__all__ = ["main"]


def _emit(command, config, seed, metrics, t0, out_path):
    stats = {
        "command": command,
        "config": config,
        "seed": seed,
        "metrics": metrics,
        "timing_ms": round((time.perf_counter() - t0) * 1000.0, 3),
    }
    text = json.dumps(stats, sort_keys=True, indent=2, default=repr)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _cmd_gen(args):
    t0 = time.perf_counter()
    params = {}
    if args.kind == "cycles":
        params["parts"] = args.parts
    if args.kind == "path_soup":
        params["verts_per_path"] = args.verts_per_path
    spec = GeneratorSpec(args.kind, args.n, seed=args.seed,
                         weight_rule=args.weights, **params)
    g = generate(spec)
    save_graph(g, args.out)
    _emit(
        "gen",
        {"kind": args.kind, "n": args.n, "weights": args.weights, **params},
        args.seed,
        {"n": g.n, "m": g.m, "mode": g.mode, "path": args.out},
        t0,
        args.stats,
    )


def _cmd_cut(args):
    t0 = time.perf_counter()
    g = load_graph(args.graph)
    h = QueryHandle(g, seed=args.seed)
    c = sample_cutting(h, args.s, args.delta, seed=args.seed, mode=args.mode)
    report = verify_cutting(g, c, threads=args.threads)
    metrics = {
        "sector_count": c.sector_count(),
        "sector_count_bound": c.sector_count_bound(),
        "queries": h.total_queries,
        "sample_stats": c.sample_stats,
        **report,
    }
    _emit(
        "cut",
        {"graph": args.graph, "s": args.s, "delta": args.delta, "mode": args.mode},
        args.seed,
        metrics,
        t0,
        args.out,
    )


def _cmd_divide(args):
    t0 = time.perf_counter()
    g = load_graph(args.graph)
    h = QueryHandle(g, seed=args.seed)
    oracle = build_division_oracle(h, args.r, args.s, args.delta, seed=args.seed)
    metrics = {
        "region_count": oracle.region_count(),
        "sector_count": oracle.cutting.sector_count(),
        "queries": h.total_queries,
    }
    if args.verify:
        metrics.update(verify_pseudodivision(g, oracle))
    _emit(
        "divide",
        {"graph": args.graph, "r": args.r, "s": args.s, "delta": args.delta,
         "verify": bool(args.verify)},
        args.seed,
        metrics,
        t0,
        args.out,
    )


def _cmd_estimate(args):
    t0 = time.perf_counter()
    g = load_graph(args.graph)
    spec = builtin_specs()[args.param]
    values = []
    queries = []
    accepts = []
    for trial in range(args.trials):
        h = QueryHandle(g, seed=(args.seed, trial))
        if spec.distance_parameter:
            accepts.append(
                bool(test_property_distance(h, spec, args.eps, seed=args.seed + trial))
            )
            queries.append(h.total_queries)
        else:
            est = estimate_parameter(
                h, spec, args.eps, seed=args.seed + trial, threads=args.threads
            )
            values.append(est.value)
            queries.append(est.queries_used)
    metrics = {"queries": queries}
    if values:
        metrics["estimates"] = values
        metrics["mean"] = sum(values) / len(values)
    if accepts:
        metrics["accepts"] = accepts
    _emit(
        "estimate",
        {"graph": args.graph, "param": args.param, "eps": args.eps,
         "trials": args.trials},
        args.seed,
        metrics,
        t0,
        args.out,
    )


def _parse_algo_args(spec):
    out = {}
    if spec:
        for part in spec.split(","):
            k, _, v = part.partition("=")
            out[k.strip()] = int(v)
    return out


def _cmd_mpc(args):
    t0 = time.perf_counter()
    g = load_graph(args.graph)
    extra = _parse_algo_args(args.args)
    cluster, layout = mpc_mod.cluster_for_graph(
        g, seed=args.seed, space_exp=args.space_exp, slack=args.slack
    )
    cluster._root_layout = layout
    algo = args.algo
    if algo == "division":
        r = max(2, math.ceil(g.n ** 0.9))
        div = mpc_mod.mpc_r_division(cluster, layout, r, "cli")
        result = {"regions": len(div.regions), "restarts": div.restarts}
    elif algo == "cc":
        (hv, he), ell = mpc_mod.mpc_connected_components(cluster, g)
        labels = component_labels(hv, he) if hv else {}
        result = {"components": len(set(labels.values())) + ell}
    elif algo == "bipartite":
        coloring = mpc_mod.mpc_bipartition(cluster, g)
        result = {
            "bipartite": coloring is not None,
            "color_digest": _digest(sorted(coloring.items())) if coloring else None,
        }
    elif algo == "mst":
        ids = mpc_mod.mpc_mst(cluster, g)
        result = {
            "edges": len(ids),
            "weight": round(sum(g.edges[e][2] for e in ids), 9),
            "digest": _digest(sorted(ids)),
        }
    elif algo == "stpath":
        s, t = extra.get("s", g.vertices()[0]), extra.get("t", g.vertices()[-1])
        path = mpc_mod.mpc_st_path(cluster, g, s, t)
        result = {
            "length": round(sum(g.edges[e][2] for e in path), 9),
            "edges": len(path),
            "digest": _digest(path),
        }
    elif algo == "diameter":
        result = {"value": round(mpc_mod.mpc_diameter(cluster, g), 9)}
    else:
        raise SystemExit(f"unknown algo {algo!r}")
    trace = cluster.trace()
    metrics = {
        "result": result,
        "rounds": cluster.round,
        "restarts": cluster.restarts,
        "peak_words": max((m.peak_words for m in cluster.machines), default=0),
        "S": cluster.cfg.S,
        "M": cluster.cfg.M,
        "budget": cluster.cfg.budget,
        "round_peaks": [(t.round, t.max_words) for t in trace],
    }
    _emit(
        "mpc",
        {"graph": args.graph, "algo": algo, "space_exp": args.space_exp,
         "slack": args.slack, "args": args.args or ""},
        args.seed,
        metrics,
        t0,
        args.out,
    )


def _digest(items):
    import hashlib

    h = hashlib.sha256()
    for it in items:
        h.update(repr(it).encode())
    return h.hexdigest()[:16]


def _cmd_emst(args):
    t0 = time.perf_counter()
    points = []
    with open(args.points, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            x, y = line.split(",")
            points.append((float(x), float(y)))
    pts, pairs = emst(points, seed=args.seed, mode=args.mode)
    metrics = {
        "points": len(pts),
        "edges": len(pairs),
        "weight": round(
            sum(math.hypot(pts[b][0] - pts[a][0], pts[b][1] - pts[a][1]) for a, b in pairs),
            9,
        ),
        "digest": _digest(sorted(pairs)),
    }
    if args.check_brute and len(points) <= 600:
        brute = brute_force_emst(pts)
        metrics["matches_bruteforce"] = brute == pairs
    _emit(
        "emst",
        {"points": args.points, "mode": args.mode},
        args.seed,
        metrics,
        t0,
        args.out,
    )


def build_parser():
    p = argparse.ArgumentParser(prog="plandiv")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a test graph")
    g.add_argument("--kind", required=True, choices=GeneratorSpec.KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weights", default="euclidean",
                   choices=("euclidean", "uniform", "unit"))
    g.add_argument("--parts", type=int, default=1)
    g.add_argument("--verts-per-path", type=int, default=7)
    g.add_argument("--out", required=True)
    g.add_argument("--stats", default=None)
    g.set_defaults(fn=_cmd_gen)

    c = sub.add_parser("cut", help="sample and verify a cutting")
    c.add_argument("--graph", required=True)
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--delta", type=float, default=0.25)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--mode", default="planar",
                   choices=("planar", "crossing", "polyline"))
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(fn=_cmd_cut)

    d = sub.add_parser("divide", help="build and verify a division oracle")
    d.add_argument("--graph", required=True)
    d.add_argument("--r", type=int, required=True)
    d.add_argument("--s", type=int, required=True)
    d.add_argument("--delta", type=float, default=0.25)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--verify", action="store_true")
    d.add_argument("--out", default=None)
    d.set_defaults(fn=_cmd_divide)

    e = sub.add_parser("estimate", help="estimate an additive parameter")
    e.add_argument("--graph", required=True)
    e.add_argument("--param", required=True,
                   choices=("matching", "mis", "vc", "dominating", "dist-bipartite"))
    e.add_argument("--eps", type=float, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--trials", type=int, default=1)
    e.add_argument("--threads", type=int, default=1)
    e.add_argument("--out", default=None)
    e.set_defaults(fn=_cmd_estimate)

    m = sub.add_parser("mpc", help="run a simulated-cluster algorithm")
    m.add_argument("--graph", required=True)
    m.add_argument("--algo", required=True,
                   choices=("cc", "bipartite", "mst", "stpath", "diameter", "division"))
    m.add_argument("--space-exp", type=float, default=0.7)
    m.add_argument("--slack", type=float, default=None)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--args", default=None, help="algo args like s=3,t=97")
    m.add_argument("--out", default=None)
    m.set_defaults(fn=_cmd_mpc)

    t = sub.add_parser("emst", help="Euclidean MST of a point set")
    t.add_argument("--points", required=True, help="CSV with `x,y` per line")
    t.add_argument("--mode", default="oracle", choices=("oracle", "mpc"))
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--check-brute", action="store_true")
    t.add_argument("--out", default=None)
    t.set_defaults(fn=_cmd_emst)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.fn(args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
