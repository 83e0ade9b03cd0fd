"""Sublinear estimation of additive alpha-Lipschitz graph parameters.

The estimator builds a division oracle, then repeatedly samples a vertex
and, when it is interior to a region and of low degree, explores its
component in the filtered graph (interior vertices of low degree reachable
without traversing edges that cross boundary sectors) and adds the
Horvitz-Thompson increment n * value(H) / |H|.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .config import DEFAULT
from .division import DivisionOracle, build_division_oracle
from .errors import ComponentCapExceeded
from .graph import EmbeddedGraph, QueryHandle
from . import solvers

__all__ = [
    "ParameterSpec",
    "Estimate",
    "builtin_specs",
    "solve_component",
    "estimate_parameter",
    "test_property_distance",
    "exact_filtered_value",
]


@dataclass(frozen=True)
class ParameterSpec:
    """Additive alpha-Lipschitz parameter with an exact component solver.

    solver(vertices, edges) must return the exact optimum; solver of the
    empty graph must be 0 and values must add over disjoint unions.
    """

    name: str
    alpha: float
    solver: object
    component_size_cap: int
    distance_parameter: bool = False


def builtin_specs(config=None):
    cfg = (config or DEFAULT).estimator
    return {
        "matching": ParameterSpec(
            "matching", 1.0, solvers.max_matching, cfg.matching_cap
        ),
        "mis": ParameterSpec("mis", 1.0, solvers.max_independent_set, cfg.mis_cap),
        "vc": ParameterSpec("vc", 1.0, solvers.min_vertex_cover, cfg.vc_cap),
        "dominating": ParameterSpec(
            "dominating", 1.0, solvers.min_dominating_set, cfg.dominating_cap
        ),
        "dist-bipartite": ParameterSpec(
            "dist-bipartite",
            1.0,
            solvers.distance_to_bipartite,
            cfg.dist_cap,
            distance_parameter=True,
        ),
    }


def solve_component(spec: ParameterSpec, vertices, edges):
    """Exact parameter value of a small graph; refuses oversized inputs."""
    vertices = list(vertices)
    if len(vertices) > spec.component_size_cap:
        raise ComponentCapExceeded(
            f"component of {len(vertices)} vertices exceeds cap "
            f"{spec.component_size_cap} for {spec.name}"
        )
    if not vertices:
        return 0
    return spec.solver(vertices, list(edges))


@dataclass
class Estimate:
    value: float
    k: int
    queries_used: int
    config: dict = field(default_factory=dict)
    increments: list = None


def _estimator_params(n, eps, cfg):
    log_n = max(1.0, math.log2(max(n, 2)))
    r = max(2, math.ceil(math.sqrt(eps * n * log_n ** 3)))
    s = max(1, math.ceil(cfg.c_s * eps ** 2.5 * math.sqrt(n / log_n)))
    s = min(s, r)
    return r, s


def _explore_component(hq, oracle, v, thresh, cap):
    """Component of v in the filtered graph: interior low-degree vertices
    reached without traversing edges that cross boundary sectors.

    Returns (vertices, edges) or None when v itself is filtered out.
    Region lookups and boundary-sector tests use coordinates only and cost
    no graph queries.
    """
    g = hq.graph
    c = oracle.cutting
    trap_map = c.map
    boundary = oracle.boundary_sector_ids()

    def interior_trap(vid):
        t = trap_map.owner_trap(c.rotate(g.coords[vid]))
        return t, len(oracle.sector_regions[t.id]) == 1

    tv, ok = interior_trap(v)
    if not ok:
        return None
    if hq.degree(v) > thresh:
        return None
    comp = {v}
    traps = {v: tv}
    edges = []
    stack = [v]
    while stack:
        u = stack.pop()
        du = len(g.adj[u])
        for i in range(1, du + 1):
            w, eid = hq.neighbor(u, i)
            if w in comp:
                if u < w:
                    edges.append((u, w))
                continue
            tw, ok = interior_trap(w)
            if not ok:
                continue
            if hq.degree(w) > thresh:
                continue
            # the connecting edge must not dip through a boundary sector; an
            # edge whose endpoints share an interior sector stays inside it
            tu = traps[u]
            crossed = False
            if tu is not tw:
                for seg in c.edge_pieces(eid):
                    for sid in trap_map.sectors_touching_segment(seg):
                        if sid in boundary:
                            crossed = True
                            break
                    if crossed:
                        break
            if crossed:
                continue
            comp.add(w)
            traps[w] = tw
            if len(comp) > cap:
                raise ComponentCapExceeded(
                    f"filtered component exceeded cap {cap}"
                )
            edges.append((u, w) if u < w else (w, u))
            stack.append(w)
    return sorted(comp), edges


def _filtered_edge_ok(g, oracle, eid, boundary):
    """Shared edge filter: True when the edge crosses no boundary sector."""
    c = oracle.cutting
    for seg in c.edge_pieces(eid):
        for sid in c.map.sectors_touching_segment(seg):
            if sid in boundary:
                return False
    return True


def estimate_parameter(
    h: QueryHandle, spec: ParameterSpec, eps, seed=None, config=None, threads=1
):
    """Additive +-eps*n estimate of an additive alpha-Lipschitz parameter."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    cfg = config or DEFAULT
    g = h.graph
    n = g.n
    if n == 0:
        return Estimate(0.0, 0, 0, {"eps": eps})
    if seed is None:
        seed = h.rng.getrandbits(32)
    r, s = _estimator_params(n, eps, cfg.estimator)
    delta = cfg.estimator.delta
    oracle = build_division_oracle(h, r, s, delta, seed=seed, config=cfg)
    alpha = spec.alpha
    k = math.ceil(36.0 * alpha * alpha / (eps * eps))
    thresh = math.ceil(18.0 * alpha / eps)

    def run_round(i):
        hq = h.spawn(f"round:{i}")
        v = hq.random_vertex()
        try:
            comp = _explore_component(hq, oracle, v, thresh, spec.component_size_cap)
        except ComponentCapExceeded:
            raise
        if comp is None:
            return 0.0, hq
        vs, es = comp
        value = solve_component(spec, vs, es)
        inc = n * value / len(vs)
        return inc, hq

    increments = [0.0] * k
    if threads > 1 and k > 8:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_round, range(k)))
    else:
        results = [run_round(i) for i in range(k)]
    for i, (inc, hq) in enumerate(results):
        increments[i] = inc
        h.merge_from(hq)
    value = sum(increments) / k
    return Estimate(
        value,
        k,
        h.total_queries,
        {
            "eps": eps,
            "r": r,
            "s": s,
            "delta": delta,
            "k": k,
            "degree_threshold": thresh,
            "seed": seed,
        },
        increments,
    )


def test_property_distance(
    h: QueryHandle, spec: ParameterSpec, eps, seed=None, config=None
):
    """One-sided tester: accept iff every sampled increment is zero.

    Uses k = ceil(3/eps) rounds over a coarser division (r without the eps
    factor, s with eps^2); sound for distance parameters: accepts whenever
    the distance is 0, rejects only on evidence of a positive component.
    """
    if not spec.distance_parameter:
        raise ValueError(f"{spec.name} is not a distance-to-property parameter")
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    cfg = config or DEFAULT
    g = h.graph
    n = g.n
    if n == 0:
        return True
    if seed is None:
        seed = h.rng.getrandbits(32)
    log_n = max(1.0, math.log2(max(n, 2)))
    r = max(2, math.ceil(math.sqrt(n * log_n ** 3)))
    s = max(1, math.ceil(cfg.estimator.c_s * eps ** 2 * math.sqrt(n * log_n)))
    s = min(s, r)
    oracle = build_division_oracle(h, r, s, cfg.estimator.delta, seed=seed, config=cfg)
    alpha = spec.alpha
    k = math.ceil(3.0 / eps)
    thresh = math.ceil(18.0 * alpha / eps)
    for i in range(k):
        hq = h.spawn(f"test:{i}")
        v = hq.random_vertex()
        comp = _explore_component(hq, oracle, v, thresh, spec.component_size_cap)
        h.merge_from(hq)
        if comp is None:
            continue
        vs, es = comp
        if solve_component(spec, vs, es) > 0:
            return False
    return True


def exact_filtered_value(g: EmbeddedGraph, oracle: DivisionOracle, spec, eps):
    """Full-scan value of the filtered graph the estimator targets: remove
    boundary-sector vertices and high-degree vertices, drop edges crossing
    boundary sectors, and sum the solver over components (test oracle)."""
    boundary = oracle.boundary_sector_ids()
    thresh = math.ceil(18.0 * spec.alpha / eps)
    c = oracle.cutting
    keep = set()
    for vid in g.vertices():
        sid = c.map.owner_trap(c.rotate(g.coords[vid])).id
        if sid in boundary:
            continue
        if len(g.adj[vid]) > thresh:
            continue
        keep.add(vid)
    adj = {v: [] for v in keep}
    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        if u in keep and v in keep and _filtered_edge_ok(g, oracle, eid, boundary):
            adj[u].append(v)
            adj[v].append(u)
    seen = set()
    total = 0
    for sv in sorted(keep):
        if sv in seen:
            continue
        comp = [sv]
        seen.add(sv)
        stack = [sv]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        edges = [
            (u, w) for u in comp for w in adj[u] if u < w
        ]
        total += solve_component(spec, comp, edges)
    return total
