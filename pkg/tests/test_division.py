import itertools
import math
import random

import pytest

from plandiv.config import DEFAULT
from plandiv.cutting import sample_cutting
from plandiv.division import (
    build_division_oracle,
    build_sector_graph,
    augment_to_division,
    planar_r_division,
    verify_pseudodivision,
)
from plandiv.errors import NotPlanar, OutOfBounds
from plandiv.graph import EmbeddedGraph, QueryHandle

from conftest import instance


def test_sector_graph_single_sector():
    g = EmbeddedGraph()
    g.add_vertex(0, 0.5, 0.5)
    g.freeze()
    h = QueryHandle(g, seed=0)
    c = sample_cutting(h, 1, 0.25, seed=0)
    sg = build_sector_graph(c)
    assert sg.n == 2  # one wall: two sectors, one adjacency
    assert sg.edge_count == 1


def test_sector_graph_wall_split_k2():
    from plandiv.geometry import build_trapezoid_map
    from plandiv.cutting import Cutting

    m = build_trapezoid_map([], [(5.0, 5.0)], (0, 0, 10, 10))
    c = Cutting(None, 0.0, m, 1, 0.25, 0, "planar", {})
    sg = build_sector_graph(c)
    assert sg.n == 2 and sg.edge_count == 1


def test_sector_graph_apex_at_path_vertex():
    # two segments sharing a vertex: 4 sectors meet at the shared point and
    # the owner connects to the diagonal sector through the corner
    from plandiv.geometry import Segment, build_trapezoid_map
    from plandiv.cutting import Cutting

    s1 = Segment.make((1.0, 5.0), (5.0, 5.5), "a")
    s2 = Segment.make((5.0, 5.5), (9.0, 5.0), "b")
    m = build_trapezoid_map([s1, s2], [], (0, 0, 10, 11))
    c = Cutting(None, 0.0, m, 1, 0.25, 0, "planar", {})
    sg = build_sector_graph(c)
    above_right = m.locate((5.0, 5.5))
    below_left = m.locate((4.9, 5.0))
    assert above_right in sg.adj[below_left]
    sg.check_planar_bound()


def test_r_division_path():
    adj = {i: [j for j in (i - 1, i + 1) if 0 <= j < 100] for i in range(100)}
    div = planar_r_division(adj, 10, seed=1)
    st = div.stats()
    assert st["covered_vertices"] == 100
    assert st["max_region_size"] <= 10
    assert st["region_count"] <= 4 * 100 / 10
    assert st["max_region_boundary"] <= 4 * math.sqrt(10)


def test_r_division_small_graph_single_region():
    adj = {0: [1], 1: [0, 2], 2: [1]}
    div = planar_r_division(adj, 5, seed=0)
    assert len(div.regions) == 1
    assert div.stats()["max_region_boundary"] == 0


def test_r_division_grid_bounds():
    side = 16
    adj = {}
    for i in range(side):
        for j in range(side):
            v = i * side + j
            adj[v] = []
            if i > 0:
                adj[v].append(v - side)
            if i < side - 1:
                adj[v].append(v + side)
            if j > 0:
                adj[v].append(v - 1)
            if j < side - 1:
                adj[v].append(v + 1)
    div = planar_r_division(adj, 32, seed=2)
    st = div.stats()
    assert st["covered_vertices"] == 256
    assert st["max_region_size"] <= 32
    assert st["region_count"] <= 4 * 256 / 32
    assert st["max_region_boundary"] <= 4 * math.sqrt(32)


def test_r_division_rejects_nonplanar():
    # K6 breaks the Euler bound
    adj = {i: [j for j in range(6) if j != i] for i in range(6)}
    with pytest.raises(NotPlanar):
        planar_r_division(adj, 3)


def _connected_masks(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        adj = {v: [] for v in range(n)}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) == n:
            yield adj, len(edges)


def test_r_division_exhaustive_small():
    # all connected graphs within the Euler bound, n <= 5, all r
    for n in range(2, 6):
        for adj, m in _connected_masks(n):
            if n >= 3 and m > 3 * n - 6:
                continue
            for r in range(2, n + 1):
                div = planar_r_division(adj, r, seed=0)
                st = div.stats()
                assert st["covered_vertices"] == n
                assert st["max_region_size"] <= r
                assert st["region_count"] <= max(1, 4.0 * n / r)
                assert st["max_region_boundary"] <= 4.0 * math.sqrt(r)


def test_oracle_single_region_for_small_graph():
    g = instance("path_soup", 12, seed=0, verts_per_path=12)
    h = QueryHandle(g, seed=0)
    o = build_division_oracle(h, r=12, s=12, delta=0.25, seed=0)
    regs = {o.regions_of_vertex(v) for v in g.vertices()}
    assert all(len(r) >= 1 for r in regs)


def test_oracle_zero_queries_for_lookups():
    g = instance("delaunay", 400, seed=3)
    h = QueryHandle(g, seed=2)
    o = build_division_oracle(h, r=80, s=5, delta=0.25, seed=2)
    before = h.total_queries
    for vid in g.vertices():
        r1 = o.regions_of_vertex(vid)
        assert r1 == o.regions_of_vertex(vid)
    assert h.total_queries == before


def test_oracle_same_sector_same_regions():
    g = instance("delaunay", 300, seed=4)
    h = QueryHandle(g, seed=5)
    o = build_division_oracle(h, r=60, s=4, delta=0.25, seed=5)
    by_sector = {}
    for vid in g.vertices():
        sid = o.cutting.sector_of_vertex(vid)
        regs = o.regions_of_vertex(vid)
        assert by_sector.setdefault(sid, regs) == regs


def test_oracle_out_of_bounds():
    g = instance("grid", 64, seed=0)
    h = QueryHandle(g, seed=0)
    o = build_division_oracle(h, r=16, s=2, delta=0.25, seed=0)
    big = g.coordinate_radius() * 10
    with pytest.raises(OutOfBounds):
        o.regions_of_point((big, big))


def test_verify_pseudodivision_and_augment():
    g = instance("grid", 1024, seed=6)
    n = g.n
    r = math.ceil(n ** 0.75)
    s = math.ceil(n ** 0.25)
    passes = 0
    for seed in range(8):
        h = QueryHandle(g, seed=seed)
        o = build_division_oracle(h, r=r, s=s, delta=0.25, seed=seed)
        rep = verify_pseudodivision(g, o)
        passes += rep["pass"]
        if rep["pass"]:
            assert rep["max_region_size"] <= r
        aug = augment_to_division(g, o)
        vr = aug.vertex_regions()
        for eid in g.edge_ids():
            u, v, _w, _pl = g.edges[eid]
            assert vr[u] & vr[v], "augmented division must cover every edge"
    assert passes >= 6


def test_pseudodivision_soundness_full_scan():
    # every edge: endpoints share a region, or it crosses a boundary sector
    g = instance("delaunay", 600, seed=8)
    h = QueryHandle(g, seed=3)
    o = build_division_oracle(h, r=150, s=5, delta=0.25, seed=3)
    boundary = o.boundary_sector_ids()
    c = o.cutting
    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        if o.regions_of_vertex(u) & o.regions_of_vertex(v):
            continue
        crossed = set()
        for seg in c.edge_pieces(eid):
            crossed.update(c.map.sectors_touching_segment(seg))
        assert crossed & boundary


def test_augment_no_boundary_edges_identity():
    g = instance("path_soup", 40, seed=1, verts_per_path=4)
    h = QueryHandle(g, seed=1)
    o = build_division_oracle(h, r=40, s=10, delta=0.25, seed=1)
    aug = augment_to_division(g, o)
    vr = aug.vertex_regions()
    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        assert vr[u] & vr[v]
