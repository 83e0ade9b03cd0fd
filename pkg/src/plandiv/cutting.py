"""Sampled good s/n-cuttings of an embedded graph.

A cutting samples edges and vertices through a QueryHandle, rotates them by
a random angle drawn from a discrete grid of 2^32 angles (lazily: stored
coordinates are never mutated), and builds the trapezoid map of the sample.
Detected degeneracies redraw the angle and rebuild without consuming new
queries.  verify_cutting is the full-scan test oracle, not a sublinear
procedure.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

from .config import DEFAULT
from .errors import DegenerateCrossing, DegenerateInput, EmptyGraph
from .geometry import (
    Polyline,
    Segment,
    build_trapezoid_map,
    planarize_segments,
    rotate_point,
    subdivide_x_monotone,
)
from .graph import EmbeddedGraph, QueryHandle

__all__ = [
    "Cutting",
    "sample_cutting",
    "sample_cutting_nonplanar",
    "sample_cutting_polyline",
    "verify_cutting",
]

_THETA_GRID = 2 ** 32


class Cutting:
    """Plane partition (trapezoid map of a rotated sample) with parameters
    and sampling statistics."""

    def __init__(self, graph, theta, trap_map, s, delta, seed, mode, sample_stats):
        self.graph = graph
        self.theta = theta
        self.map = trap_map
        self.s = s
        self.delta = delta
        self.seed = seed
        self.mode = mode
        self.sample_stats = sample_stats
        self._cos = math.cos(theta)
        self._sin = math.sin(theta)

    def rotate(self, p):
        x, y = p
        return (x * self._cos - y * self._sin, x * self._sin + y * self._cos)

    def sector_of_point(self, p):
        """Sector id owning the (unrotated) coordinate p."""
        return self.map.locate(self.rotate(p))

    def sector_of_vertex(self, vid):
        return self.sector_of_point(self.graph.coords[vid])

    def sector_count(self):
        return self.map.sector_count()

    def sector_count_bound(self, c_cut=None):
        cfg = DEFAULT.cutting
        c = cfg.c_cut if c_cut is None else c_cut
        g = self.graph
        n = max(g.n, 2)
        return c * (n / max(1, self.s)) * (math.log2(n) + math.log2(1 / self.delta))

    def edge_pieces(self, eid):
        """Rotated segment pieces embedding the edge under this cutting's
        rotation (several pieces for polylines in polyline mode)."""
        g = self.graph
        u, v, _w, pl = g.edges[eid]
        a = self.rotate(g.coords[u])
        b = self.rotate(g.coords[v])
        if self.mode == "polyline" and pl:
            chain = [a] + [self.rotate(p) for p in pl] + [b]
            pieces = []
            for piece in subdivide_x_monotone(Polyline.make(chain, eid)):
                for q1, q2 in zip(piece.pts, piece.pts[1:]):
                    pieces.append(Segment.make(q1, q2, eid))
            return pieces
        return [Segment.make(a, b, eid)]


def _draw_theta(seed, attempt):
    rng = random.Random(f"theta:{seed}:{attempt}")
    return 2.0 * math.pi * rng.randrange(_THETA_GRID) / _THETA_GRID


def _sample(h: QueryHandle, s, delta, counts, config):
    cfg = (config or DEFAULT).cutting
    g = h.graph
    if g.n == 0:
        raise EmptyGraph("cannot cut the empty graph")
    if counts is not None:
        n_edges, n_verts = counts
    else:
        n_edges = cfg.edge_samples(g.n, s, delta)
        n_verts = cfg.vertex_samples(g.n, s, delta)
    edge_ids = set()
    if g.m > 0:  # edgeless graphs skip edge draws entirely
        for _ in range(n_edges):
            edge_ids.add(h.random_edge())
    else:
        n_edges = 0
    vert_ids = set()
    for _ in range(n_verts):
        vert_ids.add(h.random_vertex())
    return edge_ids, vert_ids, n_edges, n_verts


def sample_cutting(
    h: QueryHandle,
    s,
    delta,
    seed=None,
    mode="planar",
    counts=None,
    config=None,
):
    """Good s/n-cutting of the sample (Las Vegas over rotation angles).

    mode "planar" expects non-crossing straight edges; "crossing" planarizes
    the sampled segments first; "polyline" subdivides sampled polylines into
    x-monotone pieces.  `counts` overrides the sample sizes (the MPC driver
    feeds a pre-gathered pool).
    """
    cfg = config or DEFAULT
    g = h.graph
    if not 1 <= s <= max(g.n, 1):
        raise DegenerateInput(f"s={s} outside 1..n")
    if seed is None:
        seed = h.rng.getrandbits(32)
    edge_ids, vert_ids, n_edges, n_verts = _sample(h, s, delta, counts, cfg)

    last_exc = None
    for attempt in range(cfg.cutting.rotation_retries):
        theta = _draw_theta(seed, attempt)
        try:
            return _build(
                g, theta, edge_ids, vert_ids, s, delta, seed, mode,
                n_edges, n_verts, cfg,
            )
        except (DegenerateInput, DegenerateCrossing) as exc:
            last_exc = exc
    raise DegenerateInput(
        f"no usable rotation after {cfg.cutting.rotation_retries} redraws"
    ) from last_exc


def _build(g, theta, edge_ids, vert_ids, s, delta, seed, mode, n_edges, n_verts, cfg):
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    def rot(p):
        return (p[0] * cos_t - p[1] * sin_t, p[0] * sin_t + p[1] * cos_t)

    segments = []
    endpoint_vids = set()
    for eid in sorted(edge_ids):
        u, v, _w, pl = g.edges[eid]
        endpoint_vids.add(u)
        endpoint_vids.add(v)
        a = rot(g.coords[u])
        b = rot(g.coords[v])
        if mode == "polyline" and pl:
            chain = [a] + [rot(p) for p in pl] + [b]
            for piece in subdivide_x_monotone(Polyline.make(chain, eid)):
                for q1, q2 in zip(piece.pts, piece.pts[1:]):
                    segments.append(Segment.make(q1, q2, eid))
        else:
            segments.append(Segment.make(a, b, eid))

    crossings = []
    if mode == "crossing":
        segments, crossings = planarize_segments(segments)

    iso_points = [
        rot(g.coords[v]) for v in sorted(vert_ids) if v not in endpoint_vids
    ]
    radius = g.coordinate_radius() * cfg.cutting.bbox_margin
    bbox = (-radius, -radius, radius, radius)
    trap_map = build_trapezoid_map(segments, iso_points, bbox, seed=seed)
    stats = {
        "edges_sampled": n_edges,
        "vertices_sampled": n_verts,
        "distinct_edges": len(edge_ids),
        "distinct_vertices": len(vert_ids),
        "segments_in_map": len(segments),
        "crossings_in_sample": len(crossings),
    }
    return Cutting(g, theta, trap_map, s, delta, seed, mode, stats)


def sample_cutting_nonplanar(h, s, delta, seed=None, counts=None, config=None):
    """Cutting over the planarization of the sampled segments."""
    return sample_cutting(h, s, delta, seed=seed, mode="crossing", counts=counts, config=config)


def sample_cutting_polyline(h, s, delta, seed=None, counts=None, config=None):
    """Cutting over x-monotone pieces of the sampled polyline edges."""
    return sample_cutting(h, s, delta, seed=seed, mode="polyline", counts=counts, config=config)


def verify_cutting(g: EmbeddedGraph, c: Cutting, threads=1):
    """Full-scan quality report for a cutting.

    Assigns every vertex to its owning sector and sweeps every edge across
    the sectors whose closure it intersects; pass means no sector owns more
    than s vertices or is intersected by more than s edges.
    """
    trap_map = c.map
    owner = {}
    vertex_counts = Counter()
    for vid in g.vertices():
        t = trap_map.owner_trap(c.rotate(g.coords[vid]))
        owner[vid] = t
        vertex_counts[t.id] += 1

    def scan(eids):
        counts = Counter()
        for eid in eids:
            u, v, _w, _pl = g.edges[eid]
            tu, tv = owner[u], owner[v]
            pieces = c.edge_pieces(eid)
            if len(pieces) == 1 and tu is tv:
                counts[tu.id] += 1
                continue
            ids = set()
            for seg in pieces:
                left = (seg.ax, seg.ay)
                start = None
                if not trap_map.is_map_point(left):
                    if left == c.rotate(g.coords[u]):
                        start = tu
                    elif left == c.rotate(g.coords[v]):
                        start = tv
                ids.update(trap_map.sectors_touching_segment(seg, start=start))
            for sid in ids:
                counts[sid] += 1
        return counts

    eids = g.edge_ids()
    if threads > 1 and len(eids) > 256:
        chunk = (len(eids) + threads - 1) // threads
        parts = [eids[i : i + chunk] for i in range(0, len(eids), chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(scan, parts))
        edge_counts = Counter()
        for r in results:
            edge_counts.update(r)
    else:
        edge_counts = scan(eids)

    max_v = max(vertex_counts.values(), default=0)
    max_e = max(edge_counts.values(), default=0)
    report = {
        "max_sector_vertices": max_v,
        "max_sector_crossing_edges": max_e,
        "sector_count": trap_map.sector_count(),
        "pass": max_v <= c.s and max_e <= c.s,
    }
    return report
