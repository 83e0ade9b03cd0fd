"""Embedded graph storage and the sublinear query model.

EmbeddedGraph is immutable after load.  All access by sublinear algorithms
goes through a QueryHandle, which counts vertex samples, edge samples, and
neighbor probes; these counters certify sublinearity in the tests.
"""

from __future__ import annotations

import math
import random

from .errors import (
    EmptyGraph,
    IndexOutOfRange,
    InvariantViolation,
    NoEdges,
    ParseError,
)
from .geometry import Segment, proper_crossing

__all__ = ["EmbeddedGraph", "QueryHandle", "MarkedSet", "load_graph", "save_graph"]


class EmbeddedGraph:
    """Undirected graph with per-vertex coordinates and optional per-edge
    polylines.

    Adjacency order is the order edges appear in the input; the "i-th
    neighbor" query is defined against it.  Edge keys (weight, edge id) are
    totally ordered, which makes minimum spanning trees unique.
    """

    def __init__(self, mode="planar"):
        if mode not in ("planar", "crossing"):
            raise InvariantViolation(f"unknown mode {mode!r}")
        self.mode = mode
        self.coords = {}      # vertex id -> (x, y)
        self.adj = {}         # vertex id -> list of (neighbor id, edge id)
        self.edges = {}       # edge id -> (u, v, weight, polyline pts or None)
        self._vertex_list = None
        self._edge_list = None
        self._radius = None
        self._frozen = False

    # -- construction -------------------------------------------------------

    def add_vertex(self, vid, x, y):
        if self._frozen:
            raise InvariantViolation("graph is frozen")
        if vid in self.coords:
            raise InvariantViolation(f"duplicate vertex id {vid}")
        self.coords[vid] = (float(x), float(y))
        self.adj[vid] = []

    def add_edge(self, eid, u, v, weight=None, polyline=None):
        if self._frozen:
            raise InvariantViolation("graph is frozen")
        if eid in self.edges:
            raise InvariantViolation(f"duplicate edge id {eid}")
        if u == v:
            raise InvariantViolation(f"self-loop at {u}")
        if u not in self.coords or v not in self.coords:
            raise InvariantViolation(f"edge {eid} references unknown vertex")
        for (w, _e) in self.adj[u]:
            if w == v:
                raise InvariantViolation(f"parallel edge {u}-{v}")
        if polyline is not None:
            polyline = tuple((float(x), float(y)) for x, y in polyline)
        if weight is None:
            weight = self.embedded_length(u, v, polyline)
        self.edges[eid] = (u, v, float(weight), polyline)
        self.adj[u].append((v, eid))
        self.adj[v].append((u, eid))

    def embedded_length(self, u, v, polyline=None):
        chain = [self.coords[u]]
        if polyline:
            chain.extend(polyline)
        chain.append(self.coords[v])
        return sum(
            math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(chain, chain[1:])
        )

    def freeze(self):
        self._vertex_list = sorted(self.coords)
        self._edge_list = sorted(self.edges)
        self._frozen = True
        return self

    # -- basic accessors ----------------------------------------------------

    @property
    def n(self):
        return len(self.coords)

    @property
    def m(self):
        return len(self.edges)

    def vertices(self):
        return self._vertex_list if self._frozen else sorted(self.coords)

    def edge_ids(self):
        return self._edge_list if self._frozen else sorted(self.edges)

    def degree(self, v):
        return len(self.adj[v])

    def weight_key(self, eid):
        return (self.edges[eid][2], eid)

    def coordinate_radius(self):
        """Max Euclidean norm over all embedded coordinates; rotation about
        the origin never leaves the disk of this radius."""
        if self._radius is None:
            r = 0.0
            for x, y in self.coords.values():
                r = max(r, math.hypot(x, y))
            for _u, _v, _w, pl in self.edges.values():
                if pl:
                    for x, y in pl:
                        r = max(r, math.hypot(x, y))
            self._radius = max(r, 1.0)
        return self._radius

    def edge_segment(self, eid):
        u, v, _w, _pl = self.edges[eid]
        return Segment.make(self.coords[u], self.coords[v], eid)

    def check_invariants(self, full_planarity=False):
        """Adjacency symmetry always; straight-line crossing-freeness in
        planar mode when full_planarity is set (grid-hashed pair scan)."""
        for v, nbrs in self.adj.items():
            for w, eid in nbrs:
                if (v, eid) not in [(x, e) for x, e in self.adj[w]]:
                    raise InvariantViolation(f"asymmetric adjacency at {v}-{w}")
        if self.mode == "planar" and self.m > 3 * max(self.n, 3) - 6:
            raise InvariantViolation(
                f"edge count {self.m} breaks the planar bound for n={self.n}"
            )
        if full_planarity and self.mode == "planar":
            cross = self.count_crossings(stop_at_first=True)
            if cross:
                raise InvariantViolation("planar-mode graph has crossing edges")
        return True

    def count_crossings(self, stop_at_first=False):
        """Proper crossings among straight-line edge embeddings, found with a
        uniform-grid candidate filter."""
        segs = []
        for eid in self.edge_ids():
            u, v, _w, _pl = self.edges[eid]
            a, b = self.coords[u], self.coords[v]
            if a[0] == b[0]:
                segs.append(Segment(a[0], min(a[1], b[1]), a[0] + 0.0, max(a[1], b[1]), eid))
            else:
                segs.append(Segment.make(a, b, eid))
        if not segs:
            return 0
        xs = [c for s in segs for c in (s.ax, s.bx)]
        ys = [c for s in segs for c in (s.ay, s.by)]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        side = max(1, int(math.sqrt(len(segs))))
        dx = (x1 - x0) / side or 1.0
        dy = (y1 - y0) / side or 1.0
        grid = {}
        for idx, s in enumerate(segs):
            gx0 = int((s.ax - x0) / dx)
            gx1 = int((s.bx - x0) / dx)
            gy0 = int((min(s.ay, s.by) - y0) / dy)
            gy1 = int((max(s.ay, s.by) - y0) / dy)
            for gx in range(gx0, gx1 + 1):
                for gy in range(gy0, gy1 + 1):
                    grid.setdefault((gx, gy), []).append(idx)
        seen = set()
        count = 0
        for bucket in grid.values():
            for i in range(len(bucket)):
                for j in range(i + 1, len(bucket)):
                    pair = (bucket[i], bucket[j]) if bucket[i] < bucket[j] else (bucket[j], bucket[i])
                    if pair in seen:
                        continue
                    seen.add(pair)
                    if proper_crossing(segs[pair[0]], segs[pair[1]]):
                        count += 1
                        if stop_at_first:
                            return count
        return count


class MarkedSet:
    """Set of marked vertex ids with O(1) membership/size and iteration."""

    def __init__(self, graph_or_vertices, ids=()):
        if isinstance(graph_or_vertices, EmbeddedGraph):
            universe = graph_or_vertices.coords
        else:
            universe = set(graph_or_vertices)
        self._set = set()
        for v in ids:
            if v not in universe:
                raise InvariantViolation(f"marked vertex {v} not in graph")
            self._set.add(v)

    def __contains__(self, v):
        return v in self._set

    def __len__(self):
        return len(self._set)

    def __iter__(self):
        return iter(sorted(self._set))


class QueryHandle:
    """Query-counted access to an EmbeddedGraph.

    One handle per worker; merge counters at join.  Edge sampling is uniform
    by default; a biased sampler with minimum probability 1/(2m) can be
    injected to exercise approximate-sampling robustness.
    """

    def __init__(self, graph: EmbeddedGraph, seed=0, biased_edge_sampler=None):
        if not graph._frozen:
            graph.freeze()
        self.graph = graph
        self.seed = seed
        self.rng = random.Random(seed)
        self.vertex_samples = 0
        self.edge_samples = 0
        self.neighbor_probes = 0
        self._biased = biased_edge_sampler

    def spawn(self, tag):
        """Independent child stream; counters merged back via merge_from."""
        return QueryHandle(
            self.graph,
            seed=f"{self.seed}|spawn|{tag}",
            biased_edge_sampler=self._biased,
        )

    def merge_from(self, other):
        self.vertex_samples += other.vertex_samples
        self.edge_samples += other.edge_samples
        self.neighbor_probes += other.neighbor_probes

    @property
    def total_queries(self):
        return self.vertex_samples + self.edge_samples + self.neighbor_probes

    def random_vertex(self):
        g = self.graph
        if g.n == 0:
            raise EmptyGraph("cannot sample a vertex of the empty graph")
        self.vertex_samples += 1
        return g._vertex_list[self.rng.randrange(g.n)]

    def random_edge(self):
        g = self.graph
        if g.m == 0:
            raise NoEdges("graph has no edges")
        self.edge_samples += 1
        if self._biased is not None:
            return self._biased(self.rng, g)
        return g._edge_list[self.rng.randrange(g.m)]

    def neighbor(self, v, i):
        """1-based i-th neighbor of v and the connecting edge id."""
        nbrs = self.graph.adj[v]
        if not 1 <= i <= len(nbrs):
            raise IndexOutOfRange(f"neighbor index {i} of vertex {v} (deg {len(nbrs)})")
        self.neighbor_probes += 1
        return nbrs[i - 1]

    def degree(self, v):
        """Degree lookup, charged as one neighbor probe."""
        self.neighbor_probes += 1
        return len(self.graph.adj[v])


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------
#
# UTF-8 text.  Header: `n m planar|crossing`.  Then n lines
# `v <id> <x> <y>` and m lines `e <id> <u> <v> <weight> [x1 y1 x2 y2 ...]`
# (interior polyline points).  A missing weight is distinguished by token
# parity and defaults to the Euclidean length of the embedding.


def save_graph(g: EmbeddedGraph, path):
    lines = [f"{g.n} {g.m} {g.mode}"]
    for vid in sorted(g.coords):
        x, y = g.coords[vid]
        lines.append(f"v {vid} {x!r} {y!r}")
    for eid in sorted(g.edges):
        u, v, w, pl = g.edges[eid]
        parts = [f"e {eid} {u} {v} {w!r}"]
        if pl:
            parts.extend(f"{x!r} {y!r}" for x, y in pl)
        lines.append(" ".join(parts))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path, validate=True):
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise ParseError("empty file", 1)
    lno, header = lines[0]
    toks = header.split()
    if len(toks) not in (2, 3):
        raise ParseError("header must be `n m [planar|crossing]`", lno)
    try:
        n, m = int(toks[0]), int(toks[1])
    except ValueError:
        raise ParseError("non-integer header counts", lno) from None
    mode = toks[2] if len(toks) == 3 else "planar"
    g = EmbeddedGraph(mode=mode)
    body = lines[1:]
    if len(body) != n + m:
        raise ParseError(f"expected {n + m} body lines, found {len(body)}", lno)
    for lno, ln in body[:n]:
        toks = ln.split()
        if len(toks) != 4 or toks[0] != "v":
            raise ParseError("vertex line must be `v <id> <x> <y>`", lno)
        try:
            g.add_vertex(int(toks[1]), float(toks[2]), float(toks[3]))
        except ValueError:
            raise ParseError("malformed vertex fields", lno) from None
        except InvariantViolation as exc:
            raise ParseError(str(exc), lno) from None
    for lno, ln in body[n:]:
        toks = ln.split()
        if len(toks) < 4 or toks[0] != "e":
            raise ParseError("edge line must be `e <id> <u> <v> [w] [pts]`", lno)
        rest = toks[4:]
        try:
            eid, u, v = int(toks[1]), int(toks[2]), int(toks[3])
            if len(rest) % 2 == 1:
                weight = float(rest[0])
                coords = [float(t) for t in rest[1:]]
            else:
                weight = None
                coords = [float(t) for t in rest]
        except ValueError:
            raise ParseError("malformed edge fields", lno) from None
        polyline = (
            list(zip(coords[0::2], coords[1::2])) if coords else None
        )
        try:
            g.add_edge(eid, u, v, weight, polyline)
        except InvariantViolation as exc:
            raise ParseError(str(exc), lno) from None
    g.freeze()
    if validate:
        g.check_invariants(full_planarity=False)
    return g
