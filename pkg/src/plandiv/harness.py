"""Test-graph generators, the Euclidean-MST pipeline, and sequential oracles.

The Delaunay generator is a local incremental Bowyer-Watson construction
with exact in-circle/orientation predicates; enclosing "far" vertices are
handled by symbolic limit rules so the result does not depend on where the
enclosing triangle is drawn.  Cocircular and collinear degeneracies are
broken by a seed-controlled jitter applied to the input points.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from fractions import Fraction

from .errors import BadSpec, DuplicatePoints
from .graph import EmbeddedGraph

__all__ = [
    "delaunay",
    "delaunay_graph",
    "emst",
    "generate",
    "GeneratorSpec",
    "UnionFind",
    "component_count",
    "component_labels",
    "kruskal",
    "bfs_two_coloring",
    "dijkstra",
    "exact_diameter",
    "brute_force_emst",
]

# Rational unit directions for the three far vertices (symbolic limit rules
# stay exact because the direction sums are rational).
_FAR_DIRS = {-1: (0.0, 1.0), -2: (-0.8, -0.6), -3: (0.8, -0.6)}


def _orient_sign(ax, ay, bx, by, cx, cy):
    l = (bx - ax) * (cy - ay)
    r = (by - ay) * (cx - ax)
    det = l - r
    bound = 3.3306690738754716e-16 * (abs(l) + abs(r))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    f = Fraction
    det = (f(bx) - f(ax)) * (f(cy) - f(ay)) - (f(by) - f(ay)) * (f(cx) - f(ax))
    return (det > 0) - (det < 0)


_ICC_ERR = 1.1102230246251565e-15 * 10.1


def _in_circle(ax, ay, bx, by, cx, cy, dx, dy):
    """Positive iff d lies strictly inside the circumcircle of CCW (a,b,c)."""
    adx = ax - dx
    ady = ay - dy
    bdx = bx - dx
    bdy = by - dy
    cdx = cx - dx
    cdy = cy - dy
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    det = (
        ad * (bdx * cdy - bdy * cdx)
        - bd * (adx * cdy - ady * cdx)
        + cd * (adx * bdy - ady * bdx)
    )
    perm = (
        ad * (abs(bdx * cdy) + abs(bdy * cdx))
        + bd * (abs(adx * cdy) + abs(ady * cdx))
        + cd * (abs(adx * bdy) + abs(ady * bdx))
    )
    bound = _ICC_ERR * perm
    if det > bound:
        return 1
    if -det > bound:
        return -1
    f = Fraction
    adx, ady = f(ax) - f(dx), f(ay) - f(dy)
    bdx, bdy = f(bx) - f(dx), f(by) - f(dy)
    cdx, cdy = f(cx) - f(dx), f(cy) - f(dy)
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    det = (
        ad * (bdx * cdy - bdy * cdx)
        - bd * (adx * cdy - ady * cdx)
        + cd * (adx * bdy - ady * bdx)
    )
    return (det > 0) - (det < 0)


class _Delaunay:
    """Incremental Delaunay triangulation of jittered points."""

    def __init__(self, pts, far_scale):
        # vertices: 0..n-1 real, -1..-3 far
        self.pts = pts
        self.far = {
            k: (d[0] * far_scale, d[1] * far_scale) for k, d in _FAR_DIRS.items()
        }
        self.tri_of_edge = {}  # directed edge (u, v) -> triangle id to its left
        self.tris = {}         # tid -> (a, b, c) CCW
        self._next_tid = 0
        self._add_tri((-1, -2, -3))
        self._last_tid = 0

    def coord(self, v):
        return self.far[v] if v < 0 else self.pts[v]

    def _add_tri(self, tri):
        tid = self._next_tid
        self._next_tid += 1
        self.tris[tid] = tri
        a, b, c = tri
        self.tri_of_edge[(a, b)] = tid
        self.tri_of_edge[(b, c)] = tid
        self.tri_of_edge[(c, a)] = tid
        return tid

    def _del_tri(self, tid):
        a, b, c = self.tris.pop(tid)
        for e in ((a, b), (b, c), (c, a)):
            if self.tri_of_edge.get(e) == tid:
                del self.tri_of_edge[e]

    def _orient(self, u, v, w):
        (ux, uy), (vx, vy), (wx, wy) = self.coord(u), self.coord(v), self.coord(w)
        return _orient_sign(ux, uy, vx, vy, wx, wy)

    def _in_circle_sym(self, a, b, c, d):
        """Flip predicate with far vertices at infinity.

        One far vertex among (a,b,c) degenerates the circumcircle to the
        half-plane left of the remaining finite pair; two far vertices
        degenerate it to the half-plane, through the finite vertex, facing
        the sum of the two far directions; a far query point is never
        inside.
        """
        if d < 0:
            return False
        sups = [v for v in (a, b, c) if v < 0]
        if not sups:
            (ax, ay), (bx, by), (cx, cy) = self.coord(a), self.coord(b), self.coord(c)
            dx, dy = self.pts[d]
            return _in_circle(ax, ay, bx, by, cx, cy, dx, dy) > 0
        tri = (a, b, c)
        if len(sups) == 1:
            while tri[2] >= 0:
                tri = (tri[1], tri[2], tri[0])
            f1, f2 = tri[0], tri[1]
            return self._orient(f1, f2, d) > 0
        if len(sups) == 2:
            while tri[0] < 0:
                tri = (tri[1], tri[2], tri[0])
            fin, s1, s2 = tri
            ux = _FAR_DIRS[s1][0] + _FAR_DIRS[s2][0]
            uy = _FAR_DIRS[s1][1] + _FAR_DIRS[s2][1]
            fx, fy = self.pts[fin]
            dx, dy = self.pts[d]
            f = Fraction
            val = (f(dx) - f(fx)) * f(ux) + (f(dy) - f(fy)) * f(uy)
            return val > 0
        return False

    def _locate(self, p):
        """Visibility walk from the most recent triangle."""
        px, py = p
        tid = self._last_tid
        if tid not in self.tris:
            tid = next(iter(self.tris))
        steps = 0
        cap = 4 * len(self.tris) + 64
        while True:
            steps += 1
            if steps > cap:
                return self._locate_scan(p)
            tri = self.tris[tid]
            a, b, c = tri
            moved = False
            for (u, v) in ((a, b), (b, c), (c, a)):
                (ux, uy), (vx, vy) = self.coord(u), self.coord(v)
                if _orient_sign(ux, uy, vx, vy, px, py) < 0:
                    nxt = self.tri_of_edge.get((v, u))
                    if nxt is None:
                        return self._locate_scan(p)
                    tid = nxt
                    moved = True
                    break
            if not moved:
                return tid

    def _locate_scan(self, p):
        px, py = p
        for tid, (a, b, c) in self.tris.items():
            ok = True
            for (u, v) in ((a, b), (b, c), (c, a)):
                (ux, uy), (vx, vy) = self.coord(u), self.coord(v)
                if _orient_sign(ux, uy, vx, vy, px, py) < 0:
                    ok = False
                    break
            if ok:
                return tid
        raise DuplicatePoints(f"no triangle contains {p}")

    def insert(self, vid):
        p = self.pts[vid]
        tid = self._locate(p)
        a, b, c = self.tris[tid]
        for (u, v) in ((a, b), (b, c), (c, a)):
            (ux, uy), (vx, vy) = self.coord(u), self.coord(v)
            if _orient_sign(ux, uy, vx, vy, p[0], p[1]) == 0:
                raise DuplicatePoints(f"point {p} degenerate against edge {u}-{v}")
        self._del_tri(tid)
        t1 = self._add_tri((vid, a, b))
        t2 = self._add_tri((vid, b, c))
        t3 = self._add_tri((vid, c, a))
        self._last_tid = t1
        stack = [(a, b), (b, c), (c, a)]
        while stack:
            u, v = stack.pop()
            tid = self.tri_of_edge.get((u, v))
            if tid is None or self.tris[tid][0] != vid:
                continue
            other = self.tri_of_edge.get((v, u))
            if other is None:
                continue
            ot = self.tris[other]
            x = ot[0] if ot[1] == v else (ot[1] if ot[2] == v else ot[2])
            # apex of the neighbor triangle opposite edge (u, v)
            for cand in ot:
                if cand != u and cand != v:
                    x = cand
            if self._in_circle_sym(vid, u, v, x):
                self._del_tri(tid)
                self._del_tri(other)
                n1 = self._add_tri((vid, u, x))
                n2 = self._add_tri((vid, x, v))
                self._last_tid = n1
                stack.append((u, x))
                stack.append((x, v))

    def finite_edges(self):
        out = set()
        for (a, b, c) in self.tris.values():
            for (u, v) in ((a, b), (b, c), (c, a)):
                if u >= 0 and v >= 0:
                    out.add((u, v) if u < v else (v, u))
        return out


def _jitter(pts, seed, magnitude):
    rng = random.Random(f"jitter:{seed}")
    out = []
    for x, y in pts:
        out.append(
            (
                float(x) + rng.uniform(-magnitude, magnitude),
                float(y) + rng.uniform(-magnitude, magnitude),
            )
        )
    return out


def delaunay(points, seed=0):
    """Delaunay triangulation edge set of the (jittered) points.

    Returns (jittered points, set of index pairs).  At least 2 distinct
    points required; exact duplicates are rejected.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise DuplicatePoints("need at least 2 points")
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("duplicate input points")
    span = max(
        max(x for x, _ in pts) - min(x for x, _ in pts),
        max(y for _, y in pts) - min(y for _, y in pts),
        1.0,
    )
    for attempt in range(8):
        jp = _jitter(pts, (seed, attempt), span * 1e-9)
        if len(set(jp)) != len(jp):
            continue
        radius = max(max(abs(x), abs(y)) for x, y in jp) + span
        tri = _Delaunay(jp, far_scale=radius * 2.0 ** 24)
        order = sorted(range(len(jp)), key=lambda i: _morton(jp[i], radius))
        try:
            for vid in order:
                tri.insert(vid)
        except DuplicatePoints:
            continue
        return jp, tri.finite_edges()
    raise DuplicatePoints("could not jitter the input into general position")


def _morton(p, radius):
    gx = int((p[0] + radius) / (2 * radius) * 65535.0)
    gy = int((p[1] + radius) / (2 * radius) * 65535.0)
    out = 0
    for i in range(16):
        out |= ((gx >> i) & 1) << (2 * i) | ((gy >> i) & 1) << (2 * i + 1)
    return out


def delaunay_graph(points, seed=0, weight_rule="euclidean"):
    """EmbeddedGraph of the Delaunay triangulation of the given points."""
    jp, edges = delaunay(points, seed=seed)
    g = EmbeddedGraph(mode="planar")
    for vid, (x, y) in enumerate(jp):
        g.add_vertex(vid, x, y)
    wrng = random.Random(f"weights:{seed}")
    for eid, (u, v) in enumerate(sorted(edges)):
        g.add_edge(eid, u, v, _edge_weight(weight_rule, wrng, g, u, v))
    g.freeze()
    return g


def _edge_weight(rule, rng, g, u, v):
    if rule == "euclidean":
        return None  # defaults to embedded length
    if rule == "unit":
        return 1.0
    if rule == "uniform":
        return rng.uniform(0.5, 1.5)
    raise BadSpec(f"unknown weight rule {rule!r}")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


class GeneratorSpec:
    KINDS = ("delaunay", "grid", "cycles", "path_soup", "crossing_soup")

    def __init__(self, kind, n, seed=0, weight_rule="euclidean", **params):
        if kind not in self.KINDS:
            raise BadSpec(f"unknown generator kind {kind!r}")
        if n < 0:
            raise BadSpec("n must be nonnegative")
        self.kind = kind
        self.n = n
        self.seed = seed
        self.weight_rule = weight_rule
        self.params = params

    def __repr__(self):
        return (
            f"GeneratorSpec({self.kind!r}, n={self.n}, seed={self.seed}, "
            f"weight_rule={self.weight_rule!r}, params={self.params})"
        )


def generate(spec: GeneratorSpec) -> EmbeddedGraph:
    """Deterministic embedded instance for (kind, n, seed)."""
    fn = {
        "delaunay": _gen_delaunay,
        "grid": _gen_grid,
        "cycles": _gen_cycles,
        "path_soup": _gen_path_soup,
        "crossing_soup": _gen_crossing_soup,
    }[spec.kind]
    return fn(spec)


def _gen_delaunay(spec):
    rng = random.Random(f"delaunay:{spec.n}:{spec.seed}")
    side = math.sqrt(max(spec.n, 1))
    pts = [(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(spec.n)]
    return delaunay_graph(pts, seed=spec.seed, weight_rule=spec.weight_rule)


def _gen_grid(spec):
    side = math.isqrt(spec.n)
    if side * side != spec.n:
        raise BadSpec(f"grid size {spec.n} is not a perfect square")
    g = EmbeddedGraph(mode="planar")
    for i in range(side):
        for j in range(side):
            g.add_vertex(i * side + j, float(i), float(j))
    wrng = random.Random(f"weights:{spec.seed}")
    eid = 0
    for i in range(side):
        for j in range(side):
            u = i * side + j
            if i + 1 < side:
                g.add_edge(eid, u, u + side, _edge_weight(spec.weight_rule, wrng, g, u, u + side))
                eid += 1
            if j + 1 < side:
                g.add_edge(eid, u, u + 1, _edge_weight(spec.weight_rule, wrng, g, u, u + 1))
                eid += 1
    g.freeze()
    return g


def _gen_cycles(spec):
    parts = spec.params.get("parts", 1)
    if parts < 1 or spec.n < 3 * parts:
        raise BadSpec("cycles needs n >= 3 * parts")
    sizes = [spec.n // parts] * parts
    for i in range(spec.n - sum(sizes)):
        sizes[i] += 1
    g = EmbeddedGraph(mode="planar")
    vid = 0
    eid = 0
    wrng = random.Random(f"weights:{spec.seed}")
    for k, size in enumerate(sizes):
        radius = 1.0 + 2.0 * k
        base = vid
        for i in range(size):
            ang = 2 * math.pi * i / size
            g.add_vertex(vid, radius * math.cos(ang), radius * math.sin(ang))
            vid += 1
        for i in range(size):
            u = base + i
            v = base + (i + 1) % size
            g.add_edge(eid, u, v, _edge_weight(spec.weight_rule, wrng, g, u, v))
            eid += 1
    g.freeze()
    return g


def _gen_path_soup(spec):
    """Disjoint paths placed in separated cells; known matching/MIS values.

    params: verts_per_path (default 7).  Paths of one vertex give an
    edgeless graph.
    """
    k = spec.params.get("verts_per_path", 7)
    if k < 1 or spec.n % k != 0:
        raise BadSpec("path_soup needs n divisible by verts_per_path")
    paths = spec.n // k
    cells = math.ceil(math.sqrt(paths))
    rng = random.Random(f"soup:{spec.n}:{spec.seed}")
    g = EmbeddedGraph(mode="planar")
    vid = 0
    eid = 0
    wrng = random.Random(f"weights:{spec.seed}")
    for p in range(paths):
        cx = (p % cells) * 4.0 + rng.uniform(0.0, 0.5)
        cy = (p // cells) * 4.0 + rng.uniform(0.0, 0.5)
        first = vid
        x, y = cx, cy
        for i in range(k):
            g.add_vertex(vid, x, y)
            vid += 1
            x += rng.uniform(0.15, 0.3)
            y += rng.uniform(-0.25, 0.25)
        for i in range(k - 1):
            u = first + i
            g.add_edge(eid, u, u + 1, _edge_weight(spec.weight_rule, wrng, g, u, u + 1))
            eid += 1
    g.freeze()
    return g


def _gen_crossing_soup(spec):
    """Random segment soup in crossing mode: n vertices, n/2 straight edges
    whose embedding crossings are counted at generation time."""
    if spec.n % 2 != 0:
        raise BadSpec("crossing_soup needs even n")
    m = spec.n // 2
    rng = random.Random(f"soup:{spec.n}:{spec.seed}")
    side = math.sqrt(max(spec.n, 1))
    reach = spec.params.get("reach", 2.5)
    g = EmbeddedGraph(mode="crossing")
    wrng = random.Random(f"weights:{spec.seed}")
    for e in range(m):
        x, y = rng.uniform(0, side), rng.uniform(0, side)
        ang = rng.uniform(0, 2 * math.pi)
        ln = rng.uniform(0.5, reach)
        u, v = 2 * e, 2 * e + 1
        g.add_vertex(u, x, y)
        g.add_vertex(v, x + ln * math.cos(ang), y + ln * math.sin(ang))
        g.add_edge(e, u, v, _edge_weight(spec.weight_rule, wrng, g, u, v))
    g.freeze()
    return g


# ---------------------------------------------------------------------------
# Sequential oracles
# ---------------------------------------------------------------------------


class UnionFind:
    def __init__(self, items):
        self.parent = {v: v for v in items}
        self.rank = {v: 0 for v in items}
        self.count = len(self.parent)

    def find(self, v):
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, u, v):
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if self.rank[ru] < self.rank[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if self.rank[ru] == self.rank[rv]:
            self.rank[ru] += 1
        self.count -= 1
        return True


def component_count(vertices, edges):
    uf = UnionFind(vertices)
    for u, v in edges:
        uf.union(u, v)
    return uf.count


def component_labels(vertices, edges):
    uf = UnionFind(vertices)
    for u, v in edges:
        uf.union(u, v)
    return {v: uf.find(v) for v in vertices}


def kruskal(vertices, keyed_edges):
    """Minimum spanning forest under totally ordered edge keys.

    keyed_edges: iterable of (key, edge_id, u, v); returns set of edge ids.
    """
    uf = UnionFind(vertices)
    out = set()
    for key, eid, u, v in sorted(keyed_edges):
        if uf.union(u, v):
            out.add(eid)
    return out


def graph_mst(g: EmbeddedGraph):
    return kruskal(
        g.vertices(),
        [(g.weight_key(eid), eid, g.edges[eid][0], g.edges[eid][1]) for eid in g.edge_ids()],
    )


def bfs_two_coloring(vertices, adj):
    """Proper 2-coloring dict or None when an odd cycle exists."""
    color = {}
    for s in vertices:
        if s in color:
            continue
        color[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if v not in color:
                    color[v] = 1 - color[u]
                    dq.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def dijkstra(adj_w, src, targets=None):
    """Distances (and predecessor map) from src; adj_w: v -> [(u, w)]."""
    dist = {src: 0.0}
    pred = {src: None}
    want = set(targets) if targets is not None else None
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if want is not None:
            want.discard(u)
            if not want:
                break
        for v, w in adj_w[u]:
            nd = d + w
            if v not in dist or nd < dist[v] - 1e-15 or (
                abs(nd - dist[v]) <= 1e-15 and pred.get(v) is not None and u < pred[v]
            ):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def exact_diameter(vertices, adj_w):
    """Max over sources of max shortest-path distance (weighted)."""
    best = 0.0
    for s in vertices:
        dist, _ = dijkstra(adj_w, s)
        if len(dist) != len(vertices):
            return math.inf
        best = max(best, max(dist.values()))
    return best


def brute_force_emst(points):
    """Kruskal over the complete Euclidean graph; ids index the point list."""
    edges = []
    for i in range(len(points)):
        xi, yi = points[i]
        for j in range(i + 1, len(points)):
            d = math.hypot(points[j][0] - xi, points[j][1] - yi)
            edges.append(((d, (i, j)), (i, j), i, j))
    return kruskal(range(len(points)), edges)


def emst(points, seed=0, mode="oracle", cfg=None):
    """Euclidean MST via Delaunay + MST; returns (jittered pts, edge pairs).

    mode "oracle" runs sequential Kruskal on the triangulation; mode "mpc"
    runs the simulated-cluster MST on it.
    """
    g = delaunay_graph(points, seed=seed)
    if mode == "oracle":
        ids = graph_mst(g)
    elif mode == "mpc":
        from .mpc import cluster_for_graph, mpc_mst

        cluster = cluster_for_graph(g, cfg=cfg, seed=seed)
        ids = mpc_mst(cluster, g)
    else:
        raise BadSpec(f"unknown emst mode {mode!r}")
    pts = [g.coords[v] for v in g.vertices()]
    pairs = set()
    for eid in ids:
        u, v, _w, _pl = g.edges[eid]
        pairs.add((u, v) if u < v else (v, u))
    return pts, pairs
