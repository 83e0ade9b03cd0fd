"""Sector graphs, r-divisions of planar graphs, and the division oracle.

The sector graph connects cutting sectors that share a wall piece or a
segment piece, plus apex pairs that meet only at a point owned by one of
them.  An r/s-division of the sector graph then induces, through point
location, a hybrid r-pseudodivision of the underlying graph: a vertex's
regions depend only on its coordinates and cost no graph queries.
"""

from __future__ import annotations

import math
import random
from collections import Counter, deque

from .config import DEFAULT
from .cutting import Cutting, sample_cutting
from .errors import NotPlanar, OutOfBounds
from .geometry import orient
from .graph import EmbeddedGraph, QueryHandle

__all__ = [
    "SectorGraph",
    "RDivision",
    "DivisionOracle",
    "build_sector_graph",
    "planar_r_division",
    "build_division_oracle",
    "regions_of_vertex",
    "augment_to_division",
    "verify_pseudodivision",
]


class SectorGraph:
    def __init__(self, n, edges, provenance):
        self.n = n
        self.adj = {v: [] for v in range(n)}
        for u, v in edges:
            self.adj[u].append(v)
            self.adj[v].append(u)
        self.edge_count = len(edges)
        self.provenance = provenance

    def vertices(self):
        return range(self.n)

    def check_planar_bound(self):
        if self.n >= 3 and self.edge_count > 3 * self.n - 6:
            raise NotPlanar(
                f"sector graph breaks Euler bound: m={self.edge_count}, n={self.n}"
            )
        return True


def _piece_class(trap, w):
    """(reaches_below, reaches_above): does the trapezoid's boundary on the
    wall through w contain points just below / just above w."""
    wx, wy = w
    bot = trap.bottom
    top = trap.top
    ob = 1 if bot is None else orient(bot[0], bot[1], bot[2], bot[3], wx, wy)
    ot = -1 if top is None else orient(top[0], top[1], top[2], top[3], wx, wy)
    low = ob > 0 and ot <= 0
    high = ot < 0 and ob >= 0
    return low, high


def build_sector_graph(c: Cutting) -> SectorGraph:
    """Sector graph of a cutting: wall and segment adjacencies plus apex
    stars from each map point's owner."""
    m = c.map
    traps = m.trapezoids
    edges = set()

    def add(a, b):
        if a != b:
            edges.add((a, b) if a < b else (b, a))

    # Wall adjacency + apex stars, per map point.
    by_left = m._by_leftp
    by_right = m._by_rightp
    for w in m.points:
        left = by_right.get(w, ())
        right = by_left.get(w, ())
        lcls = [(t, *_piece_class(t, w)) for t in left]
        rcls = [(t, *_piece_class(t, w)) for t in right]
        for tl, llow, lhigh in lcls:
            for tr, rlow, rhigh in rcls:
                if (llow and rlow) or (lhigh and rhigh):
                    add(tl.id, tr.id)
        owner = m.owner_trap(w)
        for t in left:
            add(owner.id, t.id)
        for t in right:
            add(owner.id, t.id)

    # Segment adjacency: above/below strips with positive x-overlap.
    above = {}
    below = {}
    for t in traps:
        if t.bottom is not None:
            above.setdefault(t.bottom[:4], []).append(t)
        if t.top is not None:
            below.setdefault(t.top[:4], []).append(t)
    for coords, ups in above.items():
        downs = below.get(coords)
        if not downs:
            continue
        ups.sort(key=lambda t: t.leftp[0])
        downs.sort(key=lambda t: t.leftp[0])
        j = 0
        for tu in ups:
            while j < len(downs) and downs[j].rightp[0] <= tu.leftp[0]:
                j += 1
            k = j
            while k < len(downs) and downs[k].leftp[0] < tu.rightp[0]:
                add(tu.id, downs[k].id)
                k += 1

    sg = SectorGraph(len(traps), edges, {t.id: t for t in traps})
    sg.check_planar_bound()
    return sg


# ---------------------------------------------------------------------------
# r-divisions of planar graphs
# ---------------------------------------------------------------------------


class RDivision:
    """Cover of the vertex set by regions; vertices in several regions form
    the boundary."""

    def __init__(self, regions):
        self.regions = [frozenset(r) for r in regions]
        self._vertex_regions = None

    def vertex_regions(self):
        if self._vertex_regions is None:
            out = {}
            for rid, reg in enumerate(self.regions):
                for v in reg:
                    out.setdefault(v, []).append(rid)
            self._vertex_regions = {v: frozenset(r) for v, r in out.items()}
        return self._vertex_regions

    def boundary_of(self, rid):
        vr = self.vertex_regions()
        return {v for v in self.regions[rid] if len(vr[v]) > 1}

    def stats(self):
        vr = self.vertex_regions()
        sizes = [len(r) for r in self.regions]
        bounds = [len(self.boundary_of(i)) for i in range(len(self.regions))]
        return {
            "region_count": len(self.regions),
            "max_region_size": max(sizes, default=0),
            "max_region_boundary": max(bounds, default=0),
            "covered_vertices": len(vr),
        }


def _bfs_levels(vertices, adj, root):
    level = {root: 0}
    order = [root]
    dq = deque([root])
    while dq:
        u = dq.popleft()
        lu = level[u]
        for v in adj[u]:
            if v not in level:
                level[v] = lu + 1
                order.append(v)
                dq.append(v)
    return level, order


def _components(vertices, adj, removed=frozenset()):
    seen = set(removed)
    comps = []
    for s in vertices:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    dq.append(v)
        comps.append(comp)
    return comps


def _fundamental_cycle(parent, depth, u, v):
    cyc = set()
    while u != v:
        if depth[u] >= depth[v]:
            cyc.add(u)
            u = parent[u]
        else:
            cyc.add(v)
            v = parent[v]
    cyc.add(u)
    return cyc


def _find_separator(vertices, adj, rng, weights, balance, cycle_samples):
    """Balanced vertex separator of a connected induced subgraph.

    Tries BFS-level cuts first (from a pseudo-peripheral root), then
    spanning-tree fundamental cycles scored by the actual component split,
    and picks the best candidate: feasible balance first, then cut weight.
    """
    n = len(vertices)
    total = sum(weights[v] for v in vertices) if weights else n
    wt = (lambda v: weights[v]) if weights else (lambda v: 1)

    root = min(vertices)
    level, _ = _bfs_levels(vertices, adj, root)
    far = max(level.items(), key=lambda kv: (kv[1], -kv[0]))[0] if level else root
    level, order = _bfs_levels(vertices, adj, far)

    by_level = {}
    for v, l in level.items():
        by_level.setdefault(l, []).append(v)
    depth_max = max(by_level)
    prefix = [0] * (depth_max + 2)
    lw = [0] * (depth_max + 1)
    for l in range(depth_max + 1):
        lw[l] = sum(wt(v) for v in by_level[l])
        prefix[l + 1] = prefix[l] + lw[l]

    candidates = []  # (feasible, cutweight, maxpart, tag, sep_set)
    for l in range(depth_max + 1):
        below = prefix[l]
        above = total - prefix[l + 1]
        maxpart = max(below, above)
        cutw = lw[l]
        candidates.append(
            (maxpart > balance * total, cutw, maxpart, ("level", l), None)
        )
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    best = candidates[0]
    if not best[0]:
        return set(by_level[best[3][1]])

    # Level cuts cannot balance: fall back to fundamental cycles of the BFS
    # tree, minimizing the larger side of the actual split.
    parent = {far: far}
    for v in order:
        for u in adj[v]:
            if u not in parent and level.get(u, -1) == level[v] + 1:
                parent[u] = v
    # ensure full parent map
    for v in vertices:
        if v not in parent:
            parent[v] = v
    tree_edges = {(min(u, parent[u]), max(u, parent[u])) for u in vertices if parent[u] != u}
    non_tree = []
    for u in vertices:
        for v in adj[u]:
            if u < v and (u, v) not in tree_edges:
                non_tree.append((u, v))
    if len(non_tree) > cycle_samples:
        non_tree = rng.sample(sorted(non_tree), cycle_samples)
    best_cyc = None
    for (u, v) in non_tree:
        cyc = _fundamental_cycle(parent, level, u, v)
        comps = _components(vertices, adj, removed=cyc)
        maxpart = max((sum(wt(x) for x in comp) for comp in comps), default=0)
        cutw = sum(wt(x) for x in cyc)
        key = (maxpart > balance * total, maxpart, cutw)
        if best_cyc is None or key < best_cyc[0]:
            best_cyc = (key, cyc)
    if best_cyc is not None and (not best_cyc[0][0] or best[0]):
        feasible_cyc = not best_cyc[0][0]
        if feasible_cyc:
            return best_cyc[1]
    # Neither balances: use the level cut with the smallest larger side.
    candidates.sort(key=lambda c: (c[2], c[1]))
    fallback = set(by_level[candidates[0][3][1]])
    if best_cyc is not None and best_cyc[0][1] < candidates[0][2]:
        return best_cyc[1]
    return fallback


def planar_r_division(adj, r, seed=0, weights=None, config=None) -> RDivision:
    """r-division of a planar graph given as an adjacency mapping.

    Recursive balanced separation (BFS levels with a fundamental-cycle
    fallback), Frederickson-style: split regions of more than r vertices,
    then re-split regions with oversized boundary, then merge undersized
    neighbors to control the region count.
    """
    cfg = (config or DEFAULT).division
    if r < 1:
        raise ValueError("r must be >= 1")
    vertices = sorted(adj)
    n = len(vertices)
    if n >= 3:
        m = sum(len(adj[v]) for v in vertices) // 2
        if m > 3 * n - 6:
            raise NotPlanar(f"m={m} exceeds 3n-6={3 * n - 6}")
    rng = random.Random(f"rdiv:{seed}")
    regions = []

    def split(part):
        if len(part) <= r:
            regions.append(frozenset(part))
            return
        pset = set(part)
        local_adj = {v: [u for u in adj[v] if u in pset] for v in part}
        sep = _find_separator(
            pset, local_adj, rng, None, cfg.balance, cfg.cycle_samples
        )
        comps = _components(pset, local_adj, removed=sep)
        pieces = []
        for comp in comps:
            attach = {u for v in comp for u in local_adj[v] if u in sep}
            pieces.append(set(comp) | attach)
        # separator vertices adjacent only to the separator keep their own
        # region so the cover stays complete
        used = set().union(*pieces) if pieces else set()
        rest = sep - used
        if rest:
            pieces.append(set(rest))
        if not pieces or any(len(p) >= len(part) for p in pieces):
            # degenerate split: halve deterministically
            ordered = sorted(part)
            half = len(ordered) // 2
            pieces = [set(ordered[:half]), set(ordered[half:])]
        for p in pieces:
            split(sorted(p))

    for comp in _components(set(vertices), adj):
        split(sorted(comp))

    div = RDivision(regions)
    div = _repair_boundaries(div, adj, r, rng, cfg)
    div = _merge_regions(div, adj, r, cfg)
    return div


def _repair_boundaries(div, adj, r, rng, cfg):
    """Frederickson phase 2: re-split regions whose boundary exceeds
    c_div * sqrt(r), balancing on boundary weight."""
    limit = cfg.c_div * math.sqrt(r)
    out = list(div.regions)
    for _ in range(3):
        vr = RDivision(out).vertex_regions()
        work = []
        keep = []
        for reg in out:
            bnd = sum(1 for v in reg if len(vr[v]) > 1)
            (work if bnd > limit and len(reg) > 2 else keep).append(reg)
        if not work:
            break
        for reg in work:
            pset = set(reg)
            local_adj = {v: [u for u in adj[v] if u in pset] for v in reg}
            wts = {v: (1 if len(vr[v]) > 1 else 0) for v in reg}
            for comp in _components(pset, local_adj):
                cw = sum(wts[v] for v in comp)
                if cw <= limit or len(comp) <= 2:
                    keep.append(frozenset(comp))
                    continue
                cadj = {v: [u for u in local_adj[v] if u in set(comp)] for v in comp}
                sep = _find_separator(
                    set(comp), cadj, rng, wts, cfg.balance, cfg.cycle_samples
                )
                comps2 = _components(set(comp), cadj, removed=sep)
                if not comps2:
                    keep.append(frozenset(comp))
                    continue
                for c2 in comps2:
                    attach = {u for v in c2 for u in cadj[v] if u in sep}
                    keep.append(frozenset(set(c2) | attach))
                covered = set().union(*(set(k) for k in keep[-len(comps2):]))
                rest = sep - covered
                if rest:
                    keep.append(frozenset(rest))
        out = keep
    return RDivision(out)


def _merge_regions(div, adj, r, cfg):
    """Greedy merge of adjacent small regions under the size and boundary
    caps, shrinking the region count toward c_div * n / r."""
    regions = [set(r_) for r_ in div.regions]
    n = len(set().union(*regions)) if regions else 0
    target = max(1, math.ceil(cfg.c_div * n / max(r, 1)))
    limit = cfg.c_div * math.sqrt(r)
    changed = True
    while changed and len(regions) > 1:
        changed = False
        vr = {}
        for rid, reg in enumerate(regions):
            for v in reg:
                vr.setdefault(v, set()).add(rid)
        # adjacency between regions via shared vertices or edges
        neigh = {}
        for rid, reg in enumerate(regions):
            ns = set()
            for v in reg:
                ns.update(vr[v])
                for u in adj[v]:
                    ns.update(vr.get(u, ()))
            ns.discard(rid)
            neigh[rid] = ns
        order = sorted(range(len(regions)), key=lambda i: (len(regions[i]), i))
        merged = [False] * len(regions)
        new_regions = []
        for rid in order:
            if merged[rid]:
                continue
            best = None
            for other in sorted(neigh.get(rid, ())):
                if merged[other] or other == rid:
                    continue
                union = regions[rid] | regions[other]
                if len(union) > r:
                    continue
                bnd = sum(
                    1
                    for v in union
                    if any(x not in (rid, other) for x in vr[v])
                )
                if bnd > limit:
                    continue
                if best is None or len(regions[other]) < len(regions[best]):
                    best = other
            if best is not None and len(regions) - sum(merged) > target:
                merged[rid] = merged[best] = True
                new_regions.append(regions[rid] | regions[best])
                changed = True
            else:
                merged[rid] = True
                new_regions.append(regions[rid])
        regions = new_regions
        # drop regions fully contained in others
        regions.sort(key=len, reverse=True)
        pruned = []
        for reg in regions:
            if not any(reg <= big for big in pruned):
                pruned.append(reg)
        regions = pruned
    return RDivision(regions)


# ---------------------------------------------------------------------------
# Division oracle
# ---------------------------------------------------------------------------


class DivisionOracle:
    """Cutting + r/s-division of its sector graph + point locator.

    regions_of_vertex answers from coordinates alone: zero graph queries,
    deterministic, and identical for vertices in the same sector.
    """

    def __init__(self, cutting, sector_graph, sector_division, r, s, delta):
        self.cutting = cutting
        self.sector_graph = sector_graph
        self.sector_division = sector_division
        self.r = r
        self.s = s
        self.delta = delta
        vr = sector_division.vertex_regions()
        empty = frozenset()
        self.sector_regions = [
            vr.get(sid, empty) for sid in range(sector_graph.n)
        ]

    def regions_of_point(self, p):
        sid = self.cutting.sector_of_point(p)
        return self.sector_regions[sid]

    def regions_of_vertex(self, vid):
        return self.regions_of_point(self.cutting.graph.coords[vid])

    def region_count(self):
        return len(self.sector_division.regions)

    def boundary_sector_ids(self):
        return {
            sid
            for sid, regs in enumerate(self.sector_regions)
            if len(regs) > 1
        }


def build_division_oracle(
    h: QueryHandle, r, s, delta, seed=None, mode="planar", config=None
) -> DivisionOracle:
    """Compose Algorithm-1 sampling, the sector graph, and an r/s-division.

    Total query cost is exactly the cutting's sample cost.
    """
    if not (1 <= s <= r):
        raise ValueError(f"need 1 <= s <= r, got s={s} r={r}")
    cfg = config or DEFAULT
    c = sample_cutting(h, s, delta, seed=seed, mode=mode, config=cfg)
    sg = build_sector_graph(c)
    r_prime = max(2, math.ceil(r / s))
    sdiv = planar_r_division(sg.adj, r_prime, seed=c.seed, config=cfg)
    return DivisionOracle(c, sg, sdiv, r, s, delta)


def regions_of_vertex(oracle: DivisionOracle, p):
    """Region set for a vertex coordinate; OutOfBounds outside the bbox."""
    return oracle.regions_of_point(p)


def oracle_from_samples(
    edge_samples,
    vertex_samples,
    r,
    s,
    delta,
    bbox_radius,
    seed,
    config=None,
    target_regions=None,
):
    """Division oracle from an explicit sample pool (the MPC path).

    edge_samples: (source, ax, ay, bx, by) unrotated endpoint coordinates;
    vertex_samples: (x, y).  Rotation, map construction, sector graph, and
    the r/s-division run exactly as in the query-driven path.  When
    target_regions is given the sector division aims for that many regions
    (the cluster layout stores regions whole, so fewer, coarser regions keep
    boundaries small)."""
    import random as _random
    from .cutting import Cutting, _draw_theta
    from .errors import DegenerateCrossing, DegenerateInput
    from .geometry import Segment, build_trapezoid_map

    cfg = config or DEFAULT
    last = None
    for attempt in range(cfg.cutting.rotation_retries):
        theta = _draw_theta(seed, attempt)
        cos_t, sin_t = math.cos(theta), math.sin(theta)

        def rot(x, y):
            return (x * cos_t - y * sin_t, x * sin_t + y * cos_t)

        try:
            segs = []
            endpoints = set()
            for src, ax, ay, bx, by in sorted(edge_samples, key=lambda e: repr(e[0])):
                a = rot(ax, ay)
                b = rot(bx, by)
                endpoints.add(a)
                endpoints.add(b)
                segs.append(Segment.make(a, b, src))
            iso = [rot(x, y) for x, y in sorted(set(vertex_samples))]
            radius = bbox_radius * cfg.cutting.bbox_margin
            trap_map = build_trapezoid_map(
                segs, iso, (-radius, -radius, radius, radius), seed=seed
            )
            cut = Cutting(
                None,
                theta,
                trap_map,
                s,
                delta,
                seed,
                "planar",
                {
                    "edges_sampled": len(edge_samples),
                    "vertices_sampled": len(vertex_samples),
                    "distinct_edges": len(segs),
                    "distinct_vertices": len(iso),
                    "segments_in_map": len(segs),
                    "crossings_in_sample": 0,
                },
            )
            sg = build_sector_graph(cut)
            if target_regions is not None:
                r_prime = max(2, math.ceil(sg.n / max(2, target_regions)))
            else:
                r_prime = max(2, math.ceil(r / max(s, 1)))
            sdiv = planar_r_division(sg.adj, r_prime, seed=seed, config=cfg)
            return DivisionOracle(cut, sg, sdiv, r, s, delta)
        except (DegenerateInput, DegenerateCrossing) as exc:
            last = exc
    raise DegenerateInput("no usable rotation for the sampled pool") from last


def augment_to_division(g: EmbeddedGraph, oracle: DivisionOracle) -> RDivision:
    """Linear-time augmentation: cover every edge by adding each endpoint of
    an uncovered edge to the other endpoint's first region."""
    base = {v: oracle.regions_of_vertex(v) for v in g.vertices()}
    extra = {}
    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        ru, rv = base[u], base[v]
        if ru & rv:
            continue
        extra.setdefault(u, set()).add(min(rv))
        extra.setdefault(v, set()).add(min(ru))
    regions = {}
    for v, rs in base.items():
        for rid in rs | extra.get(v, set()):
            regions.setdefault(rid, set()).add(v)
    return RDivision([regions[k] for k in sorted(regions)])


def verify_pseudodivision(g: EmbeddedGraph, oracle: DivisionOracle, config=None):
    """Full-scan check of the hybrid pseudodivision bounds.

    Boundary of a region counts its vertices that have a neighbor outside
    the region plus endpoints (in the region) of edges crossing boundary
    sectors.
    """
    cfg = (config or DEFAULT).division
    c = oracle.cutting
    trap_map = c.map
    n = max(g.n, 2)

    owner = {}
    vregs = {}
    region_sizes = Counter()
    for vid in g.vertices():
        t = trap_map.owner_trap(c.rotate(g.coords[vid]))
        owner[vid] = t
        regs = oracle.sector_regions[t.id]
        vregs[vid] = regs
        for rid in regs:
            region_sizes[rid] += 1

    boundary_sectors = oracle.boundary_sector_ids()
    boundary_vertices = {rid: set() for rid in region_sizes}

    def mark(vid):
        for rid in vregs[vid]:
            boundary_vertices.setdefault(rid, set()).add(vid)

    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        ru, rv = vregs[u], vregs[v]
        for rid in ru - rv:
            boundary_vertices.setdefault(rid, set()).add(u)
        for rid in rv - ru:
            boundary_vertices.setdefault(rid, set()).add(v)
        tu, tv = owner[u], owner[v]
        pieces = c.edge_pieces(eid)
        if len(pieces) == 1 and tu is tv:
            crossed_boundary = tu.id in boundary_sectors
        else:
            crossed_boundary = False
            for seg in pieces:
                left = (seg.ax, seg.ay)
                start = None
                if not trap_map.is_map_point(left):
                    if left == c.rotate(g.coords[u]):
                        start = tu
                    elif left == c.rotate(g.coords[v]):
                        start = tv
                for sid in trap_map.sectors_touching_segment(seg, start=start):
                    if sid in boundary_sectors:
                        crossed_boundary = True
                        break
                if crossed_boundary:
                    break
        if crossed_boundary:
            mark(u)
            mark(v)

    max_size = max(region_sizes.values(), default=0)
    max_bnd = max((len(b) for b in boundary_vertices.values()), default=0)
    count = sum(1 for v in region_sizes.values() if v > 0)
    size_ok = max_size <= oracle.r
    bnd_limit = cfg.c_bnd * math.sqrt(oracle.s * oracle.r)
    cnt_limit = cfg.c_reg * n * math.log2(n) / oracle.r
    report = {
        "max_region_size": max_size,
        "max_region_boundary": max_bnd,
        "region_count": count,
        "boundary_total": len(
            set().union(*boundary_vertices.values()) if boundary_vertices else set()
        ),
        "size_limit": oracle.r,
        "boundary_limit": bnd_limit,
        "count_limit": cnt_limit,
        "pass": size_ok and max_bnd <= bnd_limit and count <= cnt_limit,
    }
    return report
