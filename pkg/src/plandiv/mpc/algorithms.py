"""Division-based algorithms on the simulated cluster.

Shared shape: edges and vertex records live on a machine range; a cluster
r-pseudodivision regroups them into per-region consecutive subranges;
algorithms recurse on regions (round counters advance in parallel across
the disjoint groups) and fall back to a sequential base case once a
subgraph fits a constant number of machine loads on one machine.

Vertex records carry a flag bit holding the current call's marked set
(user marks at the top; boundary-or-inherited marks below).  The division
also snapshots the flagged ids of its group, so gluing steps know exactly
the marked set the children were compressed against.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

from ..config import DEFAULT
from ..division import oracle_from_samples
from ..errors import (
    Disconnected,
    PairNotMarked,
    RestartLimit,
    SpaceExceeded,
    Unreachable,
)
from ..harness import UnionFind, dijkstra, kruskal
from .cluster import Cluster, ClusterConfig, word_count
from .compress import compress_bipartite, compress_connectivity, mst_compress

__all__ = [
    "cluster_for_graph",
    "graph_words",
    "mpc_r_division",
    "mpc_connected_components",
    "mpc_bipartition",
    "mpc_mst",
    "mpc_spanner_shortcuts",
    "mpc_st_path",
    "mpc_diameter",
    "DivisionLayout",
    "GraphLayout",
]

_EDGE_WORDS = 8   # (eid, u, v, w, ux, uy, vx, vy)
_VERT_WORDS = 4   # (vid, x, y, flag)


def _stable_mod(key, span):
    return zlib.crc32(repr(key).encode()) % span if span > 1 else 0


def _apportion(total, weights):
    """Largest-remainder split of `total` draws proportional to weights."""
    wsum = sum(weights)
    if total <= 0 or wsum == 0:
        return [0] * len(weights)
    quotas = [total * w / wsum for w in weights]
    base = [int(q) for q in quotas]
    rem = total - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:rem]:
        base[i] += 1
    return base


@dataclass
class GraphLayout:
    lo: int
    hi: int
    n_est: int
    m_est: int
    tag: str

    @property
    def words(self):
        return _EDGE_WORDS * self.m_est + _VERT_WORDS * self.n_est


@dataclass
class RegionInfo:
    rid: int
    lo: int
    hi: int
    n_est: int
    m_est: int


@dataclass
class DivisionLayout:
    regions: list
    marked: frozenset = frozenset()
    restarts: int = 0


def graph_words(g):
    return _EDGE_WORDS * g.m + _VERT_WORDS * g.n


def cluster_for_graph(g, cfg=None, seed=0, space_exp=0.7, slack=None, config=None):
    """Cluster sized for the graph, with shards loaded; returns the cluster
    and its root layout.

    slack overrides the space-tolerance constant: correctness runs may use a
    generous slack, while the space-accounting experiments keep the frozen
    default."""
    mcfg = (config or DEFAULT).mpc
    if cfg is None:
        S = max(32, math.ceil(max(g.n, 2) ** space_exp))
        eff_slack = mcfg.slack if slack is None else slack
        fill = max(8.0, eff_slack * S / 3.0)
        # provision ~2x for boundary replication across recursion levels
        M = max(1, math.ceil(2.0 * graph_words(g) / fill) + 1)
        cfg = ClusterConfig(S=S, M=M, slack=eff_slack, seed=seed)
    cluster = Cluster(cfg)
    fill_words = cfg.budget / 3.0
    edge_recs = []
    for eid in g.edge_ids():
        u, v, w, _pl = g.edges[eid]
        ux, uy = g.coords[u]
        vx, vy = g.coords[v]
        edge_recs.append((eid, u, v, w, ux, uy, vx, vy))
    vert_recs = [(vid, *g.coords[vid], 0) for vid in g.vertices()]
    ei = vi = 0
    mid = 0
    while ei < len(edge_recs) or vi < len(vert_recs):
        if mid >= cfg.M:
            raise SpaceExceeded(cfg.M - 1, 0, graph_words(g), cfg.M * cfg.budget)
        m = cluster.machines[mid]
        room = fill_words
        take_e = min(len(edge_recs) - ei, max(0, int(room * 0.75 / _EDGE_WORDS)))
        room -= take_e * _EDGE_WORDS
        take_v = min(len(vert_recs) - vi, max(0, int(room / _VERT_WORDS)))
        room -= take_v * _VERT_WORDS
        extra_e = min(len(edge_recs) - ei - take_e, max(0, int(room / _EDGE_WORDS)))
        m.put("edges", edge_recs[ei : ei + take_e + extra_e])
        m.put("verts", vert_recs[vi : vi + take_v])
        ei += take_e + extra_e
        vi += take_v
        cluster.check_store(mid)
        mid += 1
    for k in range(mid, cfg.M):
        cluster.machines[k].put("edges", [])
        cluster.machines[k].put("verts", [])
    layout = GraphLayout(0, cfg.M, g.n, g.m, "root")
    cluster._graph_radius = max(
        [math.hypot(x, y) for x, y in g.coords.values()] or [1.0]
    )
    return cluster, layout


def _flag_marked(cluster, layout, marked):
    """Write the user's marked set into the vertex-record flags."""
    marked = set(marked)
    for mid in range(layout.lo, layout.hi):
        m = cluster.machines[mid]
        verts = m.get("verts")
        if verts:
            m.put(
                "verts",
                [(v, x, y, 1 if v in marked else f) for (v, x, y, f) in verts],
            )


# ---------------------------------------------------------------------------
# Cluster r-pseudodivision (the Algorithm-4 analogue)
# ---------------------------------------------------------------------------


class _OraclePayload:
    """Division oracle on the wire: charged for its defining sample
    coordinates plus the sector-to-region table."""

    def __init__(self, oracle):
        self.oracle = oracle
        st = oracle.cutting.sample_stats
        self._words = (
            5 * st["segments_in_map"]
            + 2 * st["distinct_vertices"]
            + sum(len(r) for r in oracle.sector_regions)
            + 4
        )

    def mpc_words(self):
        return self._words


def mpc_r_division(cluster, layout, r, tag, config=None):
    """Division of the layout's subgraph: samples to the group root, oracle
    broadcast, region statistics by converge-cast, verification, and an
    edge/vertex shuffle onto per-region consecutive machine subranges.
    Restarts with a fresh rotation when verification fails."""
    cfg = config or DEFAULT
    mcfg = cfg.mpc
    for restart in range(mcfg.restart_limit):
        result = _try_division(cluster, layout, r, tag, restart, cfg)
        if result is not None:
            result.restarts = restart
            cluster.restarts += restart
            return result
    raise RestartLimit(f"division of {tag} failed {mcfg.restart_limit} times")


def _try_division(cluster, layout, r, tag, restart, cfg):
    mcfg = cfg.mpc
    ccfg = cluster.cfg
    S = ccfg.S
    n = max(layout.n_est, 2)
    log_n = max(1.0, math.log2(n))
    s = max(1, math.ceil(n * log_n / S))
    group = range(layout.lo, layout.hi)

    # The oracle's wire words are roughly 5E + 2V for the sample plus ~2.6
    # sectors per inserted item for the sector-region table; sizing the pool
    # against the budget left after resident stores keeps the built oracle
    # and its forwarding inside every machine.
    resident = max(cluster.machines[mid].words for mid in group)
    headroom = max(32.0, ccfg.budget - resident - 0.05 * ccfg.budget)
    pool_words = min(mcfg.sample_word_frac * ccfg.budget, headroom / 2.2)
    demand = math.ceil(mcfg.theta_mult * n * log_n / s)
    edge_pool = max(8, min(demand, int(pool_words / 9.2)))
    vert_pool = max(4, min(math.ceil(demand / 3.0), math.ceil(edge_pool / 3.0)))

    e_counts = [len(cluster.machines[mid].get("edges") or ()) for mid in group]
    v_counts = [len(cluster.machines[mid].get("verts") or ()) for mid in group]
    e_alloc = _apportion(edge_pool, e_counts)
    v_alloc = _apportion(vert_pool, v_counts)
    sends = {}
    for idx, mid in enumerate(group):
        m = cluster.machines[mid]
        rng = cluster.rng(mid, f"{tag}|sample|{restart}")
        edges = m.get("edges") or []
        verts = m.get("verts") or []
        es = [edges[rng.randrange(len(edges))] for _ in range(e_alloc[idx])]
        vs = [verts[rng.randrange(len(verts))] for _ in range(v_alloc[idx])]
        payload = (
            [(e[0], e[4], e[5], e[6], e[7]) for e in es],
            [(v[1], v[2]) for v in vs],
        )
        sends[mid] = [(layout.lo, payload)]
    cluster.exchange(sends, phase=f"{tag}:sample")

    root = cluster.machines[layout.lo]
    seg_samples = {}
    vert_samples = set()
    for _src, (es, vs) in cluster.take_inbox(layout.lo):
        for rec in es:
            seg_samples[rec[0]] = rec
        vert_samples.update(vs)
    target_regions = max(2, min(12, math.ceil(layout.words / (5.0 * S))))
    try:
        oracle = oracle_from_samples(
            sorted(seg_samples.values(), key=lambda e: repr(e[0])),
            sorted(vert_samples),
            r,
            s,
            1.0 / n,
            cluster._graph_radius,
            seed=f"{ccfg.seed}|{tag}|{restart}",
            config=cfg,
            target_regions=target_regions,
        )
    except Exception:
        return None
    payload = _OraclePayload(oracle)
    cluster.group_broadcast(
        layout.lo, layout.hi, payload, phase=f"{tag}:oracle",
        words=payload.mpc_words(),
    )

    def region_of_edge(rec):
        du = oracle.regions_of_point((rec[4], rec[5]))
        dv = oracle.regions_of_point((rec[6], rec[7]))
        both = du & dv
        return (min(both) if both else min(du)), du, dv

    # Region statistics in two flat rounds: per-machine counts sharded by
    # region id, then aggregated triples forwarded to the group root.
    size_grp = layout.hi - layout.lo
    sends = {}
    for mid in group:
        m = cluster.machines[mid]
        vc = {}
        bc = {}
        ec = {}
        for rec in m.get("verts") or ():
            regs = oracle.regions_of_point((rec[1], rec[2]))
            for rid in regs:
                vc[rid] = vc.get(rid, 0) + 1
                if len(regs) > 1:
                    bc[rid] = bc.get(rid, 0) + 1
        for rec in m.get("edges") or ():
            rid, _du, _dv = region_of_edge(rec)
            ec[rid] = ec.get(rid, 0) + 1
        by_dest = {}
        for rid in set(vc) | set(ec):
            dest = layout.lo + (rid % size_grp)
            by_dest.setdefault(dest, []).append(
                (rid, vc.get(rid, 0), bc.get(rid, 0), ec.get(rid, 0))
            )
        if by_dest:
            sends[mid] = sorted(by_dest.items())
    cluster.exchange(sends, phase=f"{tag}:stats1")
    sends = {}
    for mid in group:
        agg = {}
        for _src, rows in cluster.take_inbox(mid):
            for rid, nv, nb, ne in rows:
                cur = agg.get(rid, (0, 0, 0))
                agg[rid] = (cur[0] + nv, cur[1] + nb, cur[2] + ne)
        if agg:
            sends[mid] = [
                (layout.lo, [(rid, *vals) for rid, vals in sorted(agg.items())])
            ]
    cluster.exchange(sends, phase=f"{tag}:stats2")
    totals = {"v": {}, "b": {}, "e": {}}
    for _src, rows in cluster.take_inbox(layout.lo):
        for rid, nv, nb, ne in rows:
            totals["v"][rid] = totals["v"].get(rid, 0) + nv
            totals["b"][rid] = totals["b"].get(rid, 0) + nb
            totals["e"][rid] = totals["e"].get(rid, 0) + ne

    def clear_oracle():
        for mid in group:
            cluster.machines[mid].pop(f"__bcast:{tag}:oracle")

    sizes = totals["v"]
    why = None
    if not sizes:
        why = "empty"
    elif max(sizes.values()) > mcfg.verify_size_slack * r:
        why = f"size {max(sizes.values())} > {mcfg.verify_size_slack * r}"
    else:
        blim = mcfg.verify_boundary_c * math.sqrt(r * n * log_n / S) + 4
        if max(totals["b"].values(), default=0) > blim:
            why = f"boundary {max(totals['b'].values())} > {blim:.0f}"
    if why is not None:
        cluster.last_verify_failure = (tag, restart, why)
        clear_oracle()
        return None

    # Bin-pack oracle regions into machine subranges: each bin is one stored
    # region (consecutive machines, single region per machine).  The oracle
    # keeps answering with its finer region ids, which only over-marks
    # boundaries across members of one bin.
    fill = ccfg.budget / 2.5
    group_size = layout.hi - layout.lo
    # Pack oracle regions into few bins along a space-filling order of
    # their centroids: neighboring regions land in the same bin, so most
    # of their shared boundary becomes bin-interior.
    prov = oracle.sector_graph.provenance
    cent = {}
    for rid, sectors in enumerate(oracle.sector_division.regions):
        xs = ys = 0.0
        for sid in sectors:
            t = prov[sid]
            xs += (t.leftp[0] + t.rightp[0]) / 2.0
            ys += (t.leftp[1] + t.rightp[1]) / 2.0
        k = max(1, len(sectors))
        cent[rid] = (xs / k, ys / k)
    span = max(cluster._graph_radius, 1.0)

    def morton(rid):
        cx, cy = cent.get(rid, (0.0, 0.0))
        gx = max(0, min(1023, int((cx + span) / (2 * span) * 1023)))
        gy = max(0, min(1023, int((cy + span) / (2 * span) * 1023)))
        out = 0
        for i in range(10):
            out |= ((gx >> i) & 1) << (2 * i) | ((gy >> i) & 1) << (2 * i + 1)
        return out

    rids = sorted(sizes, key=lambda rid: (morton(rid), rid))
    words_of = {
        rid: _EDGE_WORDS * totals["e"].get(rid, 0) + _VERT_WORDS * sizes[rid]
        for rid in rids
    }
    total_words = sum(words_of.values()) or 1
    bins_target = max(2, min(12, math.ceil(total_words / (5.0 * S)), group_size))
    cap = max(1, math.ceil(total_words / bins_target))
    bins = []
    for _ in range(12):
        bins = []
        cur, cur_w = [], 0
        for rid in rids:
            if cur and cur_w + words_of[rid] > cap:
                bins.append((cur, cur_w))
                cur, cur_w = [], 0
            cur.append(rid)
            cur_w += words_of[rid]
        if cur:
            bins.append((cur, cur_w))
        if len(bins) <= group_size:
            break
        cap = math.ceil(cap * 1.5)
    if len(bins) == 1 and len(rids) > 1 and group_size >= 2:
        # avoid degenerate single-region layouts when machines allow a split
        half = math.ceil(total_words / 2)
        bins = []
        cur, cur_w = [], 0
        for rid in rids:
            if cur and cur_w + words_of[rid] > half:
                bins.append((cur, cur_w))
                cur, cur_w = [], 0
            cur.append(rid)
            cur_w += words_of[rid]
        if cur:
            bins.append((cur, cur_w))
    while len(bins) > max(1, group_size):
        (ma, wa), (mb, wb) = bins[-2], bins[-1]
        bins[-2:] = [(ma + mb, wa + wb)]
    # the stored region count is the bin count (the paper's count bound
    # guards the per-machine region table)
    if len(bins) > mcfg.verify_count_c * n * log_n / r + 4:
        cluster.last_verify_failure = (tag, restart, f"bins {len(bins)}")
        clear_oracle()
        return None
    # machines per bin: one guaranteed, the rest apportioned by words, then
    # rebalanced so no bin is left with more than ~0.6 budget per machine
    extra = _apportion(group_size - len(bins), [w for _m, w in bins])
    k_of = [1 + extra[b] for b in range(len(bins))]
    safe = 0.6 * ccfg.budget
    for _ in range(group_size):
        worst = max(range(len(bins)), key=lambda b: bins[b][1] / k_of[b])
        if bins[worst][1] / k_of[worst] <= safe:
            break
        donors = [
            b for b in range(len(bins))
            if k_of[b] > 1 and bins[b][1] / (k_of[b] - 1) <= safe
        ]
        if not donors:
            break
        donor = min(donors, key=lambda b: bins[b][1] / k_of[b])
        k_of[donor] -= 1
        k_of[worst] += 1
    plan = []
    cursor = layout.lo
    for b, (members, w) in enumerate(bins):
        k = k_of[b]
        plan.append((b, tuple(members), cursor, cursor + k))
        cursor += k
    if plan and plan[-1][3] < layout.hi:
        b, mem, lo_, _hi = plan[-1]
        plan[-1] = (b, mem, lo_, layout.hi)
    cluster.group_broadcast(layout.lo, layout.hi, plan, phase=f"{tag}:map")

    bin_of = {}
    ranges = {}
    for b, members, lo_, hi_ in plan:
        ranges[b] = (lo_, hi_)
        for rid in members:
            bin_of[rid] = b
    sends = {}
    for mid in group:
        m = cluster.machines[mid]
        out = {}
        entry_marked = []
        for rec in m.pop("edges") or ():
            _rid, du, dv = region_of_edge(rec)
            bu = {bin_of[r] for r in du}
            bv = {bin_of[r] for r in dv}
            shared = bu & bv
            b = min(shared) if shared else min(bu)
            lo_, hi_ = ranges[b]
            dest = lo_ + _stable_mod(rec[0], hi_ - lo_)
            slot = out.setdefault(dest, ([], []))
            slot[0].append(rec)
            if not shared:
                # augmentation: the far endpoint joins this region, and both
                # endpoints become boundary everywhere they live
                slot[1].append((rec[2], rec[6], rec[7], 1))
                for vid, x_, y_, bset in (
                    (rec[1], rec[4], rec[5], bu),
                    (rec[2], rec[6], rec[7], bv),
                ):
                    for b2 in sorted(bset):
                        lo2, hi2 = ranges[b2]
                        d2 = lo2 + _stable_mod(vid, hi2 - lo2)
                        slot2 = out.setdefault(d2, ([], []))
                        slot2[1].append((vid, x_, y_, 1))
        for rec in m.pop("verts") or ():
            if rec[3]:
                entry_marked.append(rec[0])
            regs = oracle.regions_of_point((rec[1], rec[2]))
            bins_v = sorted({bin_of[rid] for rid in regs})
            # boundary is relative to the stored regions (bins): oracle
            # region borders inside one bin are interior
            flag = 1 if (len(bins_v) > 1 or rec[3]) else 0
            for b in bins_v:
                lo_, hi_ = ranges[b]
                dest = lo_ + _stable_mod(rec[0], hi_ - lo_)
                slot = out.setdefault(dest, ([], []))
                slot[1].append((rec[0], rec[1], rec[2], flag))
        m.pop(f"__bcast:{tag}:oracle")
        m.pop(f"__bcast:{tag}:map")
        msgs = [(dest, ("d", es, vs)) for dest, (es, vs) in sorted(out.items())]
        if entry_marked:
            # snapshot of this call's marked set rides along to the root
            msgs.append((layout.lo, ("m", sorted(entry_marked))))
        if msgs:
            sends[mid] = msgs
    cluster.exchange(sends, phase=f"{tag}:shuffle")

    entry_all = set()
    for mid in group:
        m = cluster.machines[mid]
        edges = []
        verts = {}
        for _src, payload_ in cluster.take_inbox(mid):
            if payload_[0] == "m":
                entry_all.update(payload_[1])
                continue
            _tag, es, vs = payload_
            edges.extend(es)
            for rec in vs:
                old = verts.get(rec[0])
                if old is None or (old[3] == 0 and rec[3]):
                    verts[rec[0]] = rec
        m.put("edges", sorted(edges))
        m.put("verts", sorted(verts.values()))
        cluster.check_store(mid)

    root.put("region_map", plan)
    cluster.check_store(layout.lo)
    regions = []
    for b, members, lo_, hi_ in plan:
        n_act = sum(len(cluster.machines[mid].get("verts") or ()) for mid in range(lo_, hi_))
        m_act = sum(len(cluster.machines[mid].get("edges") or ()) for mid in range(lo_, hi_))
        regions.append(RegionInfo(b, lo_, hi_, n_act, m_act))
    return DivisionLayout(regions, marked=frozenset(entry_all))


# ---------------------------------------------------------------------------
# Shared recursion helpers
# ---------------------------------------------------------------------------


def _fits_base(cluster, layout, config):
    mcfg = (config or DEFAULT).mpc
    return layout.words <= mcfg.base_mult * cluster.cfg.S or layout.hi - layout.lo <= 1


def _recursion_r(cluster, layout, config):
    mcfg = (config or DEFAULT).mpc
    n = max(layout.n_est, 4)
    S = cluster.cfg.S
    r = math.ceil(n ** mcfg.r_exponent)
    r = max(r, math.ceil(n * max(1.0, math.log2(n)) / S ** 0.9))
    return max(2, min(r, n - 1))


def _group_gather(cluster, layout, phase="gather", consume=False):
    """Move the group's stores to its first machine (forward-and-drop).

    With consume=True the gathered records are dropped from the root store
    after being returned: the base case transforms them into its output."""
    sends = {}
    for mid in range(layout.lo + 1, layout.hi):
        m = cluster.machines[mid]
        es = m.pop("edges") or []
        vs = m.pop("verts") or []
        m.put("edges", [])
        m.put("verts", [])
        if es or vs:
            sends[mid] = [(layout.lo, (es, vs))]
    if sends:
        cluster.exchange(sends, phase=phase)
    root = cluster.machines[layout.lo]
    edges = list(root.get("edges") or [])
    verts = {rec[0]: rec for rec in root.get("verts") or []}
    for _src, (es, vs) in cluster.take_inbox(layout.lo):
        edges.extend(es)
        for rec in vs:
            old = verts.get(rec[0])
            if old is None or (old[3] == 0 and rec[3]):
                verts[rec[0]] = rec
    if consume:
        root.put("edges", [])
        root.put("verts", [])
    else:
        root.put("edges", sorted(edges))
        root.put("verts", sorted(verts.values()))
    cluster.check_store(layout.lo)
    vs = sorted(verts)
    marked = {vid for vid, rec in verts.items() if rec[3]}
    return vs, sorted(edges), marked


def _group_read(cluster, layout, phase="read"):
    """Copy the group's records to the root transiently; originals stay in
    place.  The caller computes on the result and then calls
    _group_read_done to release the root's transient copy."""
    sends = {}
    for mid in range(layout.lo + 1, layout.hi):
        m = cluster.machines[mid]
        es = m.get("edges") or []
        vs = m.get("verts") or []
        if es or vs:
            sends[mid] = [(layout.lo, (list(es), list(vs)))]
    if sends:
        cluster.exchange(sends, phase=phase)
    root = cluster.machines[layout.lo]
    edges = list(root.get("edges") or [])
    verts = {rec[0]: rec for rec in root.get("verts") or []}
    copied = 0
    for _src, (es, vs) in cluster.take_inbox(layout.lo):
        copied += _EDGE_WORDS * len(es) + _VERT_WORDS * len(vs)
        edges.extend(es)
        for rec in vs:
            old = verts.get(rec[0])
            if old is None or (old[3] == 0 and rec[3]):
                verts[rec[0]] = rec
    root.put("__read_copy", copied, words=copied)
    cluster.check_store(layout.lo)
    marked = {vid for vid, rec in verts.items() if rec[3]}
    return sorted(verts), sorted(edges), marked


def _group_read_done(cluster, layout):
    cluster.machines[layout.lo].pop("__read_copy")


def _parallel(cluster, tasks):
    """Run tasks over disjoint machine groups; rounds advance as the max."""
    start = cluster.round
    ends = []
    outs = []
    for t in tasks:
        cluster.round = start
        outs.append(t())
        ends.append(cluster.round)
    cluster.round = max(ends, default=start)
    return outs


def _region_layout(reg, tag):
    return GraphLayout(reg.lo, reg.hi, max(reg.n_est, 1), reg.m_est, tag)


def _gather_pieces(cluster, layout, regions, key, phase):
    """Collect per-region payloads stored at region roots onto the group
    root; returns {rid: payload}."""
    sends = {}
    for reg in regions:
        if reg.lo != layout.lo:
            m = cluster.machines[reg.lo]
            sends[reg.lo] = [(layout.lo, (reg.rid, m.pop(key)))]
    cluster.exchange(sends, phase=phase)
    root = cluster.machines[layout.lo]
    out = {}
    own = root.pop(key)
    if own is not None:
        for reg in regions:
            if reg.lo == layout.lo:
                out[reg.rid] = own
    for _src, (rid, payload) in cluster.take_inbox(layout.lo):
        out[rid] = payload
    return out


def _divide_or_none(cluster, layout, tag, config):
    """Division for recursion; None when it degenerates to one region."""
    r = _recursion_r(cluster, layout, config)
    div = mpc_r_division(cluster, layout, r, tag, config)
    if len(div.regions) <= 1:
        return None
    return div


# ---------------------------------------------------------------------------
# Connected components
# ---------------------------------------------------------------------------


def _cc_recursive(cluster, layout, tag, config):
    if not _fits_base(cluster, layout, config):
        div = _divide_or_none(cluster, layout, tag, config)
        if div is not None:
            tasks = [
                (lambda reg=reg: _cc_recursive(
                    cluster,
                    _region_layout(reg, f"{tag}.{reg.rid}"),
                    f"{tag}.{reg.rid}",
                    config,
                ))
                for reg in div.regions
            ]
            _parallel(cluster, tasks)
            pieces = _gather_pieces(cluster, layout, div.regions, "H", f"{tag}:glue")
            union_v = set()
            union_e = []
            ell = 0
            for hv, he, ell_r in pieces.values():
                union_v.update(hv)
                union_e.extend(he)
                ell += ell_r
            hv, he, ell_u = compress_connectivity(
                sorted(union_v, key=repr), union_e, div.marked, tag=tag
            )
            ell += ell_u
            root = cluster.machines[layout.lo]
            root.put("H", (hv, he, ell))
            cluster.check_store(layout.lo)
            return hv, he, ell
    vs, edges, marked = _local_graph(cluster, layout)
    hv, he, ell = compress_connectivity(vs, edges, marked, tag=tag)
    root = cluster.machines[layout.lo]
    root.put("H", (hv, he, ell))
    cluster.check_store(layout.lo)
    return hv, he, ell


def _local_graph(cluster, layout, consume=True):
    vs, edge_recs, marked = _group_gather(cluster, layout, consume=consume)
    return vs, [(e[1], e[2]) for e in edge_recs], marked


def mpc_connected_components(cluster, g, marked=()):
    """(H, ell) with cc(G) = cc(H) + ell; H connects the marked set exactly
    as G does."""
    cluster, layout = _ensure_layout(cluster, g)
    _flag_marked(cluster, layout, marked)
    hv, he, ell = _cc_recursive(cluster, layout, "cc", None)
    cluster.machines[layout.lo].pop("H")
    return (hv, he), ell


def _ensure_layout(cluster, g):
    if isinstance(cluster, tuple):
        return cluster
    if isinstance(cluster, Cluster):
        layout = getattr(cluster, "_root_layout", None)
        if layout is None:
            raise ValueError("use cluster_for_graph or pass (cluster, layout)")
        return cluster, layout
    if isinstance(cluster, ClusterConfig):
        c, layout = cluster_for_graph(g, cfg=cluster, seed=cluster.seed)
    else:
        c, layout = cluster_for_graph(g, cfg=None, seed=0)
    c._root_layout = layout
    return c, layout


# ---------------------------------------------------------------------------
# Bipartition
# ---------------------------------------------------------------------------


def _bip_compress(cluster, layout, tag, config):
    """Claim (1): graph preserving the marked set's bipartitions, at the
    group root."""
    if not _fits_base(cluster, layout, config):
        div = _divide_or_none(cluster, layout, tag, config)
        if div is not None:
            tasks = [
                (lambda reg=reg: _bip_compress(
                    cluster,
                    _region_layout(reg, f"{tag}.{reg.rid}"),
                    f"{tag}.{reg.rid}",
                    config,
                ))
                for reg in div.regions
            ]
            _parallel(cluster, tasks)
            pieces = _gather_pieces(cluster, layout, div.regions, "HB", f"{tag}:glue")
            union_v = set()
            union_e = []
            for hv, he in pieces.values():
                union_v.update(hv)
                union_e.extend(he)
            hv, he = compress_bipartite(
                sorted(union_v, key=repr), union_e, div.marked, tag=tag
            )
            cluster.machines[layout.lo].put("HB", (hv, he))
            cluster.check_store(layout.lo)
            return hv, he
    vs, edge_recs, marked = _group_read(cluster, layout, phase=f"{tag}:read")
    hv, he = compress_bipartite(vs, [(e[1], e[2]) for e in edge_recs], marked, tag=tag)
    _group_read_done(cluster, layout)
    cluster.machines[layout.lo].put("HB", (hv, he))
    cluster.check_store(layout.lo)
    return hv, he


def _extend_coloring(vertices, edges, pinned):
    """BFS extension of a partial coloring, propagating outward from the
    pinned vertices first; None when no proper extension exists."""
    from collections import deque

    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    color = {v: c for v, c in pinned.items() if v in adj}
    dq = deque(sorted(color, key=repr))
    while dq:
        u = dq.popleft()
        for v in adj[u]:
            if v not in color:
                color[v] = 1 - color[u]
                dq.append(v)
    for s in sorted(adj, key=repr):
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
    for u, v in edges:
        if color[u] == color[v]:
            return None
    return color


def _bip_extend(cluster, layout, pinned, tag, config):
    """Claim (2): extend the pinned coloring of the marked set to the whole
    subgraph; colorings accumulate in per-machine "coloring" stores.
    Returns False when no extension exists."""
    if not _fits_base(cluster, layout, config):
        div = _divide_or_none(cluster, layout, tag, config)
        if div is not None:
            tasks = [
                (lambda reg=reg: _bip_compress(
                    cluster,
                    _region_layout(reg, f"{tag}.{reg.rid}c"),
                    f"{tag}.{reg.rid}c",
                    config,
                ))
                for reg in div.regions
            ]
            _parallel(cluster, tasks)
            pieces = _gather_pieces(cluster, layout, div.regions, "HB", f"{tag}:glue")
            union_v = set()
            union_e = []
            for hv, he in pieces.values():
                union_v.update(hv)
                union_e.extend(he)
            coloring = _extend_coloring(sorted(union_v, key=repr), union_e, pinned)
            if coloring is None:
                return False
            # hand each region the colors of its marked set
            sends = {}
            for reg in div.regions:
                hv, _he = pieces[reg.rid]
                pin_r = {
                    v: coloring[v] for v in hv if not isinstance(v, tuple)
                }
                if reg.lo != layout.lo:
                    sends.setdefault(layout.lo, []).append((reg.lo, pin_r))
                else:
                    cluster.machines[layout.lo].put("pin", pin_r)
            cluster.exchange(sends, phase=f"{tag}:pins")
            pins = {}
            for reg in div.regions:
                if reg.lo == layout.lo:
                    pins[reg.rid] = cluster.machines[layout.lo].pop("pin")
                else:
                    msgs = cluster.take_inbox(reg.lo)
                    pins[reg.rid] = msgs[0][1] if msgs else {}
            oks = _parallel(
                cluster,
                [
                    (lambda reg=reg: _bip_extend(
                        cluster,
                        _region_layout(reg, f"{tag}.{reg.rid}"),
                        pins[reg.rid],
                        f"{tag}.{reg.rid}",
                        config,
                    ))
                    for reg in div.regions
                ],
            )
            return all(oks)
    vs, edges, marked = _local_graph(cluster, layout)
    pinned = {v: c for v, c in pinned.items() if v in set(vs)}
    coloring = _extend_coloring(vs, edges, pinned)
    if coloring is None:
        return False
    root = cluster.machines[layout.lo]
    existing = root.get("coloring") or {}
    existing.update(coloring)
    root.put("coloring", existing)
    cluster.check_store(layout.lo)
    return True


def mpc_bipartition(cluster, g):
    """Proper 2-coloring of g, or None when an odd cycle exists."""
    cluster, layout = _ensure_layout(cluster, g)
    ok = _bip_extend(cluster, layout, {}, "bip", None)
    if not ok:
        return None
    coloring = {}
    for m in cluster.machines:
        part = m.pop("coloring")
        if part:
            coloring.update(part)
    return coloring


# ---------------------------------------------------------------------------
# Minimum spanning forest
# ---------------------------------------------------------------------------


def _keyed(edge_recs):
    return [((e[3], e[0]), e[0], e[1], e[2]) for e in edge_recs]


def _mst_compress_rec(cluster, layout, tag, config):
    if not _fits_base(cluster, layout, config):
        div = _divide_or_none(cluster, layout, tag, config)
        if div is not None:
            tasks = [
                (lambda reg=reg: _mst_compress_rec(
                    cluster,
                    _region_layout(reg, f"{tag}.{reg.rid}"),
                    f"{tag}.{reg.rid}",
                    config,
                ))
                for reg in div.regions
            ]
            _parallel(cluster, tasks)
            pieces = _gather_pieces(cluster, layout, div.regions, "HM", f"{tag}:glue")
            union_v = set()
            union_e = []
            for hv, he in pieces.values():
                union_v.update(hv)
                union_e.extend(he)
            hv, he = mst_compress(
                sorted(union_v, key=repr), union_e, div.marked, tag=tag
            )
            cluster.machines[layout.lo].put("HM", (hv, he))
            cluster.check_store(layout.lo)
            return hv, he
    vs, edge_recs, marked = _group_read(cluster, layout, phase=f"{tag}:read")
    hv, he = mst_compress(vs, _keyed(edge_recs), marked, tag=tag)
    _group_read_done(cluster, layout)
    cluster.machines[layout.lo].put("HM", (hv, he))
    cluster.check_store(layout.lo)
    return hv, he


def _mst_solve(cluster, layout, ctx, tag, config):
    """Stores the region's spanning-forest edge ids under "T_part" keys.

    ctx: keyed context edges attaching only at flagged vertices."""
    if _fits_base(cluster, layout, config):
        vs, edge_recs, _marked = _group_gather(cluster, layout, consume=True)
        vset = set(vs) | {u for _k, _e, u, v in ctx for u in (u, v)}
        chosen = kruskal(sorted(vset, key=repr), _keyed(edge_recs) + list(ctx))
        real = {e[0] for e in edge_recs}
        cluster.machines[layout.lo].put("T_part", sorted(chosen & real))
        cluster.check_store(layout.lo)
        return
    div = _divide_or_none(cluster, layout, tag, config)
    if div is None:
        # single region: retry as base by brute gather
        vs, edge_recs, _marked = _group_gather(cluster, layout, consume=True)
        vset = set(vs) | {u for _k, _e, u, v in ctx for u in (u, v)}
        chosen = kruskal(sorted(vset, key=repr), _keyed(edge_recs) + list(ctx))
        real = {e[0] for e in edge_recs}
        cluster.machines[layout.lo].put("T_part", sorted(chosen & real))
        return
    tasks = [
        (lambda reg=reg: _mst_compress_rec(
            cluster,
            _region_layout(reg, f"{tag}.{reg.rid}c"),
            f"{tag}.{reg.rid}c",
            config,
        ))
        for reg in div.regions
    ]
    _parallel(cluster, tasks)
    pieces = _gather_pieces(cluster, layout, div.regions, "HM", f"{tag}:glue")
    tagged_union = []
    for rid, (hv, he) in sorted(pieces.items()):
        for e in he:
            tagged_union.append((rid, e))
    bundle = (sorted(ctx), tagged_union)
    cluster.group_broadcast(
        layout.lo, layout.hi, bundle, phase=f"{tag}:ctx"
    )
    # region roots assemble their context: ctx plus other regions' pieces
    per_region_ctx = {}
    for reg in div.regions:
        m = cluster.machines[reg.lo]
        got = m.pop(f"__bcast:{tag}:ctx")
        base_ctx, tunion = got
        per_region_ctx[reg.rid] = list(base_ctx) + [
            e for rid, e in tunion if rid != reg.rid
        ]
    for mid in range(layout.lo, layout.hi):
        cluster.machines[mid].pop(f"__bcast:{tag}:ctx")
    _parallel(
        cluster,
        [
            (lambda reg=reg: _mst_solve(
                cluster,
                _region_layout(reg, f"{tag}.{reg.rid}"),
                per_region_ctx[reg.rid],
                f"{tag}.{reg.rid}",
                config,
            ))
            for reg in div.regions
        ],
    )


def mpc_mst(cluster, g):
    """Edge-id set of the minimum spanning forest under (weight, id) keys.

    The forest stays distributed over the machines ("T_part" stores); the
    returned set is the driver's readout of those stores."""
    cluster, layout = _ensure_layout(cluster, g)
    _mst_solve(cluster, layout, [], "mst", None)
    out = set()
    for m in cluster.machines:
        part = m.pop("T_part")
        if part:
            out.update(part)
    return out


# ---------------------------------------------------------------------------
# Spanners, shortcut paths, st-path, diameter
# ---------------------------------------------------------------------------


def _spanner_reaches(adj, u, v, limit, ops_cap):
    """Whether the current spanner connects u to v within `limit`; None when
    the bounded search exhausted its operation cap undecided."""
    import heapq

    dist = {u: 0.0}
    heap = [(0.0, repr(u), u)]
    seen = set()
    ops = 0
    while heap:
        d, _r, x = heapq.heappop(heap)
        if x in seen:
            continue
        seen.add(x)
        if x == v:
            return True
        if d > limit:
            return False
        ops += 1
        if ops > ops_cap:
            return None
        for y, w in adj[x]:
            nd = d + w
            if nd <= limit and (y not in dist or nd < dist[y]):
                dist[y] = nd
                heapq.heappush(heap, (nd, repr(y), y))
    return False


def _greedy_spanner(marked, dist_fn, k, max_edges=None):
    """Greedy (2k-1)-spanner of the complete distance graph on marked.

    Edges ascend by weight; a pair is dropped when the spanner already
    connects it within (2k-1) times its distance.  For the default k=2 the
    test checks the direct edge and two-hop paths, which is conservative:
    an accepted edge can only lower the stretch.  The output is trimmed to
    the analytic edge budget and, when given, the space budget max_edges
    (keeping a connecting forest first, so distances only lengthen)."""
    pairs = []
    marked = sorted(marked, key=repr)
    for i, u in enumerate(marked):
        du = dist_fn(u)
        for v in marked[i + 1 :]:
            d = du.get(v)
            if d is not None:
                pairs.append((d, u, v))
    pairs.sort(key=lambda p: (p[0], repr(p[1]), repr(p[2])))
    nbr = {v: {} for v in marked}
    out = []
    stretch = 2 * k - 1
    ops_cap = 64 + 8 * len(marked)
    use_two_hop = k == 2
    uf = UnionFind(marked) if not use_two_hop else None
    for d, u, v in pairs:
        limit = stretch * d
        if use_two_hop:
            reach = False
            nu = nbr[u]
            nv = nbr[v]
            if v in nu and nu[v] <= limit:
                reach = True
            else:
                small, big = (nu, nv) if len(nu) <= len(nv) else (nv, nu)
                for w, dw in small.items():
                    other = big.get(w)
                    if other is not None and dw + other <= limit:
                        reach = True
                        break
        elif uf.find(u) != uf.find(v):
            reach = False
        else:
            adj_view = {x: list(ns.items()) for x, ns in nbr.items()}
            reach = _spanner_reaches(adj_view, u, v, limit, ops_cap) is True
        if not reach:
            nbr[u][v] = d
            nbr[v][u] = d
            if uf is not None:
                uf.union(u, v)
            out.append((u, v, d))
    # hard edge budget: keep a connecting forest plus the lightest extras;
    # trimming only lengthens distances in the spanner, never below d_G
    budget = math.ceil(4.0 * max(1, len(marked)) ** (1.0 + 1.0 / k)) + len(marked)
    if max_edges is not None:
        budget = min(budget, max(len(marked), max_edges))
    if len(out) > budget:
        forest_uf = UnionFind(marked)
        keep = []
        extras = []
        for (u, v, d) in out:
            if forest_uf.union(u, v):
                keep.append((u, v, d))
            else:
                extras.append((u, v, d))
        extras.sort(key=lambda e: (e[2], repr(e[0]), repr(e[1])))
        keep.extend(extras[: max(0, budget - len(keep))])
        out = keep
    return out


def _path_edges_from_pred(pred, s, t):
    out = []
    v = t
    while v != s:
        p = pred[v]
        out.append((p, v))
        v = p
    out.reverse()
    return out


def _base_paths(vs, edge_recs, pairs):
    """Shortest paths for the requested pairs plus the component-stitching
    protocol; returns (stitched, per-pair shortest distances)."""
    adj = {v: [] for v in vs}
    rec_of = {}
    for e in edge_recs:
        adj[e[1]].append((e[2], e[3]))
        adj[e[2]].append((e[1], e[3]))
        rec_of[(e[1], e[2])] = e
        rec_of[(e[2], e[1])] = e
    paths = []
    for idx, (s, t) in enumerate(pairs):
        dist, pred = dijkstra(adj, s, targets=[t])
        if t not in dist:
            raise Unreachable(f"{s} and {t} are disconnected")
        edges = _path_edges_from_pred(pred, s, t)
        paths.append((s, t, dist[t], [rec_of[e] for e in edges]))
    # union of the paths; one output path per component, largest target wins
    uf = UnionFind(set(vs))
    for _s, _t, _d, recs in paths:
        for e in recs:
            uf.union(e[1], e[2])
    stitched = []
    i_prev = 0
    while i_prev < len(pairs):
        s = pairs[i_prev][0]
        comp = uf.find(s)
        last = max(
            (j for j in range(i_prev, len(pairs)) if uf.find(pairs[j][1]) == comp),
            default=i_prev,
        )
        t = pairs[last][1]
        dist, pred = dijkstra(adj, s, targets=[t])
        if t not in dist:
            raise Unreachable(f"{s} and {t} are disconnected")
        recs = [rec_of[e] for e in _path_edges_from_pred(pred, s, t)]
        stitched.append(
            {"s": s, "t": t, "length": dist[t], "edges": [e[0] for e in recs],
             "ends": (i_prev, last)}
        )
        i_prev = last + 1
    return stitched


def _spanner_base(cluster, layout, pairs, k, tag, edge_cap=None):
    vs, edge_recs, marked = _group_read(cluster, layout, phase=f"{tag}:read")
    adj = {v: [] for v in vs}
    for e in edge_recs:
        adj[e[1]].append((e[2], e[3]))
        adj[e[2]].append((e[1], e[3]))

    def dist_fn(u):
        d, _ = dijkstra(adj, u)
        return d

    cap = max(32, int(0.2 * cluster.cfg.budget / 3)) if edge_cap is None else edge_cap
    A = _greedy_spanner(marked, dist_fn, k, max_edges=cap)
    stitched = _base_paths(vs, edge_recs, pairs) if pairs else []
    _group_read_done(cluster, layout)
    root = cluster.machines[layout.lo]
    root.put("A", A)
    root.put("paths", stitched)
    cluster.check_store(layout.lo)
    return A, stitched


def _spanner_rec(cluster, layout, pairs, k, tag, config, edge_cap=None):
    """Lemma driver: returns (spanner edges over the call's marked set,
    stitched paths for the requested pairs)."""
    if _fits_base(cluster, layout, config):
        return _spanner_base(cluster, layout, pairs, k, tag, edge_cap)
    div = _divide_or_none(cluster, layout, tag, config)
    if div is None:
        return _spanner_base(cluster, layout, pairs, k, tag, edge_cap)

    # Phase 1: recursive spanners per region; per-region edge caps keep the
    # gathered union within the root's budget share.
    child_cap = max(24, int(0.5 * cluster.cfg.budget / 3.0 / max(1, len(div.regions))))
    _parallel(
        cluster,
        [
            (lambda reg=reg: _spanner_rec(
                cluster,
                _region_layout(reg, f"{tag}.{reg.rid}a"),
                [],
                k,
                f"{tag}.{reg.rid}a",
                config,
                edge_cap=child_cap,
            ))
            for reg in div.regions
        ],
    )
    pieces = _gather_pieces(cluster, layout, div.regions, "A", f"{tag}:Aglue")
    for reg in div.regions:
        cluster.machines[reg.lo].pop("paths")
    a_adj = {}
    edge_region = {}
    for rid, a_edges in sorted(pieces.items()):
        for (u, v, w) in a_edges:
            a_adj.setdefault(u, []).append((v, w))
            a_adj.setdefault(v, []).append((u, w))
            edge_region[(u, v)] = rid
            edge_region[(v, u)] = rid
    for v in div.marked:
        a_adj.setdefault(v, [])

    def a_dist(u):
        d, _ = dijkstra(a_adj, u)
        return d

    cap = max(32, int(0.2 * cluster.cfg.budget / 3)) if edge_cap is None else edge_cap
    A_out = _greedy_spanner(sorted(div.marked, key=repr), a_dist, k, max_edges=cap)

    stitched_out = []
    if pairs:
        # Shortest pair paths in the union A; dedupe shared edges with the
        # (i, j) bookkeeping so each A-edge spawns one child request.
        p_paths = []
        for (s, t) in pairs:
            dist, pred = dijkstra(a_adj, s, targets=[t])
            if t not in dist:
                raise Unreachable(f"{s} and {t} are disconnected")
            p_paths.append(_path_edges_from_pred(pred, s, t))
        r_max = {}
        t_max = {}
        for i, pth in enumerate(p_paths):
            for j, (u, v) in enumerate(pth):
                key = (u, v) if (u, v) in edge_region and (u, v)[0] == u else (u, v)
                ek = (u, v) if (u, v) in edge_region else (v, u)
                ek = tuple(sorted((u, v), key=repr))
                r_max[ek] = (i, j)
                t_max[ek] = v
        requests = {reg.rid: [] for reg in div.regions}
        emitted = set()
        for i, pth in enumerate(p_paths):
            for j, (u, v) in enumerate(pth):
                ek = tuple(sorted((u, v), key=repr))
                if ek in emitted:
                    continue
                if r_max[ek] != (i, j):
                    continue
                emitted.add(ek)
                rid = edge_region[(u, v)]
                su, sv = (u, v) if t_max[ek] == v else (v, u)
                requests[rid].append((su, sv))
        bundle = sorted(requests.items())
        cluster.group_broadcast(layout.lo, layout.hi, bundle, phase=f"{tag}:req")
        req_by_region = dict(bundle)
        for mid in range(layout.lo, layout.hi):
            cluster.machines[mid].pop(f"__bcast:{tag}:req")
        child_paths = _parallel(
            cluster,
            [
                (lambda reg=reg: _spanner_rec(
                    cluster,
                    _region_layout(reg, f"{tag}.{reg.rid}b"),
                    req_by_region[reg.rid],
                    k,
                    f"{tag}.{reg.rid}b",
                    config,
                    edge_cap=child_cap,
                )[1])
                for reg in div.regions
            ],
        )
        for reg in div.regions:
            cluster.machines[reg.lo].pop("A")
        # Q(G): one weighted edge per returned child path.
        q_adj = {}
        seg_info = {}
        for reg, stitched in zip(div.regions, child_paths):
            for srec in stitched:
                u, v, w = srec["s"], srec["t"], srec["length"]
                q_adj.setdefault(u, []).append((v, w))
                q_adj.setdefault(v, []).append((u, w))
                seg_info[(u, v)] = srec
                seg_info[(v, u)] = {**srec, "edges": list(reversed(srec["edges"]))}
        uf = UnionFind(set(q_adj) | {p for pr in pairs for p in pr})
        for (u, v) in seg_info:
            uf.union(u, v)
        i_prev = 0
        while i_prev < len(pairs):
            s = pairs[i_prev][0]
            comp = uf.find(s)
            last = max(
                (
                    j
                    for j in range(i_prev, len(pairs))
                    if uf.find(pairs[j][1]) == comp
                ),
                default=i_prev,
            )
            t = pairs[last][1]
            dist, pred = dijkstra(q_adj, s, targets=[t])
            if t not in dist:
                raise Unreachable(f"{s} and {t} are disconnected in Q")
            edge_ids = []
            for (u, v) in _path_edges_from_pred(pred, s, t):
                edge_ids.extend(seg_info[(u, v)]["edges"])
            stitched_out.append(
                {
                    "s": s,
                    "t": t,
                    "length": dist[t],
                    "edges": edge_ids,
                    "ends": (i_prev, last),
                }
            )
            i_prev = last + 1
    root = cluster.machines[layout.lo]
    root.put("A", A_out)
    root.put("paths", stitched_out)
    cluster.check_store(layout.lo)
    return A_out, stitched_out


def mpc_spanner_shortcuts(cluster, g, marked, pairs=(), config=None):
    """(A, paths): a stretch-bounded weighted graph on the marked set plus
    stitched disjoint paths covering the requested pairs."""
    cluster, layout = _ensure_layout(cluster, g)
    cfg = config or DEFAULT
    marked = set(marked)
    seen_pairs = set()
    for s, t in pairs:
        if s not in marked or t not in marked:
            raise PairNotMarked(f"pair ({s}, {t}) not within the marked set")
        if (s, t) in seen_pairs:
            raise PairNotMarked(f"duplicate pair ({s}, {t})")
        seen_pairs.add((s, t))
    _flag_marked(cluster, layout, marked)
    A, stitched = _spanner_rec(
        cluster, layout, list(pairs), cfg.mpc.spanner_k, "span", cfg
    )
    root = cluster.machines[layout.lo]
    root.pop("A")
    root.pop("paths")
    return A, stitched


def _place_path(cluster, layout, edge_ids, config=None):
    """Store a path's edges in order across machines (the layout contract:
    consecutive slots on consecutive machines)."""
    cap = max(1, int(cluster.cfg.budget // (4 * _EDGE_WORDS)))
    sends = {}
    pos = {eid: i for i, eid in enumerate(edge_ids)}
    for mid in range(layout.lo, layout.hi):
        m = cluster.machines[mid]
        outs = []
        for rec in m.get("edges") or ():
            if rec[0] in pos:
                p = pos[rec[0]]
                dest = layout.lo + (p // cap)
                if dest >= layout.hi:
                    dest = layout.hi - 1
                outs.append((dest, (p, rec[:4])))
        if outs:
            sends[mid] = outs
    cluster.exchange(sends, phase="path:place")
    placed = {}
    for mid in range(layout.lo, layout.hi):
        slots = sorted(cluster.take_inbox(mid), key=lambda sp: sp[1][0])
        chunk = [rec for _src, (_p, rec) in slots]
        if chunk:
            cluster.machines[mid].put("path_slots", chunk)
            cluster.check_store(mid)
            placed[mid] = [rec[0] for rec in chunk]
    return placed


def mpc_st_path(cluster, g, s, t, config=None):
    """O(1)-approximate s-t path as an ordered edge-id list."""
    cluster, layout = _ensure_layout(cluster, g)
    if s == t:
        return []
    _A, stitched = mpc_spanner_shortcuts(cluster, g, {s, t}, [(s, t)], config)
    if not stitched:
        raise Unreachable(f"no path between {s} and {t}")
    path = stitched[0]["edges"]
    _place_path(cluster, layout, path, config)
    return path


def _diameter_rec(cluster, layout, tag, config):
    if _fits_base(cluster, layout, config):
        # regions of a division need not be connected: the subpath argument
        # only needs per-component diameters, so take the max over them
        vs, edge_recs, _m = _group_read(cluster, layout, phase=f"{tag}:read")
        adj = {v: [] for v in vs}
        for e in edge_recs:
            adj[e[1]].append((e[2], e[3]))
            adj[e[2]].append((e[1], e[3]))
        best = 0.0
        for v in vs:
            dist, _ = dijkstra(adj, v)
            best = max(best, max(dist.values(), default=0.0))
        _group_read_done(cluster, layout)
        return best
    div = _divide_or_none(cluster, layout, tag, config)
    if div is None:
        return _diameter_rec(
            cluster,
            GraphLayout(layout.lo, layout.hi, 1, layout.m_est, tag),
            tag,
            config,
        )
    child_ds = _parallel(
        cluster,
        [
            (lambda reg=reg: _diameter_rec(
                cluster,
                _region_layout(reg, f"{tag}.{reg.rid}"),
                f"{tag}.{reg.rid}",
                config,
            ))
            for reg in div.regions
        ],
    )
    # spanner over the division boundary (flags already mark it)
    cfg = config or DEFAULT
    A, _paths = _spanner_rec(
        cluster,
        GraphLayout(layout.lo, layout.hi, layout.n_est, layout.m_est, f"{tag}s"),
        [],
        cfg.mpc.spanner_k,
        f"{tag}s",
        config,
    )
    a_adj = {}
    for (u, v, w) in A:
        a_adj.setdefault(u, []).append((v, w))
        a_adj.setdefault(v, []).append((u, w))
    diam_a = 0.0
    for u in a_adj:
        dist, _ = dijkstra(a_adj, u)
        diam_a = max(diam_a, max(dist.values(), default=0.0))
    L = max([diam_a] + child_ds)
    return 3.0 * L


def mpc_diameter(cluster, g, config=None):
    """Value in [diam(G), c_diam * diam(G)]; exact when the input fits one
    machine."""
    cluster, layout = _ensure_layout(cluster, g)
    labels = set()
    uf = UnionFind(g.vertices())
    for eid in g.edge_ids():
        u, v, _w, _pl = g.edges[eid]
        uf.union(u, v)
    if g.n and len({uf.find(v) for v in g.vertices()}) > 1:
        raise Disconnected("diameter of a disconnected graph")
    if g.n <= 1:
        return 0.0
    return _diameter_rec(cluster, layout, "diam", config)
