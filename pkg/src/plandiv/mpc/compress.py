"""Sequential compression of marked graphs.

These run inside base cases of the simulated-cluster algorithms and are the
exhaustively tested core: connectivity stars, bipartition-preserving star
gadgets, and threshold-preserving MST compression.

Graphs are (vertices, edges) with hashable vertex ids; fresh gadget
vertices are tagged tuples so they never collide with input ids.
"""

from __future__ import annotations

from collections import deque

from ..harness import UnionFind, kruskal

__all__ = ["compress_connectivity", "compress_bipartite", "mst_compress"]


def _components(vertices, edges):
    uf = UnionFind(vertices)
    for u, v in edges:
        uf.union(u, v)
    comps = {}
    for v in vertices:
        comps.setdefault(uf.find(v), []).append(v)
    return list(comps.values())


def compress_connectivity(vertices, edges, marked, tag="c"):
    """(H_vertices, H_edges, ell): stars over marked classes.

    Two marked vertices are connected in H iff connected in the input; ell
    counts components disjoint from the marked set.
    """
    marked = set(marked)
    ell = 0
    hv = set()
    he = []
    for k, comp in enumerate(sorted(_components(vertices, edges), key=lambda c: repr(min(c, key=repr)))):
        rays = sorted((m for m in comp if m in marked), key=repr)
        if not rays:
            ell += 1
            continue
        hv.update(rays)
        if len(rays) > 1:
            center = (tag, "star", min(rays, key=repr))
            hv.add(center)
            for r in rays:
                he.append((center, r))
    return sorted(hv, key=repr), he, ell


def _component_coloring(comp, adj):
    """2-coloring of a connected component, or None when odd-cyclic."""
    color = {comp[0]: 0}
    dq = deque([comp[0]])
    while dq:
        u = dq.popleft()
        for v in adj[u]:
            if v not in color:
                color[v] = 1 - color[u]
                dq.append(v)
            elif color[v] == color[u]:
                return None
    return color


def compress_bipartite(vertices, edges, marked, tag="b"):
    """(H_vertices, H_edges): preserves the realizable marked bipartitions.

    Each bipartite component becomes a star on its marked vertices with the
    rays of one color class subdivided, so relative colors of the marked
    vertices are pinned exactly as in the input.  A non-bipartite component
    contributes an odd-cycle gadget, forcing the compressed graph to be
    non-bipartite too.
    """
    marked = set(marked)
    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    hv = set()
    he = []
    for comp in sorted(_components(vertices, edges), key=lambda c: repr(min(c, key=repr))):
        rays = sorted((m for m in comp if m in marked), key=repr)
        coloring = _component_coloring(comp, adj)
        if coloring is None:
            lead = min(comp, key=repr)
            a, b, c = (tag, "odd", lead, 0), (tag, "odd", lead, 1), (tag, "odd", lead, 2)
            hv.update((a, b, c))
            he.extend([(a, b), (b, c), (a, c)])
            hv.update(rays)
            for r in rays:
                he.append((a, r))
            continue
        if not rays:
            continue
        hv.update(rays)
        center = (tag, "star", min(rays, key=repr))
        hv.add(center)
        for r in rays:
            if coloring[r] == 0:
                he.append((center, r))
            else:
                mid = (tag, "sub", r)
                hv.add(mid)
                he.append((center, mid))
                he.append((mid, r))
    return sorted(hv, key=repr), he


def bipartition_sets(vertices, edges, subset):
    """B_G(subset): frozenset of frozensets S' realizable as the white side
    of subset under proper 2-colorings (test oracle)."""
    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    subset = set(subset)
    pieces = []
    for comp in _components(vertices, edges):
        coloring = _component_coloring(comp, adj)
        if coloring is None:
            return frozenset()
        white = frozenset(v for v in comp if v in subset and coloring[v] == 0)
        black = frozenset(v for v in comp if v in subset and coloring[v] == 1)
        pieces.append((white, black))
    outs = {frozenset()}
    for white, black in pieces:
        outs = {s | white for s in outs} | {s | black for s in outs}
    return frozenset(outs)


def mst_compress(vertices, keyed_edges, marked, tag="m"):
    """Threshold-preserving compression with respect to the marked set.

    keyed_edges: (key, edge_id, u, v) with globally unique, totally ordered
    keys.  Computes the minimum spanning forest, prunes unmarked leaves, and
    contracts isolated paths; a contracted path is replaced by an edge that
    inherits the key of its heaviest edge (that key holder is removed, so
    uniqueness survives and every threshold comparison is preserved).

    Returns (H_vertices, H_keyed_edges).
    """
    marked = set(marked)
    mst_ids = kruskal(vertices, keyed_edges)
    by_id = {eid: (key, eid, u, v) for key, eid, u, v in keyed_edges}
    adj = {}
    for eid in sorted(mst_ids, key=lambda e: by_id[e][0]):
        key, _eid, u, v = by_id[eid]
        adj.setdefault(u, {})[v] = (key, eid)
        adj.setdefault(v, {})[u] = (key, eid)
    alive = {v for v in vertices if v in adj} | (marked & set(vertices))
    for v in marked:
        adj.setdefault(v, {})

    # prune unmarked leaves
    stack = sorted((v for v in alive if len(adj[v]) <= 1 and v not in marked), key=repr)
    while stack:
        v = stack.pop()
        if v not in alive or v in marked or len(adj[v]) > 1:
            continue
        alive.discard(v)
        for u in list(adj[v]):
            del adj[u][v]
            if len(adj[u]) <= 1 and u not in marked:
                stack.append(u)
        adj[v] = {}

    # contract isolated paths through unmarked degree-2 vertices; the result
    # is order-independent (each maximal path collapses to its heaviest key)
    queue = sorted((v for v in alive if v not in marked and len(adj[v]) == 2), key=repr)
    while queue:
        v = queue.pop()
        if v not in alive or v in marked or len(adj[v]) != 2:
            continue
        (a, ka), (b, kb) = adj[v].items()
        if a == b:
            continue
        heavy = ka if ka[0] > kb[0] else kb
        alive.discard(v)
        del adj[a][v]
        del adj[b][v]
        adj[v] = {}
        # the spanning forest has no a..b path besides the one through v,
        # so the inherited edge never parallels an existing one
        adj[a][b] = heavy
        adj[b][a] = heavy

    hv = sorted(alive, key=repr)
    seen = set()
    he = []
    for u in hv:
        for v, (key, eid) in adj[u].items():
            if (key, eid) in seen:
                continue
            seen.add((key, eid))
            he.append((key, eid, u, v))
    return hv, he
