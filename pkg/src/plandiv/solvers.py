"""Exact solvers for small graph components.

Inputs are (vertices, edges) pairs over hashable vertex ids.  Matching uses
the blossom algorithm (polynomial); independent set, dominating set, and
distance-to-bipartite are branch-and-bound and rely on the caller's size
caps.  Vertex cover runs degree reductions before branching, which makes it
linear on the path/tree soups used in the experiments.
"""

from __future__ import annotations

from collections import deque

__all__ = [
    "max_matching",
    "max_independent_set",
    "min_vertex_cover",
    "min_dominating_set",
    "distance_to_bipartite",
]


def _index_graph(vertices, edges):
    idx = {v: i for i, v in enumerate(sorted(vertices))}
    adj = [[] for _ in idx]
    seen = set()
    for u, v in edges:
        if u == v:
            continue
        key = (idx[u], idx[v]) if idx[u] < idx[v] else (idx[v], idx[u])
        if key in seen:
            continue
        seen.add(key)
        adj[key[0]].append(key[1])
        adj[key[1]].append(key[0])
    return adj


def max_matching(vertices, edges):
    """Maximum matching size via blossom contraction."""
    adj = _index_graph(vertices, edges)
    n = len(adj)
    match = [-1] * n
    parent = [-1] * n
    base = list(range(n))
    used = [False] * n

    def lca(a, b):
        mark = [False] * n
        while True:
            a = base[a]
            mark[a] = True
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if mark[b]:
                return b
            b = parent[match[b]]

    def mark_path(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = True
            blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def find_path(root):
        nonlocal parent, base, used
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        used[root] = True
        q = deque([root])
        while q:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        u = to
                        while u != -1:
                            pv = parent[u]
                            ppv = match[pv]
                            match[u] = pv
                            match[pv] = u
                            u = ppv
                        return True
                    used[match[to]] = True
                    q.append(match[to])
        return False

    res = 0
    for v in range(n):
        if match[v] == -1 and find_path(v):
            res += 1
    return res


def max_independent_set(vertices, edges):
    """Maximum independent set size, branching on a maximum-degree vertex."""
    adj = _index_graph(vertices, edges)
    n = len(adj)
    nbr = [set(a) for a in adj]

    def solve(alive):
        best = 0
        # peel degree <= 1 vertices greedily (always safe to take)
        alive = set(alive)
        taken = 0
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                deg = len(nbr[v] & alive)
                if deg <= 1:
                    taken += 1
                    alive.discard(v)
                    alive -= nbr[v]
                    changed = True
                    break
        if not alive:
            return taken
        v = max(alive, key=lambda u: (len(nbr[u] & alive), -u))
        # branch: exclude v / include v
        return taken + max(
            solve(alive - {v}),
            1 + solve(alive - {v} - nbr[v]),
        )

    return solve(set(range(n)))


def min_vertex_cover(vertices, edges):
    """Minimum vertex cover size with degree-0/1 reductions before
    branching on a maximum-degree vertex."""
    adj = _index_graph(vertices, edges)
    nbr = [set(a) for a in adj]

    best_holder = [len(adj)]

    def solve(alive, acc):
        if acc >= best_holder[0]:
            return
        alive = set(alive)
        while True:
            deg1 = None
            maxdeg = 0
            maxv = None
            for v in alive:
                d = len(nbr[v] & alive)
                if d == 0:
                    continue
                if d == 1:
                    deg1 = v
                    break
                if d > maxdeg:
                    maxdeg, maxv = d, v
            if deg1 is not None:
                u = next(iter(nbr[deg1] & alive))
                acc += 1
                alive.discard(u)
                alive.discard(deg1)
                if acc >= best_holder[0]:
                    return
                continue
            break
        if maxv is None:
            best_holder[0] = min(best_holder[0], acc)
            return
        live_deg = len(nbr[maxv] & alive)
        # lower bound: remaining edges / max degree
        rem_edges = sum(len(nbr[v] & alive) for v in alive) // 2
        if rem_edges:
            import math

            if acc + math.ceil(rem_edges / live_deg) >= best_holder[0]:
                return
        solve(alive - {maxv}, acc + 1)
        taken = nbr[maxv] & alive
        solve(alive - taken - {maxv}, acc + len(taken))

    solve(set(range(len(adj))), 0)
    return best_holder[0]


def min_dominating_set(vertices, edges):
    """Minimum dominating set size, branching over the closed neighborhood
    of an undominated vertex of minimum choice count."""
    adj = _index_graph(vertices, edges)
    n = len(adj)
    closed = [frozenset(adj[v]) | {v} for v in range(n)]

    # greedy upper bound
    undom = set(range(n))
    greedy = 0
    while undom:
        v = max(range(n), key=lambda u: len(closed[u] & undom))
        undom -= closed[v]
        greedy += 1
    best_holder = [greedy]

    def solve(dominated, acc):
        if acc >= best_holder[0]:
            return
        if len(dominated) == n:
            best_holder[0] = acc
            return
        undominated = [v for v in range(n) if v not in dominated]
        v = min(undominated, key=lambda u: len(closed[u] - dominated))
        # someone in N[v] must be chosen
        for cand in sorted(closed[v], key=lambda u: -len(closed[u] - dominated)):
            solve(dominated | closed[cand], acc + 1)

    solve(frozenset(), 0)
    return best_holder[0]


def _find_odd_cycle(adj, alive):
    color = {}
    parent = {}
    for s in alive:
        if s in color:
            continue
        color[s] = 0
        parent[s] = None
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if v not in alive:
                    continue
                if v not in color:
                    color[v] = 1 - color[u]
                    parent[v] = u
                    dq.append(v)
                elif color[v] == color[u]:
                    au, av = u, v
                    pa = {au}
                    while parent[au] is not None:
                        au = parent[au]
                        pa.add(au)
                    path_v = [av]
                    while av not in pa:
                        av = parent[av]
                        path_v.append(av)
                    cyc = set(path_v)
                    x = u
                    while x != av:
                        cyc.add(x)
                        x = parent[x]
                    cyc.add(av)
                    return cyc
    return None


def distance_to_bipartite(vertices, edges):
    """Minimum number of vertex deletions making the graph bipartite."""
    adj_l = _index_graph(vertices, edges)
    adj = [set(a) for a in adj_l]
    n = len(adj)
    best_holder = [n]

    def solve(alive, removed):
        if removed >= best_holder[0]:
            return
        cyc = _find_odd_cycle(adj, alive)
        if cyc is None:
            best_holder[0] = removed
            return
        for v in sorted(cyc):
            solve(alive - {v}, removed + 1)

    solve(frozenset(range(n)), 0)
    return best_holder[0]
