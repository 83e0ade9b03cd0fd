import itertools
import random

import pytest

from plandiv.harness import UnionFind, component_labels
from plandiv.mpc import bipartition_sets, compress_bipartite, compress_connectivity, mst_compress


def _all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if mask >> i & 1]


def _cc_pattern(vertices, edges, marked):
    labels = component_labels(vertices, edges)
    return frozenset(
        frozenset(m for m in marked if labels[m] == lab)
        for lab in {labels[m] for m in marked}
    )


def test_connectivity_exhaustive_small():
    for n in range(0, 5):
        for edges in _all_graphs(n):
            comp_total = len(set(component_labels(range(n), edges).values())) if n else 0
            for mmask in range(1 << n):
                marked = [i for i in range(n) if mmask >> i & 1]
                hv, he, ell = compress_connectivity(range(n), edges, marked)
                hcnt = len(set(component_labels(hv, he).values())) if hv else 0
                assert comp_total == hcnt + ell
                if marked:
                    assert _cc_pattern(range(n), edges, marked) == _cc_pattern(hv, he, marked)
                assert len(hv) <= 2 * max(1, len(marked))


def test_connectivity_star_examples():
    # two disjoint triangles, nothing marked
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    hv, he, ell = compress_connectivity(range(6), edges, [])
    assert ell == 2 and not hv and not he
    # path with marked endpoints: 2-ray star
    hv, he, ell = compress_connectivity(range(4), [(0, 1), (1, 2), (2, 3)], [0, 3])
    assert ell == 0
    assert len(he) == 2
    labels = component_labels(hv, he)
    assert labels[0] == labels[3]


def test_bipartite_exhaustive_small():
    for n in range(0, 5):
        for edges in _all_graphs(n):
            for mmask in range(1 << n):
                marked = [i for i in range(n) if mmask >> i & 1]
                hv, he = compress_bipartite(range(n), edges, marked)
                want = bipartition_sets(range(n), edges, marked)
                got = bipartition_sets(hv, he, marked)
                assert want == got, (n, edges, marked)


def test_bipartite_randomized_medium(rng):
    for _ in range(400):
        n = rng.randrange(5, 7)
        edges = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.4]
        marked = [v for v in range(n) if rng.random() < 0.5]
        hv, he = compress_bipartite(range(n), edges, marked)
        assert bipartition_sets(range(n), edges, marked) == bipartition_sets(hv, he, marked)
        assert len(hv) <= 4 * max(1, len(marked)) + 3


def test_bipartite_odd_cycle_marker():
    edges = [(0, 1), (1, 2), (0, 2)]
    hv, he = compress_bipartite(range(3), edges, [0])
    assert bipartition_sets(hv, he, [0]) == frozenset()


def test_bipartite_even_cycle_opposite_marks():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    marked = [0, 2]
    hv, he = compress_bipartite(range(4), edges, marked)
    want = bipartition_sets(range(4), edges, marked)
    assert bipartition_sets(hv, he, marked) == want
    # distance 2 (even): both must share a color class
    assert frozenset([frozenset(), frozenset([0, 2])]) == want


def test_bipartite_empty_marked_bipartite_graph():
    hv, he = compress_bipartite(range(4), [(0, 1), (2, 3)], [])
    assert hv == [] and he == []


def _mst_path_exists(vertices, keyed, a, b, thr, inclusive):
    uf = UnionFind(set(vertices) | {a, b})
    for key, _eid, u, v in keyed:
        if key < thr or (inclusive and key == thr):
            uf.union(u, v)
    return uf.find(a) == uf.find(b)


def test_mst_compression_criterion_random(rng):
    for trial in range(200):
        n = rng.randrange(2, 9)
        pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        keyed = [
            ((round(rng.uniform(1, 9), 3), i), i, u, v)
            for i, (u, v) in enumerate(pairs)
        ]
        marked = [v for v in range(n) if rng.random() < 0.5] or [0]
        hv, he = mst_compress(range(n), keyed, marked)
        assert len(hv) <= 4 * len(marked)
        thresholds = sorted({k for k, *_ in keyed} | {k for k, *_ in he})
        for a in marked:
            for b in marked:
                if a >= b:
                    continue
                for thr in thresholds:
                    for inclusive in (False, True):
                        assert _mst_path_exists(
                            range(n), keyed, a, b, thr, inclusive
                        ) == _mst_path_exists(hv, he, a, b, thr, inclusive)


def test_mst_compress_path_example():
    keyed = [((5.0, 0), 0, "a", "b"), ((1.0, 1), 1, "b", "c"), ((3.0, 2), 2, "c", "d")]
    hv, he = mst_compress(["a", "b", "c", "d"], keyed, ["a", "d"])
    assert hv == ["a", "d"]
    assert len(he) == 1
    key, eid, u, v = he[0]
    assert key == (5.0, 0)  # inherits the heaviest contracted edge's key
    assert {u, v} == {"a", "d"}


def test_mst_compress_star_marked_center():
    keyed = [((1.0 + i, i), i, "c", f"l{i}") for i in range(4)]
    hv, he = mst_compress(["c"] + [f"l{i}" for i in range(4)], keyed, ["c"])
    assert hv == ["c"] and he == []


def test_mst_compress_identity_when_all_marked(rng):
    for _ in range(30):
        n = rng.randrange(2, 7)
        pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.6]
        keyed = [((rng.random(), i), i, u, v) for i, (u, v) in enumerate(pairs)]
        hv, he = mst_compress(range(n), keyed, range(n))
        from plandiv.harness import kruskal

        want = kruskal(range(n), keyed)
        assert {eid for _k, eid, _u, _v in he} == want
