import math
import random

import pytest

from plandiv.harness import GeneratorSpec, generate

_CACHE = {}


def instance(kind, n, seed=0, **params):
    """Session-cached generated instances (Delaunay generation dominates)."""
    key = (kind, n, seed, tuple(sorted(params.items())))
    if key not in _CACHE:
        _CACHE[key] = generate(GeneratorSpec(kind, n, seed=seed, **params))
    return _CACHE[key]


@pytest.fixture
def rng():
    return random.Random(12345)


def edge_pairs(g):
    return [(g.edges[e][0], g.edges[e][1]) for e in g.edge_ids()]


def weighted_adj(g):
    adj = {v: [] for v in g.vertices()}
    for eid in g.edge_ids():
        u, v, w, _ = g.edges[eid]
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj
