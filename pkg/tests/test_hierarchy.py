from __future__ import annotations

import random
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierarchy_checks import check_hierarchy, hierarchy_exists
from ftoracle.generators import gen_random
from ftoracle.graph_core import Graph, Tier, augment_with_dummy, kruskal_msf
from ftoracle.hierarchy import (
    HierarchyError,
    RootedTree,
    build_clustering,
    build_cross_lists,
    canonical_ranks,
    clusters_of,
    reduce_degree,
)

R, A, B, C = 0, 1, 2, 3


def path_tree() -> RootedTree:
    return RootedTree(4, (-1, R, A, B), R)


def members_at(h, lvl):
    return {h.members(c) for c in h.clusters_at(lvl)}


def test_path_clustering_trace():
    h = build_clustering(path_tree())
    assert h.height == 2
    assert members_at(h, 1) == {frozenset({B, C}), frozenset({R, A})}
    assert members_at(h, 2) == {frozenset({R, A, B, C})}


def test_single_vertex():
    h = build_clustering(RootedTree(1, (-1,), 0))
    assert h.height == 0 and h.num_clusters == 1
    assert clusters_of(h, 0) == [0]


def test_clusters_of_path():
    h = build_clustering(path_tree())
    chain = [h.members(c) for c in clusters_of(h, C)]
    assert chain == [{C}, {B, C}, {R, A, B, C}]
    assert all(len(clusters_of(h, v)) == h.height + 1 for v in range(4))


def test_degree_guard():
    star = RootedTree(5, (-1, 0, 0, 0, 0), 0)
    with pytest.raises(HierarchyError):
        build_clustering(star)


def test_whole_remainder_case():
    # after the deepest fan is grouped only v, its children and its parent remain
    t = RootedTree(7, (-1, 0, 0, 1, 1, 2, 2), 0)
    h = build_clustering(t)
    assert members_at(h, 1) == {frozenset({2, 5, 6}), frozenset({0, 1, 3, 4})}


def test_small_binary_tree_has_no_valid_hierarchy():
    # every leaf must join its parent, which strands the root
    edges = [(i, (i - 1) // 2) for i in range(1, 7)]
    assert not hierarchy_exists(7, edges, delta=3)
    assert hierarchy_exists(4, [(0, 1), (1, 2), (2, 3)], delta=3)


def random_tree(n: int, rng: random.Random, max_deg: int = 3) -> list[int]:
    parent = [-1] * n
    deg = [0] * n
    open_ = [0]
    for v in range(1, n):
        while True:
            i = rng.randrange(len(open_))
            p = open_[i]
            if deg[p] < max_deg - (p != 0):
                break
            open_[i] = open_[-1]
            open_.pop()
        parent[v] = p
        deg[p] += 1
        open_.append(v)
    return parent


@pytest.mark.parametrize("seed", range(12))
def test_properties_except_fanout_on_random_trees(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3, 10, 100, 1000])
    parent = random_tree(n, rng)
    h = build_clustering(RootedTree(n, tuple(parent), 0))
    bad = check_hierarchy(h, parent)
    for prop in ("P1", "P2", "P3", "P4", "P5min", "size"):
        assert not bad[prop], (prop, bad[prop][:3])


def test_reduce_star():
    g = Graph.from_triples(5, [(0, i, float(i)) for i in range(1, 5)])
    red = reduce_degree(g, frozenset(range(4)), root=0)
    assert max(red.tree.degrees()) <= 3
    assert red.tree.degrees()[0] == 2
    assert len(red.surrogates) == 4
    leaves = {e.u for e in red.surrogates.values()}
    assert len(leaves) == 4 and all(red.vertex_map[x] == 0 for x in leaves)
    for eid, e in red.surrogates.items():
        assert e.weight == g.edges[eid].weight and e.v == eid + 1
    gadgets = [e for e in red.graph.edges if e.tier == Tier.GADGET]
    assert len(gadgets) == red.graph.n - g.n


def test_reduce_path_is_identity():
    g = Graph.from_triples(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    red = reduce_degree(g, frozenset({0, 1, 2}), root=0)
    assert red.graph.edges == g.edges
    assert not red.surrogates and not red.vertex_map


@pytest.mark.parametrize("seed", range(8))
def test_reduced_msf_maps_back(seed):
    g = gen_random(40, 90, seed=seed)
    aug = augment_with_dummy(g)
    base = kruskal_msf(aug)
    red = reduce_degree(aug, base, root=g.n)
    assert max(red.tree.degrees()) <= 3
    assert red.graph.n <= 2 * aug.n
    hat = kruskal_msf(red.graph)
    assert hat == red.tree_edges
    assert frozenset(e for e in hat if e < aug.m) == base


def brute_cross_lists(g, h):
    rank, _ = canonical_ranks(g)
    got = defaultdict(list)
    for e in g.edges:
        cu, cv = clusters_of(h, e.u), clusters_of(h, e.v)
        for i, a in enumerate(cu):
            for j, b in enumerate(cv):
                if a in cv or b in cu:
                    continue  # one contains the other's endpoint: not below the LCA
                got[(min(a, b), max(a, b))].append(e.id)
    return {k: sorted(v, key=lambda i: rank[i]) for k, v in got.items()}


def test_cross_lists_path_example():
    g = Graph.from_triples(4, [(R, A, 1.0), (A, B, 1.0), (B, C, 1.0), (R, C, 5.0)])
    h = build_clustering(path_tree())
    d = build_cross_lists(g, h)
    by_members = {}
    for (a, b), ids in d.pairs():
        by_members[frozenset({h.members(a), h.members(b)})] = ids
    for x, y in [({R}, {C}), ({R, A}, {B, C}), ({R}, {B, C}), ({R, A}, {C})]:
        assert 3 in by_members[frozenset({frozenset(x), frozenset(y)})]
    # (b,c) sits inside {b,c}: only the singleton pair carries it
    holders = [k for k, ids in by_members.items() if 2 in ids]
    assert holders == [frozenset({frozenset({B}), frozenset({C})})]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(0, 10**6))
def test_cross_lists_match_brute_force(n, seed):
    rng = random.Random(seed)
    parent = random_tree(n, rng)
    pairs = {(min(v, p), max(v, p)) for v, p in enumerate(parent) if p >= 0}
    extra = min(n * (n - 1) // 2 - len(pairs), rng.randint(0, 2 * n))
    while extra:
        a, b = rng.sample(range(n), 2)
        if (min(a, b), max(a, b)) not in pairs:
            pairs.add((min(a, b), max(a, b)))
            extra -= 1
    g = Graph.from_triples(n, [(a, b, float(rng.randint(1, 5))) for a, b in sorted(pairs)])
    h = build_clustering(RootedTree(n, tuple(parent), 0))
    d = build_cross_lists(g, h)
    want = brute_cross_lists(g, h)
    assert dict(d.pairs()) == want
    for (a, b), ids in want.items():
        assert d.edges(b, a) == ids
    assert d.total_entries <= g.m * (h.height + 1) ** 2
    # absent pairs answer None, both one at a time and vectorized
    c = np.arange(h.num_clusters)
    slots = d.slots(np.repeat(c, len(c)), np.tile(c, len(c)))
    for (a, b), s in zip(zip(np.repeat(c, len(c)), np.tile(c, len(c))), slots):
        assert (s >= 0) == ((min(a, b), max(a, b)) in want)
        assert d.slot(int(a), int(b)) == (None if s < 0 else s)


def test_dump_lists_every_cluster():
    h = build_clustering(path_tree())
    lines = h.dump().splitlines()
    assert lines[0].startswith("L2") and len(lines) == h.num_clusters
