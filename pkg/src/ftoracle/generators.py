"""Seeded random graphs and the girth-based lower-bound family."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from ftoracle.graph_core import Edge, Graph


def gen_random(
    n: int,
    m: int,
    weight_range: tuple[float, float] = (1.0, 10.0),
    seed: int = 0,
    *,
    source: int | None = 0,
    digits: int | None = 3,
    connected: bool = False,
) -> Graph:
    """Uniform simple graph with ``m`` edges and weights uniform in the range.

    ``connected`` lays a random spanning tree first (needs ``m >= n - 1``).
    Weights are rounded to ``digits`` decimals when given.
    """
    total = n * (n - 1) // 2
    if m > total or m < 0:
        raise ValueError(f"cannot place {m} edges on {n} vertices")
    lo, hi = weight_range
    if not 0 < lo <= hi:
        raise ValueError("weights must be positive")
    if connected and n > 1 and m < n - 1:
        raise ValueError("a connected graph needs at least n-1 edges")
    rng = random.Random(seed)
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    if connected:
        perm = list(range(n))
        rng.shuffle(perm)
        for i in range(1, n):
            a, b = perm[i], perm[rng.randrange(i)]
            p = (a, b) if a < b else (b, a)
            seen.add(p)
            pairs.append(p)
    if m - len(pairs) > total // 2:
        rest = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in seen]
        pairs.extend(rng.sample(rest, m - len(pairs)))
    else:
        while len(pairs) < m:
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v:
                continue
            p = (u, v) if u < v else (v, u)
            if p in seen:
                continue
            seen.add(p)
            pairs.append(p)
    triples = []
    for u, v in pairs:
        w = rng.uniform(lo, hi)
        if digits is not None:
            w = min(max(round(w, digits), lo), hi)
        triples.append((u, v, w))
    return Graph.from_triples(n, triples, source)


def girth(g: Graph) -> float:
    """Length (edge count) of a shortest cycle, by BFS from every vertex."""
    best = float("inf")
    adj = [[] for _ in range(g.n)]
    for e in g.edges:
        adj[e.u].append((e.v, e.id))
        adj[e.v].append((e.u, e.id))
    for r in range(g.n):
        dist = {r: 0}
        via = {r: -1}
        queue = deque([r])
        while queue:
            x = queue.popleft()
            for y, eid in adj[x]:
                if eid == via[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    via[y] = eid
                    queue.append(y)
    return best


def complete_bipartite(a: int) -> Graph:
    return Graph.from_triples(2 * a, [(i, a + j, 1.0) for i in range(a) for j in range(a)])


@dataclass(frozen=True)
class LowerBoundInstance:
    graph: Graph
    source: int
    eta: int  # base vertex count
    girth: int
    kappa: int  # girth = 2 * kappa + 2
    x: float  # attachment weight, girth / 2 - 1
    height: int
    base_vertices: tuple[int, ...]
    base_edges: tuple[int, ...]
    leaf_of: dict[int, int]  # base vertex -> attached tree leaf
    tree_parent: dict[int, tuple[int, int]]  # tree vertex -> (parent, edge id)
    children: dict[int, tuple[int, ...]]


def gen_lower_bound(a: int, base: Graph | None = None, base_girth: int | None = None) -> LowerBoundInstance:
    """Base graph (K_{a,a} unless given) with a balanced zero-weight binary tree
    hanging from the source, one leaf per base vertex."""
    if base is None:
        if a < 2:
            raise ValueError("need a >= 2")
        base = complete_bipartite(a)
        base_girth = 4
    elif base_girth is None:
        base_girth = int(girth(base))
    if base_girth % 2:
        raise ValueError("girth must be even")
    eta = base.n
    x = base_girth / 2 - 1
    edges: list[Edge] = []
    parent: dict[int, tuple[int, int]] = {}
    children: dict[int, tuple[int, ...]] = {}
    leaves: list[int] = []
    counter = [0]

    def grow(count: int) -> tuple[int, int]:
        v = counter[0]
        counter[0] += 1
        if count == 1:
            leaves.append(v)
            children[v] = ()
            return v, 0
        left, hl = grow(count // 2)
        right, hr = grow(count - count // 2)
        for c in (left, right):
            eid = len(edges)
            edges.append(Edge(eid, v, c, 0.0))
            parent[c] = (v, eid)
        children[v] = (left, right)
        return v, 1 + max(hl, hr)

    root, height = grow(eta)
    offset = counter[0]
    base_vertices = tuple(range(offset, offset + eta))
    leaf_of = {}
    for i, leaf in enumerate(leaves):
        eid = len(edges)
        edges.append(Edge(eid, leaf, offset + i, x))
        leaf_of[offset + i] = leaf
    base_ids = []
    for e in base.edges:
        eid = len(edges)
        edges.append(Edge(eid, offset + e.u, offset + e.v, e.weight))
        base_ids.append(eid)
    g = Graph(offset + eta, edges, root)
    kappa = (base_girth - 2) // 2
    return LowerBoundInstance(
        g, root, eta, base_girth, kappa, x, height, base_vertices, tuple(base_ids),
        leaf_of, parent, children,
    )


def adversarial_failure_set(inst: LowerBoundInstance, e: int) -> frozenset[int]:
    """Sibling tree edges along the source-to-leaf path above ``e``'s first endpoint."""
    if e not in inst.base_edges:
        raise ValueError(f"edge {e} is not a base edge")
    u = inst.graph.edges[e].u
    leaf = inst.leaf_of[u]
    out = set()
    x = leaf
    while x in inst.tree_parent:
        p, _ = inst.tree_parent[x]
        for c in inst.children[p]:
            if c != x:
                out.add(inst.tree_parent[c][1])
        x = p
    return frozenset(out)
