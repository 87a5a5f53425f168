"""Weighted undirected graphs, the canonical edge order, and the two classical
primitives everything else is built on (Dijkstra SPT and Kruskal MSF).

Every minimum spanning forest in the package is computed under one total order
on edges, ``(tier, weight, id)``.  Tiers separate internal helper edges from
real ones: gadget edges (degree reduction) sort before every real edge, dummy
edges (the connectivity vertex) sort after.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

INF = math.inf


class Tier(enum.IntEnum):
    GADGET = 0
    REAL = 1
    DUMMY = 2


class GraphFormatError(ValueError):
    """Malformed graph input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NegativeWeightError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Edge:
    id: int
    u: int
    v: int
    weight: float
    tier: Tier = Tier.REAL

    @property
    def key(self) -> tuple:
        return (int(self.tier), self.weight, self.id)

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


def edge_key(e: Edge) -> tuple:
    return (int(e.tier), e.weight, e.id)


class Graph:
    """Simple undirected graph; ``edges[i].id == i`` always holds.

    Treat instances as immutable once built.
    """

    __slots__ = ("n", "edges", "source", "_adj", "_pairs")

    def __init__(self, n: int, edges: Sequence[Edge], source: int | None = None):
        if n < 0:
            raise GraphFormatError("negative vertex count")
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.source = source
        self._adj: list[list[int]] | None = None
        pairs: dict[tuple[int, int], int] = {}
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise GraphFormatError(f"edge id {e.id} stored at position {i}")
            if e.u == e.v:
                raise GraphFormatError(f"self-loop on vertex {e.u}")
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise GraphFormatError(f"edge {e.id} endpoint out of range")
            p = e.endpoints()
            if p in pairs:
                raise GraphFormatError(f"duplicate edge {p}")
            pairs[p] = i
        self._pairs = pairs
        if source is not None and not 0 <= source < n:
            raise GraphFormatError("source out of range")

    @classmethod
    def from_triples(
        cls, n: int, triples: Iterable[tuple[int, int, float]], source: int | None = None
    ) -> "Graph":
        edges = [Edge(i, int(u), int(v), float(w)) for i, (u, v, w) in enumerate(triples)]
        return cls(n, edges, source)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> list[list[int]]:
        if self._adj is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for e in self.edges:
                adj[e.u].append(e.id)
                adj[e.v].append(e.id)
            self._adj = adj
        return self._adj

    def edge_between(self, u: int, v: int) -> int | None:
        return self._pairs.get((u, v) if u < v else (v, u))

    def with_source(self, source: int | None) -> "Graph":
        return Graph(self.n, self.edges, source)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# text format


def format_weight(w: float) -> str:
    if math.isfinite(w) and w == int(w) and abs(w) < 1e15:
        return str(int(w))
    return repr(float(w))


def parse_graph(text: str) -> Graph:
    """Parse the ``p``/``s``/``e`` line format (1-based vertices)."""
    n = m = None
    source = None
    triples: list[tuple[int, int, float]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None or len(parts) != 3:
                raise GraphFormatError("bad or repeated problem line", lineno)
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError("non-integer size", lineno) from None
            if n < 0 or m < 0:
                raise GraphFormatError("negative size", lineno)
        elif tag == "s":
            if n is None or len(parts) != 2:
                raise GraphFormatError("source line must follow the problem line", lineno)
            try:
                source = int(parts[1]) - 1
            except ValueError:
                raise GraphFormatError("non-integer source", lineno) from None
            if not 0 <= source < n:
                raise GraphFormatError("source out of range", lineno)
        elif tag == "e":
            if n is None:
                raise GraphFormatError("edge before problem line", lineno)
            if len(parts) != 4:
                raise GraphFormatError("edge line needs u v w", lineno)
            try:
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
                w = float(parts[3])
            except ValueError:
                raise GraphFormatError("malformed edge line", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError("vertex index out of range", lineno)
            if u == v:
                raise GraphFormatError("self-loop", lineno)
            if not math.isfinite(w):
                raise GraphFormatError("weight must be finite", lineno)
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphFormatError(f"duplicate edge (first on line {seen[key]})", lineno)
            seen[key] = lineno
            triples.append((u, v, w))
        else:
            raise GraphFormatError(f"unknown line tag {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing problem line")
    if len(triples) != m:
        raise GraphFormatError(f"expected {m} edges, found {len(triples)}")
    return Graph.from_triples(n, triples, source)


def format_graph(g: Graph, source: int | None = None) -> str:
    src = g.source if source is None else source
    lines = [f"p {g.n} {g.m}"]
    if src is not None:
        lines.append(f"s {src + 1}")
    for e in g.edges:
        lines.append(f"e {e.u + 1} {e.v + 1} {format_weight(e.weight)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# shortest paths


@dataclass(frozen=True)
class SptResult:
    source: int
    dist: tuple[float, ...]
    parent_edge: tuple[int | None, ...]
    parent: tuple[int, ...]  # -1 for the source and unreachable vertices
    tree_edges: frozenset[int]
    order: tuple[int, ...] = field(repr=False, default=())  # settle order

    def reachable(self, v: int) -> bool:
        return self.dist[v] < INF

    def tree_path(self, v: int) -> list[int]:
        """Vertices from the source down to ``v`` (empty if unreachable)."""
        if not self.reachable(v):
            return []
        out = [v]
        while out[-1] != self.source:
            out.append(self.parent[out[-1]])
        out.reverse()
        return out


def dijkstra_spt(
    g: Graph,
    s: int,
    *,
    skip: frozenset[int] | set[int] = frozenset(),
    allow_zero: bool = False,
) -> SptResult:
    """Shortest-path tree from ``s``, ignoring edges whose id is in ``skip``.

    Ties on equal tentative distance prefer the canonically smaller edge, so
    the tree is deterministic.
    """
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range")
    for e in g.edges:
        if e.tier == Tier.REAL and (e.weight < 0 or (e.weight == 0 and not allow_zero)):
            raise NegativeWeightError(f"edge {e.id} has nonpositive weight {e.weight}")
    n = g.n
    dist = [INF] * n
    pedge: list[int | None] = [None] * n
    done = [False] * n
    edges = g.edges
    adj = g.adjacency
    dist[s] = 0.0
    heap = [(0.0, s)]
    order = []
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        order.append(x)
        for eid in adj[x]:
            if eid in skip:
                continue
            e = edges[eid]
            y = e.v if e.u == x else e.u
            if done[y]:
                continue
            nd = d + e.weight
            if nd < dist[y]:
                dist[y] = nd
                pedge[y] = eid
                heapq.heappush(heap, (nd, y))
            elif nd == dist[y] and edge_key(e) < edge_key(edges[pedge[y]]):
                pedge[y] = eid
    parent = [-1] * n
    for v in range(n):
        pe = pedge[v]
        if pe is not None:
            parent[v] = edges[pe].other(v)
    tree = frozenset(pe for pe in pedge if pe is not None)
    return SptResult(s, tuple(dist), tuple(pedge), tuple(parent), tree, tuple(order))


# ---------------------------------------------------------------------------
# spanning forests


class UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def msf_of(n: int, keyed: Iterable[tuple[tuple, int, int, int]]) -> list[int]:
    """Kruskal over ``(key, id, u, v)`` records; returns chosen ids in key order."""
    uf = UnionFind(n)
    out = []
    for _, eid, u, v in sorted(keyed):
        if uf.union(u, v):
            out.append(eid)
    return out


def kruskal_msf(
    g: Graph,
    *,
    exclude: Iterable[int] = (),
    weights: Sequence[float] | dict[int, float] | None = None,
) -> frozenset[int]:
    """The unique MSF of ``g`` under the canonical order.

    ``weights`` replaces edge weights in the order key (used for reweighted
    graphs); ``exclude`` drops edges by id.
    """
    skip = set(exclude)
    if weights is None:
        recs = [(edge_key(e), e.id, e.u, e.v) for e in g.edges if e.id not in skip]
    else:
        recs = [
            ((int(e.tier), weights[e.id], e.id), e.id, e.u, e.v)
            for e in g.edges
            if e.id not in skip
        ]
    return frozenset(msf_of(g.n, recs))


def augment_with_dummy(g: Graph) -> Graph:
    """Add a vertex joined to every other vertex by dummy-tier edges.

    The new vertex is ``g.n``; the dummy edge to ``v`` has id ``g.m + v``.
    """
    x = g.n
    extra = [Edge(g.m + v, x, v, 0.0, Tier.DUMMY) for v in range(g.n)]
    return Graph(g.n + 1, list(g.edges) + extra, g.source)
