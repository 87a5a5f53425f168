"""Minimum spanning forest sensitivity oracle for batches of edge updates.

Preprocessing augments the graph with a connector vertex, takes the canonical
MST, reduces it to maximum degree 3, clusters it hierarchically and indexes
every non-tree edge by the cluster pairs it crosses.  A query splits clusters
until each deleted edge crosses two of them, solves an MST over the handful of
surviving clusters, then replays insertions on a dynamic forest built over a
compressed view of the relevant tree paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from ftoracle.dyn_forest import DynamicForest
from ftoracle.graph_core import (
    Edge,
    Graph,
    Tier,
    UnionFind,
    augment_with_dummy,
    edge_key,
    kruskal_msf,
)
from ftoracle.hierarchy import (
    ClusterHierarchy,
    CrossEdgeDictionary,
    ReducedInstance,
    build_clustering,
    build_cross_lists,
    canonical_ranks,
    reduce_degree,
)
from ftoracle.lca import LcaOracle


class BatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# update batches


@dataclass(frozen=True)
class UpdateBatch:
    """Simultaneous updates; ``insertions`` hold 0-based ``(u, v, w)``."""

    deletions: frozenset[int] = frozenset()
    insertions: tuple[tuple[int, int, float], ...] = ()
    weight_changes: tuple[tuple[int, float], ...] = ()

    @property
    def k(self) -> int:
        return len(self.deletions) + len(self.insertions) + len(self.weight_changes)

    @classmethod
    def from_ops(cls, g: Graph, ops: Iterable[Sequence]) -> "UpdateBatch":
        """Build from ``('d', u, v)``, ``('i', u, v, w)``, ``('c', u, v, w)`` tuples."""
        dels: list[int] = []
        ins: list[tuple[int, int, float]] = []
        chg: list[tuple[int, float]] = []
        for op in ops:
            kind = op[0]
            if kind == "i":
                ins.append((int(op[1]), int(op[2]), float(op[3])))
                continue
            eid = g.edge_between(int(op[1]), int(op[2]))
            if eid is None:
                raise BatchError(f"no edge between {op[1]} and {op[2]}")
            if kind == "d":
                if eid in dels:
                    raise BatchError(f"edge {eid} updated twice")
                dels.append(eid)
            elif kind == "c":
                chg.append((eid, float(op[3])))
            else:
                raise BatchError(f"unknown update kind {kind!r}")
        return cls(frozenset(dels), tuple(ins), tuple(chg)).normalized(g)

    def normalized(self, g: Graph) -> "UpdateBatch":
        """Validate against ``g``; a deletion plus an insertion on the same pair
        becomes a weight change."""
        dels = set()
        for eid in self.deletions:
            if not 0 <= eid < g.m:
                raise BatchError(f"unknown edge id {eid}")
            dels.add(eid)
        changes: dict[int, float] = {}
        for eid, w in self.weight_changes:
            if not 0 <= eid < g.m:
                raise BatchError(f"unknown edge id {eid}")
            if eid in changes or eid in dels:
                raise BatchError(f"edge {eid} updated twice")
            if not math.isfinite(w):
                raise BatchError("weight must be finite")
            changes[eid] = float(w)
        ins: list[tuple[int, int, float]] = []
        pairs: set[tuple[int, int]] = set()
        for u, v, w in self.insertions:
            if u == v:
                raise BatchError(f"insertion of self-loop on {u}")
            if not (0 <= u < g.n and 0 <= v < g.n):
                raise BatchError(f"insertion endpoint out of range: ({u}, {v})")
            if not math.isfinite(w):
                raise BatchError("weight must be finite")
            p = (u, v) if u < v else (v, u)
            if p in pairs:
                raise BatchError(f"parallel insertion {p}")
            pairs.add(p)
            eid = g.edge_between(u, v)
            if eid is not None:
                if eid in dels:
                    dels.discard(eid)
                    changes[eid] = float(w)
                    continue
                raise BatchError(f"insertion {p} parallel to edge {eid}")
            ins.append((u, v, float(w)))
        return UpdateBatch(frozenset(dels), tuple(ins), tuple(sorted(changes.items())))


def parse_batch(text: str, g: Graph) -> UpdateBatch:
    """Read ``d u v`` / ``i u v w`` / ``c u v w`` lines (1-based vertices)."""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        want = {"d": 3, "i": 4, "c": 4}.get(kind)
        if want is None or len(parts) != want:
            raise BatchError(f"line {lineno}: malformed update {line!r}")
        try:
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            w = float(parts[3]) if want == 4 else None
        except ValueError:
            raise BatchError(f"line {lineno}: malformed update {line!r}") from None
        if not (0 <= u < g.n and 0 <= v < g.n):
            raise BatchError(f"line {lineno}: vertex out of range")
        ops.append((kind, u, v) if w is None else (kind, u, v, w))
    try:
        return UpdateBatch.from_ops(g, ops)
    except BatchError as exc:
        raise BatchError(str(exc)) from None


def compose_updates(g: Graph, ops: Iterable[Sequence]) -> UpdateBatch:
    """Net effect of applying ``ops`` one after another, as a single batch."""
    state: dict[tuple[int, int], float | None] = {}
    for op in ops:
        kind, u, v = op[0], int(op[1]), int(op[2])
        p = (u, v) if u < v else (v, u)
        if p in state:
            cur = state[p]
        else:
            eid = g.edge_between(u, v)
            cur = None if eid is None else g.edges[eid].weight
        if kind == "d":
            if cur is None:
                raise BatchError(f"delete of absent edge {p}")
            state[p] = None
        elif kind == "i":
            if cur is not None:
                raise BatchError(f"insert parallel to present edge {p}")
            state.pop(p, None)
            state[p] = float(op[3])
        elif kind == "c":
            if cur is None:
                raise BatchError(f"weight change of absent edge {p}")
            state[p] = float(op[3])
        else:
            raise BatchError(f"unknown update kind {kind!r}")
    dels, changes, ins = set(), [], []
    for (u, v), w in state.items():
        eid = g.edge_between(u, v)
        if eid is None:
            if w is not None:
                ins.append((u, v, w))
        elif w is None:
            dels.add(eid)
        elif w != g.edges[eid].weight:
            changes.append((eid, w))
    return UpdateBatch(frozenset(dels), tuple(ins), tuple(sorted(changes)))


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class QueryStats:
    clusters: int = 0  # |R|
    probes: int = 0  # pair lookups plus list entries scanned
    touches: int = 0  # probes plus aux-MST and forest work


@dataclass(frozen=True)
class MstDelta:
    removed: frozenset[int]
    added: tuple[Edge, ...]  # inserted edges get ids m, m+1, ... in batch order
    stats: QueryStats = field(default=QueryStats(), compare=False)

    @property
    def added_ids(self) -> frozenset[int]:
        return frozenset(e.id for e in self.added)

    def apply(self, base: Iterable[int]) -> frozenset[int]:
        return (frozenset(base) - self.removed) | self.added_ids


# ---------------------------------------------------------------------------
# oracle


class MsfOracle:
    """Immutable after construction; every query runs in a private session."""

    def __init__(self, g: Graph):
        self.graph = g
        self.n = g.n
        self.m = g.m
        aug = augment_with_dummy(g)
        base = kruskal_msf(aug)
        self.connector = g.n
        red = reduce_degree(aug, base, root=self.connector)
        self.reduced: ReducedInstance = red
        gh = red.graph
        self.hgraph = gh
        self.base_msf = frozenset(e for e in base if e < g.m)
        self.hierarchy: ClusterHierarchy = build_clustering(red.tree)
        rank, edge_by_rank = canonical_ranks(gh)
        self.rank = rank
        self.edge_by_rank = edge_by_rank
        in_tree = np.zeros(gh.m, dtype=bool)
        in_tree[list(red.tree_edges)] = True
        self.in_tree = in_tree
        include = in_tree.copy()
        include[: g.m] = True
        self.dictionary: CrossEdgeDictionary = build_cross_lists(
            gh, self.hierarchy, include=include, ranks=(rank, edge_by_rank)
        )
        # cheapest non-tree connector edge into each cluster (kept out of the lists)
        big = np.iinfo(np.int64).max
        val = np.full(gh.n, big, dtype=np.int64)
        dummy_ids = np.arange(g.m, g.m + g.n)
        free = ~in_tree[dummy_ids]
        val[np.arange(g.n)[free]] = rank[dummy_ids[free]]
        best = np.full(self.hierarchy.num_clusters, big, dtype=np.int64)
        for lvl in range(self.hierarchy.height + 1):
            np.minimum.at(best, self.hierarchy.chains[:, lvl], val)
        self._dummy_best = best
        self._big = big

        self.lca = LcaOracle(red.tree.parent)
        self._tparent = red.tree.parent
        depth = self.lca.depth
        self._depth = depth
        dummy_side = [False] * gh.n
        dummy_side[self.connector] = True
        for v, c in red.vertex_map.items():
            if c == self.connector:
                dummy_side[v] = True
        self._dummy_side = dummy_side
        # binary lifting for heaviest base edge on a vertical path
        par = np.asarray(red.tree.parent, dtype=np.int64)
        pe = np.asarray(red.parent_edge, dtype=np.int64)
        root = red.tree.root
        par[root] = root
        mx = np.where(pe >= 0, rank[np.maximum(pe, 0)], -1)
        ups, mxs = [par], [mx]
        span = 1
        while span < max(depth, default=0) + 1:
            u, w = ups[-1], mxs[-1]
            ups.append(u[u])
            mxs.append(np.maximum(w, w[u]))
            span *= 2
        self._ups = ups
        self._mxs = mxs

    # -- helpers ------------------------------------------------------------

    @property
    def height(self) -> int:
        return self.hierarchy.height

    @property
    def max_children(self) -> int:
        return self.hierarchy.max_children

    def vertical_max(self, v: int, anc: int) -> int:
        """Edge id of the heaviest base-tree edge between ``v`` and its ancestor."""
        steps = self._depth[v] - self._depth[anc]
        best = -1
        k = 0
        while steps:
            if steps & 1:
                best = max(best, int(self._mxs[k][v]))
                v = int(self._ups[k][v])
            steps >>= 1
            k += 1
        return int(self.edge_by_rank[best])

    def user_edge(self, eid: int) -> Edge:
        return self.graph.edges[eid]

    def session(self, deletions: Iterable[int]) -> "QuerySession":
        """Deletion session over internal edge ids (user ids for real edges)."""
        return QuerySession(self, frozenset(deletions))

    def query(self, batch: UpdateBatch) -> MstDelta:
        return query(self, batch)


def build_oracle(g: Graph) -> MsfOracle:
    return MsfOracle(g)


class QuerySession:
    """Split overlay, auxiliary cluster graph and its MST for one deletion set."""

    def __init__(self, oracle: MsfOracle, deleted: frozenset[int]):
        self.o = oracle
        for eid in deleted:
            if not 0 <= eid < oracle.m:
                raise BatchError(f"unknown edge id {eid}")
        self.deleted = deleted
        self.opened: set[int] = set()
        self.probes = 0
        self.work = 0
        self._root_cache: dict[int, int] = {}
        self._bfs_cache: dict[int, dict[int, tuple[int, int]]] = {}
        self.roots = split_clusters(self, deleted)
        self.candidates = build_aux_graph(self, deleted)
        self.aux_tree = self._aux_msf()

    def root(self, v: int) -> int:
        c = self._root_cache.get(v)
        if c is None:
            for cid in reversed(self.o.hierarchy.chains[v].tolist()):
                if cid not in self.opened:
                    c = cid
                    break
            self._root_cache[v] = c
        return c

    def _aux_msf(self) -> list[tuple[int, int, int]]:
        index = {c: i for i, c in enumerate(self.roots)}
        uf = UnionFind(len(self.roots))
        out = []
        for r, ca, cb in sorted(self.candidates):
            self.work += 1
            if uf.union(index[ca], index[cb]):
                out.append((int(self.o.edge_by_rank[r]), ca, cb))
                if len(out) == len(self.roots) - 1:
                    break
        self._aux_adj: dict[int, list[tuple[int, int]]] = {c: [] for c in self.roots}
        for eid, ca, cb in out:
            self._aux_adj[ca].append((cb, eid))
            self._aux_adj[cb].append((ca, eid))
        return out

    @property
    def aux_edges(self) -> list[int]:
        return [eid for eid, _, _ in self.aux_tree]

    def current_tree_edges(self) -> frozenset[int]:
        """Intra-cluster base-tree edges plus the auxiliary MST edges."""
        o = self.o
        out = set(self.aux_edges)
        for eid in o.reduced.tree_edges:
            e = o.hgraph.edges[eid]
            if self.root(e.u) == self.root(e.v):
                out.add(eid)
        return frozenset(out)

    def _aux_parents(self, start: int) -> dict[int, tuple[int, int]]:
        got = self._bfs_cache.get(start)
        if got is None:
            got = {start: (-1, -1)}
            queue = [start]
            for c in queue:
                for d, eid in self._aux_adj[c]:
                    if d not in got:
                        got[d] = (c, eid)
                        queue.append(d)
            self._bfs_cache[start] = got
        return got

    def path_new_edges(self, u: int, v: int) -> list[tuple[Edge, int, int]] | None:
        """Non-base edges on the u-v path of the post-deletion MSF, in order from
        ``u``, as ``(edge, near, far)``; None when u and v are disconnected."""
        o = self.o
        cu, cv = self.root(u), self.root(v)
        parents = self._aux_parents(cu)
        hops: list[int] = []
        c = cv
        while c != cu:
            c, eid = parents[c]
            hops.append(eid)
        hops.reverse()
        edges = o.hgraph.edges
        dummy_side = o._dummy_side
        out = []
        cur = u
        c = cu
        for eid in hops:
            e = edges[eid]
            if e.tier == Tier.DUMMY:
                return None
            near, far = (e.u, e.v) if self.root(e.u) == c else (e.v, e.u)
            if dummy_side[o.lca.lca(cur, near)]:
                return None
            if not o.in_tree[eid]:
                out.append((e, near, far))
            cur = far
            c = self.root(far)
        if dummy_side[o.lca.lca(cur, v)]:
            return None
        return out


def split_clusters(s: QuerySession, deletions: Iterable[int]) -> list[int]:
    """Open clusters until every deleted edge has its endpoints in distinct roots."""
    o = s.o
    chains = o.hierarchy.chains
    opened = s.opened
    edges = o.hgraph.edges
    for eid in sorted(deletions):
        e = edges[eid]
        cu = chains[e.u].tolist()
        cv = chains[e.v].tolist()
        for lvl in range(len(cu) - 1, -1, -1):
            if cu[lvl] != cv[lvl]:
                break
            opened.add(cu[lvl])
    s._root_cache.clear()
    h = o.hierarchy
    roots = [] if h.top in opened else [h.top]
    for c in opened:
        roots.extend(ch for ch in h.children[c] if ch not in opened)
    roots.sort()
    return roots


def build_aux_graph(s: QuerySession, deletions: Iterable[int]) -> list[tuple[int, int, int]]:
    """Cheapest surviving crossing edge per root pair, as ``(rank, C, C')``."""
    o = s.o
    dead = frozenset(deletions)
    roots = np.asarray(s.roots, dtype=np.int64)
    if len(roots) < 2:
        return []
    ii, jj = np.triu_indices(len(roots), 1)
    a, b = roots[ii], roots[jj]
    d = o.dictionary
    slots = d.slots(a, b)
    s.probes += len(a)
    found = slots >= 0
    big = o._big
    cand = np.full(len(a), big, dtype=np.int64)
    if found.any():
        fs = slots[found]
        starts = d.offsets[fs]
        first = d.ranks[starts].astype(np.int64)
        s.probes += len(fs)
        cand[found] = first
        if dead:
            dead_ranks = np.asarray(sorted(int(o.rank[e]) for e in dead), dtype=np.int64)
            hit = np.isin(first, dead_ranks)
            if hit.any():
                idx = np.flatnonzero(found)[hit]
                dead_set = set(dead_ranks.tolist())
                for i, slot in zip(idx.tolist(), fs[hit].tolist()):
                    lo, hi = d.span(slot)
                    r = big
                    for pos in range(lo + 1, hi):
                        s.probes += 1
                        rr = int(d.ranks[pos])
                        if rr not in dead_set:
                            r = rr
                            break
                    cand[i] = r
    xr = s.root(o.connector)
    at_x = a == xr
    cand[at_x] = np.minimum(cand[at_x], o._dummy_best[b[at_x]])
    at_x = b == xr
    cand[at_x] = np.minimum(cand[at_x], o._dummy_best[a[at_x]])
    keep = cand < big
    return list(zip(cand[keep].tolist(), a[keep].tolist(), b[keep].tolist()))


def path_new_edges(
    o: MsfOracle, deletions: Iterable[int], u: int, v: int
) -> list[tuple[Edge, int, int]] | None:
    return o.session(deletions).path_new_edges(u, v)


# ---------------------------------------------------------------------------
# batch query


class _Ledger:
    """Nets MSF entries and exits into a symmetric difference."""

    def __init__(self) -> None:
        self.removed: set = set()
        self.added: set = set()

    def enter(self, ident) -> None:
        if ident in self.removed:
            self.removed.discard(ident)
        else:
            self.added.add(ident)

    def leave(self, ident) -> None:
        if ident in self.added:
            self.added.discard(ident)
        else:
            self.removed.add(ident)


def query(o: MsfOracle, batch: UpdateBatch) -> MstDelta:
    batch = batch.normalized(o.graph)
    changes = dict(batch.weight_changes)
    doomed = set(batch.deletions) | set(changes)
    s = o.session(doomed)
    led = _Ledger()
    for eid in doomed:
        if o.in_tree[eid]:
            led.leave(eid)
    for eid in s.aux_edges:
        if not o.in_tree[eid]:
            led.enter(eid)

    hedges = o.hgraph.edges
    inserts = []  # (a, b, key, handle, identity)
    for eid, w in sorted(changes.items()):
        e = hedges[eid]
        inserts.append((e.u, e.v, (int(Tier.REAL), w, eid), ("c", eid), eid))
    base = o.hgraph.m
    for j, (u, v, w) in enumerate(batch.insertions):
        inserts.append((u, v, (int(Tier.REAL), w, base + j), ("n", j), ("n", j)))

    work = 0
    if inserts:
        forest = DynamicForest()
        terminals: dict[int, set[int]] = {}
        for eid, ca, cb in s.aux_tree:
            e = hedges[eid]
            terminals.setdefault(s.root(e.u), set()).add(e.u)
            terminals.setdefault(s.root(e.v), set()).add(e.v)
            forest.link(e.u, e.v, eid, edge_key(e))
        for a, b, *_ in inserts:
            terminals.setdefault(s.root(a), set()).add(a)
            terminals.setdefault(s.root(b), set()).add(b)
        for group in terminals.values():
            work += _link_virtual_tree(o, forest, group)
        for a, b, key, handle, ident in inserts:
            work += 1
            top = forest.path_max(a, b)
            if top is not None:
                if forest.key_of(top) < key:
                    continue
                forest.cut(top)
                led.leave(top if isinstance(top, int) else _ident_of(top))
            forest.link(a, b, handle, key)
            led.enter(ident)

    removed = frozenset(e for e in led.removed if isinstance(e, int) and e < o.m)
    added: list[Edge] = []
    for ident in led.added:
        if isinstance(ident, tuple):
            j = ident[1]
            u, v, w = batch.insertions[j]
            added.append(Edge(o.m + j, u, v, w))
        elif ident < o.m:
            e = o.graph.edges[ident]
            if ident in changes:
                e = Edge(e.id, e.u, e.v, changes[ident], e.tier)
            added.append(e)
    added.sort(key=lambda e: e.id)
    stats = QueryStats(len(s.roots), s.probes, s.probes + s.work + work)
    return MstDelta(removed, tuple(added), stats)


def _ident_of(handle):
    return handle[1] if handle[0] == "c" else handle


def _link_virtual_tree(o: MsfOracle, forest: DynamicForest, group: set[int]) -> int:
    """Link the compressed tree spanning ``group`` inside one root cluster."""
    lca = o.lca
    pts = sorted(group, key=lca.first.__getitem__)
    extra = {lca.lca(a, b) for a, b in zip(pts, pts[1:])}
    pts = sorted(set(pts) | extra, key=lca.first.__getitem__)
    stack: list[int] = []
    hedges = o.hgraph.edges
    for v in pts:
        forest.add_vertex(v)
        while stack and not lca.is_ancestor(stack[-1], v):
            stack.pop()
        if stack:
            eid = o.vertical_max(v, stack[-1])
            forest.link(stack[-1], v, eid, edge_key(hedges[eid]))
        stack.append(v)
    return len(pts)


def dynamic_session(o: MsfOracle, updates: Sequence[Sequence]) -> Iterator[MstDelta]:
    """Delta of the first ``i`` updates for every prefix, as separate queries."""
    for i in range(1, len(updates) + 1):
        yield query(o, compose_updates(o.graph, updates[:i]))
