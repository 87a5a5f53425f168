"""Degree reduction, leveled tree clustering, and cross-cluster edge lists.

The clustering is built bottom-up: at every level the deepest internal vertex
of the working tree is grouped with its children (or, when only its parent is
left over, with everything that remains), the groups are contracted, and the
process repeats until one cluster is left.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ftoracle.graph_core import Edge, Graph, Tier, edge_key


class HierarchyError(ValueError):
    pass


@dataclass(frozen=True)
class RootedTree:
    n: int
    parent: tuple[int, ...]  # -1 at the root
    root: int

    @classmethod
    def from_edges(cls, n: int, pairs, root: int = 0) -> "RootedTree":
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in pairs:
            adj[a].append(b)
            adj[b].append(a)
        parent = [-2] * n
        parent[root] = -1
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if parent[y] == -2:
                    parent[y] = x
                    stack.append(y)
        if -2 in parent:
            raise HierarchyError("edges do not span a tree")
        return cls(n, tuple(parent), root)

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return ch

    def bfs_order(self) -> list[int]:
        ch = self.children()
        order = [self.root]
        for x in order:
            order.extend(ch[x])
        return order

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for v, p in enumerate(self.parent):
            if p >= 0:
                deg[v] += 1
                deg[p] += 1
        return deg


@dataclass(frozen=True)
class ReducedInstance:
    graph: Graph
    tree_edges: frozenset[int]
    tree: RootedTree
    parent_edge: tuple[int, ...]  # edge id to the parent, -1 at the root
    surrogates: dict[int, Edge]  # original tree edge id -> surrogate (same id)
    vertex_map: dict[int, int]  # gadget vertex -> center vertex it replaces
    n_original: int

    def original_vertex(self, v: int) -> int:
        return self.vertex_map.get(v, v)


def reduce_degree(g: Graph, tree: frozenset[int] | set[int], root: int = 0) -> ReducedInstance:
    """Replace the child fan of every vertex with more than two tree children.

    Each such center ``u`` gets a balanced binary gadget tree whose leaves
    ``x_i`` take over the original edges as ``(x_i, v_i)``; surrogates keep the
    original id, weight and tier, gadget edges use the gadget tier.
    """
    if g.n == 0:
        raise HierarchyError("empty graph")
    rt = RootedTree.from_edges(g.n, [(g.edges[e].u, g.edges[e].v) for e in tree], root)
    if len(tree) != g.n - 1:
        raise HierarchyError("tree must span the graph")
    parent_edge = [-1] * g.n
    for eid in tree:
        e = g.edges[eid]
        child = e.u if rt.parent[e.u] == e.v else e.v
        parent_edge[child] = eid
    children = rt.children()
    edges: list[Edge] = list(g.edges)
    parent = list(rt.parent)
    tree_ids = set(tree)
    surrogates: dict[int, Edge] = {}
    vertex_map: dict[int, int] = {}
    nv = g.n

    for u in range(g.n):
        kids = children[u]
        if len(kids) <= 2:
            continue
        leaves: list[int] = []

        def grow(count: int, attach: int) -> None:
            nonlocal nv
            x = nv
            nv += 1
            vertex_map[x] = u
            parent.append(attach)
            eid = len(edges)
            edges.append(Edge(eid, attach, x, 0.0, Tier.GADGET))
            parent_edge.append(eid)
            tree_ids.add(eid)
            if count == 1:
                leaves.append(x)
                return
            half = count // 2
            grow(half, x)
            grow(count - half, x)

        half = len(kids) // 2
        grow(half, u)
        grow(len(kids) - half, u)
        for x, v in zip(leaves, kids):
            old = edges[parent_edge[v]]
            sur = Edge(old.id, x, v, old.weight, old.tier)
            edges[old.id] = sur
            surrogates[old.id] = sur
            parent[v] = x

    graph = Graph(nv, edges, g.source)
    rtree = RootedTree(nv, tuple(parent), root)
    return ReducedInstance(
        graph, frozenset(tree_ids), rtree, tuple(parent_edge), surrogates, vertex_map, g.n
    )


# ---------------------------------------------------------------------------
# clustering


@dataclass
class ClusterHierarchy:
    """Cluster ``v`` at level 0 is the singleton ``{v}``; higher ids follow."""

    n: int
    level: list[int]
    parent: list[int]
    children: list[list[int]]
    chains: np.ndarray  # (n, L+1): cluster of each vertex per level
    top: int
    _members: dict[int, frozenset[int]] = field(default_factory=dict, repr=False)

    @property
    def height(self) -> int:
        return self.chains.shape[1] - 1

    @property
    def num_clusters(self) -> int:
        return len(self.level)

    @property
    def max_children(self) -> int:
        return max((len(c) for c in self.children), default=0)

    def clusters_at(self, lvl: int) -> list[int]:
        return [c for c, l in enumerate(self.level) if l == lvl]

    def members(self, cid: int) -> frozenset[int]:
        got = self._members.get(cid)
        if got is None:
            if self.level[cid] == 0:
                got = frozenset((cid,))
            else:
                acc: set[int] = set()
                for c in self.children[cid]:
                    acc |= self.members(c)
                got = frozenset(acc)
            self._members[cid] = got
        return got

    def dump(self) -> str:
        """Indented text rendering, top cluster first."""
        out: list[str] = []
        stack = [(self.top, 0)]
        while stack:
            c, depth = stack.pop()
            label = ",".join(str(v) for v in sorted(self.members(c)))
            out.append(f"{'  ' * depth}L{self.level[c]} #{c}: {{{label}}}")
            for ch in reversed(self.children[c]):
                stack.append((ch, depth + 1))
        return "\n".join(out)


def clusters_of(h: ClusterHierarchy, u: int) -> list[int]:
    """Chain of clusters containing ``u``, bottom-up (length L+1)."""
    return [int(c) for c in h.chains[u]]


def build_clustering(tree: RootedTree, max_degree: int | None = 3) -> ClusterHierarchy:
    if tree.n == 0:
        raise HierarchyError("empty tree")
    if max_degree is not None:
        deg = tree.degrees()
        worst = max(deg)
        if worst > max_degree:
            raise HierarchyError(f"tree degree {worst} exceeds {max_degree}")

    level = [0] * tree.n
    cparent = [-1] * tree.n
    children: list[list[int]] = [[] for _ in range(tree.n)]
    # working tree over current-level cluster ids, held as a parent map
    ids = list(range(tree.n))
    wpar = list(tree.parent)
    wroot = tree.root
    level_base = [0]
    positions = list(range(tree.n))  # vertex -> position in current working tree
    vertex_pos_by_level: list[list[int]] = [positions]
    lvl = 0
    while len(ids) > 1:
        lvl += 1
        k = len(ids)
        kids: list[list[int]] = [[] for _ in range(k)]
        for x in range(k):
            p = wpar[x]
            if p >= 0:
                kids[p].append(x)
        order = [wroot]
        for x in order:
            order.extend(kids[x])
        alive = [True] * k
        n_alive = k
        group = [-1] * k
        groups: list[list[int]] = []
        for v in reversed(order):
            if not alive[v]:
                continue
            live_kids = [c for c in kids[v] if alive[c]]
            if not live_kids:
                if v == wroot:
                    raise HierarchyError("stranded root during clustering")
                continue
            p = wpar[v]
            if p >= 0 and n_alive == len(live_kids) + 2:
                members = [v, *live_kids, p]
            else:
                members = [v, *live_kids]
            gid = len(groups)
            groups.append(members)
            for x in members:
                alive[x] = False
                group[x] = gid
            n_alive -= len(members)
        base = len(level)
        for gid, members in enumerate(groups):
            cid = base + gid
            level.append(lvl)
            cparent.append(-1)
            children.append([ids[x] for x in members])
            for x in members:
                cparent[ids[x]] = cid
        new_par = [-1] * len(groups)
        for x in range(k):
            p = wpar[x]
            if p >= 0 and group[p] != group[x]:
                new_par[group[x]] = group[p]
        ids = [base + gid for gid in range(len(groups))]
        wroot = group[wroot]
        wpar = new_par
        level_base.append(base)
        positions = [group[p] for p in positions]
        vertex_pos_by_level.append(positions)

    nlev = lvl + 1
    dtype = np.int32 if len(level) < 2**31 else np.int64
    chains = np.empty((tree.n, nlev), dtype=dtype)
    chains[:, 0] = np.arange(tree.n)
    for i in range(1, nlev):
        chains[:, i] = level_base[i] + np.asarray(vertex_pos_by_level[i], dtype=np.int64)
    top = int(chains[0, -1])
    return ClusterHierarchy(tree.n, level, cparent, children, chains, top)


# ---------------------------------------------------------------------------
# cross-cluster edge lists

_HASH_MUL = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class CrossEdgeDictionary:
    """Sorted edge lists ``E(C, C')`` keyed by unordered cluster pair.

    Lists live in one flat array (CSR layout); keys are found through an
    open-addressing hash table with linear probing.
    """

    def __init__(
        self,
        num_clusters: int,
        keys: np.ndarray,
        offsets: np.ndarray,
        ranks: np.ndarray,
        edge_by_rank: np.ndarray,
    ):
        self.num_clusters = num_clusters
        self.keys = keys
        self.offsets = offsets
        self.ranks = ranks
        self.edge_by_rank = edge_by_rank
        cap = 1
        while cap < 2 * max(len(keys), 1):
            cap <<= 1
        self._bits = cap.bit_length() - 1
        self._mask = cap - 1
        self._slot_key = np.full(cap, -1, dtype=np.int64)
        self._slot_val = np.zeros(cap, dtype=np.int64)
        self._fill()
        self._slot_key_get = self._slot_key.item
        self._slot_val_get = self._slot_val.item

    def _hash_array(self, k: np.ndarray) -> np.ndarray:
        if self._bits == 0:
            return np.zeros(len(k), dtype=np.int64)
        h = k.astype(np.uint64) * np.uint64(_HASH_MUL)
        return (h >> np.uint64(64 - self._bits)).astype(np.int64)

    def _hash(self, k: int) -> int:
        if self._bits == 0:
            return 0
        return ((k * _HASH_MUL) & _MASK64) >> (64 - self._bits)

    def _fill(self) -> None:
        keys = self.keys
        pos = self._hash_array(keys)
        pending = np.arange(len(keys))
        while len(pending):
            p = pos[pending]
            empty = self._slot_key[p] == -1
            cand = pending[empty]
            cp = p[empty]
            if len(cand):
                _, first = np.unique(cp, return_index=True)
                win = cand[first]
                self._slot_key[cp[first]] = keys[win]
                self._slot_val[cp[first]] = win
                placed = np.zeros(len(keys), dtype=bool)
                placed[win] = True
                pending = pending[~placed[pending]]
            pos[pending] = (pos[pending] + 1) & self._mask

    def pair_key(self, a: int, b: int) -> int:
        return a * self.num_clusters + b if a < b else b * self.num_clusters + a

    def slot(self, a: int, b: int) -> int | None:
        """Index of the pair's list, or None when no edge crosses the pair."""
        k = self.pair_key(a, b)
        i = self._hash(k)
        get = self._slot_key_get
        while True:
            sk = get(i)
            if sk == k:
                return self._slot_val_get(i)
            if sk == -1:
                return None
            i = (i + 1) & self._mask

    def slots(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized ``slot``; -1 where the pair has no list."""
        nc = self.num_clusters
        k = np.minimum(a, b).astype(np.int64) * nc + np.maximum(a, b)
        out = np.full(len(k), -1, dtype=np.int64)
        pos = self._hash_array(k)
        todo = np.arange(len(k))
        while len(todo):
            p = pos[todo]
            sk = self._slot_key[p]
            hit = sk == k[todo]
            out[todo[hit]] = self._slot_val[p[hit]]
            todo = todo[~hit & (sk != -1)]
            pos[todo] = (pos[todo] + 1) & self._mask
        return out

    def span(self, slot: int) -> tuple[int, int]:
        return int(self.offsets[slot]), int(self.offsets[slot + 1])

    def edges(self, a: int, b: int) -> list[int]:
        s = self.slot(a, b)
        if s is None:
            return []
        lo, hi = self.span(s)
        return [int(self.edge_by_rank[r]) for r in self.ranks[lo:hi]]

    def pairs(self):
        nc = self.num_clusters
        for i, k in enumerate(self.keys.tolist()):
            lo, hi = int(self.offsets[i]), int(self.offsets[i + 1])
            yield (k // nc, k % nc), [int(self.edge_by_rank[r]) for r in self.ranks[lo:hi]]

    @property
    def total_entries(self) -> int:
        return len(self.ranks)

    def __len__(self) -> int:
        return len(self.keys)


def canonical_ranks(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """(rank of each edge id, edge id of each rank) under the canonical order."""
    order = sorted(range(g.m), key=lambda i: edge_key(g.edges[i]))
    edge_by_rank = np.asarray(order, dtype=np.int64)
    rank = np.empty(g.m, dtype=np.int64)
    rank[edge_by_rank] = np.arange(g.m)
    return rank, edge_by_rank


def build_cross_lists(
    g: Graph,
    h: ClusterHierarchy,
    *,
    include: np.ndarray | None = None,
    ranks: tuple[np.ndarray, np.ndarray] | None = None,
) -> CrossEdgeDictionary:
    """Insert every edge into each cluster pair of its endpoint chains below their LCA.

    ``include`` is an optional boolean mask over edge ids.
    """
    rank, edge_by_rank = ranks if ranks is not None else canonical_ranks(g)
    nc = h.num_clusters
    if g.m:
        uv = np.array([(e.u, e.v) for e in g.edges], dtype=np.int64)
    else:
        uv = np.zeros((0, 2), dtype=np.int64)
    sel = np.arange(g.m) if include is None else np.flatnonzero(include)
    U, V = uv[sel, 0], uv[sel, 1]
    R = rank[sel]
    CU = h.chains[U].astype(np.int64)
    CV = h.chains[V].astype(np.int64)
    lca_level = np.argmax(CU == CV, axis=1) if len(sel) else np.zeros(0, dtype=np.int64)

    rank_bits = max(int(g.m).bit_length(), 1)
    key_bits = max(int(nc * nc).bit_length(), 1)
    packed = key_bits + rank_bits <= 63
    chunks_keys: list[np.ndarray] = []
    chunks_ranks: list[np.ndarray] = []
    top = int(lca_level.max()) if len(lca_level) else 0
    for i in range(top):
        mi = lca_level > i
        for j in range(top):
            mask = mi & (lca_level > j)
            if not mask.any():
                continue
            a = CU[mask, i]
            b = CV[mask, j]
            k = np.minimum(a, b) * nc + np.maximum(a, b)
            if packed:
                chunks_keys.append((k << rank_bits) | R[mask])
            else:
                chunks_keys.append(k)
                chunks_ranks.append(R[mask])
    if chunks_keys:
        allk = np.concatenate(chunks_keys)
        del chunks_keys
        if packed:
            allk.sort()
            keys_per_entry = allk >> rank_bits
            ranks_sorted = allk & ((1 << rank_bits) - 1)
        else:
            allr = np.concatenate(chunks_ranks)
            order = np.lexsort((allr, allk))
            keys_per_entry = allk[order]
            ranks_sorted = allr[order]
        starts = np.flatnonzero(np.r_[True, keys_per_entry[1:] != keys_per_entry[:-1]])
        keys = keys_per_entry[starts]
        offsets = np.r_[starts, len(keys_per_entry)].astype(np.int64)
        del keys_per_entry
    else:
        keys = np.zeros(0, dtype=np.int64)
        offsets = np.zeros(1, dtype=np.int64)
        ranks_sorted = np.zeros(0, dtype=np.int64)
    rdtype = np.int32 if g.m < 2**31 else np.int64
    return CrossEdgeDictionary(nc, keys, offsets, ranks_sorted.astype(rdtype), edge_by_rank)
