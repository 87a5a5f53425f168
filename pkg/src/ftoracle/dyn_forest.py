"""Dynamic forests under link/cut with heaviest-edge-on-path queries.

``DynamicForest`` is a link-cut tree (splay-based, amortized O(log n)) in which
every edge is its own node, so path aggregates range over edges only.
``NaiveForest`` answers the same queries by explicit search and exists to
cross-check the fast one.
"""
from __future__ import annotations

from collections import deque
from typing import Any, Hashable


class ForestError(ValueError):
    pass


class DynamicForest:
    def __init__(self) -> None:
        self._left: list[int] = []
        self._right: list[int] = []
        self._par: list[int] = []
        self._rev: list[bool] = []
        self._key: list[Any] = []  # None marks vertex nodes
        self._best: list[int] = []
        self._handle: list[Hashable] = []
        self._vid: dict[Hashable, int] = {}
        self._edges: dict[Hashable, tuple[int, Hashable, Hashable]] = {}
        self._free: list[int] = []

    # -- node storage -------------------------------------------------------

    def _new_node(self, key: Any, handle: Hashable) -> int:
        if self._free:
            x = self._free.pop()
            self._left[x] = self._right[x] = self._par[x] = -1
            self._rev[x] = False
            self._key[x] = key
            self._handle[x] = handle
        else:
            x = len(self._key)
            self._left.append(-1)
            self._right.append(-1)
            self._par.append(-1)
            self._rev.append(False)
            self._key.append(key)
            self._handle.append(handle)
            self._best.append(-1)
        self._best[x] = x if key is not None else -1
        return x

    def _node(self, v: Hashable) -> int:
        x = self._vid.get(v)
        if x is None:
            x = self._new_node(None, v)
            self._vid[v] = x
        return x

    def add_vertex(self, v: Hashable) -> None:
        self._node(v)

    # -- splay machinery ----------------------------------------------------

    def _is_root(self, x: int) -> bool:
        p = self._par[x]
        return p == -1 or (self._left[p] != x and self._right[p] != x)

    def _push(self, x: int) -> None:
        if self._rev[x]:
            left, right, rev = self._left, self._right, self._rev
            a, b = left[x], right[x]
            left[x], right[x] = b, a
            if a != -1:
                rev[a] = not rev[a]
            if b != -1:
                rev[b] = not rev[b]
            rev[x] = False

    def _pull(self, x: int) -> None:
        key, best = self._key, self._best
        b = x if key[x] is not None else -1
        for c in (self._left[x], self._right[x]):
            if c != -1:
                cb = best[c]
                if cb != -1 and (b == -1 or key[cb] > key[b]):
                    b = cb
        best[x] = b

    def _rotate(self, x: int) -> None:
        left, right, par = self._left, self._right, self._par
        y = par[x]
        z = par[y]
        y_root = self._is_root(y)
        if left[y] == x:
            b = right[x]
            left[y] = b
            right[x] = y
        else:
            b = left[x]
            right[y] = b
            left[x] = y
        if b != -1:
            par[b] = y
        if not y_root:
            if left[z] == y:
                left[z] = x
            else:
                right[z] = x
        par[x] = z
        par[y] = x
        self._pull(y)
        self._pull(x)

    def _splay(self, x: int) -> None:
        path = [x]
        y = x
        while not self._is_root(y):
            y = self._par[y]
            path.append(y)
        for y in reversed(path):
            self._push(y)
        par, left = self._par, self._left
        while not self._is_root(x):
            y = par[x]
            if not self._is_root(y):
                z = par[y]
                if (left[y] == x) == (left[z] == y):
                    self._rotate(y)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x: int) -> None:
        last = -1
        y = x
        while y != -1:
            self._splay(y)
            self._right[y] = last
            self._pull(y)
            last = y
            y = self._par[y]
        self._splay(x)

    def _make_root(self, x: int) -> None:
        self._access(x)
        self._rev[x] = not self._rev[x]

    def _find_root(self, x: int) -> int:
        self._access(x)
        while True:
            self._push(x)
            if self._left[x] == -1:
                break
            x = self._left[x]
        self._splay(x)
        return x

    def _link_nodes(self, a: int, b: int) -> None:
        self._make_root(a)
        self._par[a] = b

    def _cut_nodes(self, a: int, b: int) -> None:
        self._make_root(a)
        self._access(b)
        # a is now b's left child and has no right child
        self._push(a)
        if self._left[b] != a or self._right[a] != -1:
            raise ForestError("nodes are not adjacent")
        self._left[b] = -1
        self._par[a] = -1
        self._pull(b)

    # -- public API ---------------------------------------------------------

    def connected(self, u: Hashable, v: Hashable) -> bool:
        if u == v:
            return True
        if u not in self._vid or v not in self._vid:
            return False
        return self._find_root(self._vid[u]) == self._find_root(self._vid[v])

    def link(self, u: Hashable, v: Hashable, edge: Hashable, key: Any) -> None:
        if edge in self._edges:
            raise ForestError(f"edge {edge!r} already present")
        if self.connected(u, v):
            raise ForestError(f"{u!r} and {v!r} are already connected")
        a, b = self._node(u), self._node(v)
        e = self._new_node(key, edge)
        self._link_nodes(a, e)
        self._link_nodes(e, b)
        self._edges[edge] = (e, u, v)

    def cut(self, edge: Hashable) -> None:
        rec = self._edges.pop(edge, None)
        if rec is None:
            raise ForestError(f"edge {edge!r} not in forest")
        e, u, v = rec
        self._cut_nodes(self._vid[u], e)
        self._cut_nodes(e, self._vid[v])
        self._free.append(e)

    def path_max(self, u: Hashable, v: Hashable) -> Hashable | None:
        """Heaviest edge (by key) on the u-v path, or None if u == v or disconnected."""
        if u == v or not self.connected(u, v):
            return None
        a, b = self._vid[u], self._vid[v]
        self._make_root(a)
        self._access(b)
        best = self._best[b]
        return None if best == -1 else self._handle[best]

    def key_of(self, edge: Hashable) -> Any:
        return self._key[self._edges[edge][0]]

    def endpoints(self, edge: Hashable) -> tuple[Hashable, Hashable]:
        _, u, v = self._edges[edge]
        return u, v

    def edges(self) -> list[Hashable]:
        return list(self._edges)

    def __contains__(self, edge: Hashable) -> bool:
        return edge in self._edges

    def __len__(self) -> int:
        return len(self._edges)


class NaiveForest:
    """Adjacency-map forest; every query is a BFS."""

    def __init__(self) -> None:
        self._adj: dict[Hashable, dict[Hashable, Hashable]] = {}
        self._edges: dict[Hashable, tuple[Hashable, Hashable, Any]] = {}

    def add_vertex(self, v: Hashable) -> None:
        self._adj.setdefault(v, {})

    def _path(self, u: Hashable, v: Hashable) -> list[Hashable] | None:
        if u not in self._adj or v not in self._adj:
            return None
        prev: dict[Hashable, tuple[Hashable, Hashable] | None] = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y, eid in self._adj[x].items():
                if y not in prev:
                    prev[y] = (x, eid)
                    queue.append(y)
        if v not in prev:
            return None
        out = []
        x = v
        while prev[x] is not None:
            x, eid = prev[x]
            out.append(eid)
        return out

    def connected(self, u: Hashable, v: Hashable) -> bool:
        return u == v or self._path(u, v) is not None

    def link(self, u: Hashable, v: Hashable, edge: Hashable, key: Any) -> None:
        if edge in self._edges:
            raise ForestError(f"edge {edge!r} already present")
        if self.connected(u, v):
            raise ForestError(f"{u!r} and {v!r} are already connected")
        self._adj.setdefault(u, {})[v] = edge
        self._adj.setdefault(v, {})[u] = edge
        self._edges[edge] = (u, v, key)

    def cut(self, edge: Hashable) -> None:
        rec = self._edges.pop(edge, None)
        if rec is None:
            raise ForestError(f"edge {edge!r} not in forest")
        u, v, _ = rec
        del self._adj[u][v]
        del self._adj[v][u]

    def path_max(self, u: Hashable, v: Hashable) -> Hashable | None:
        if u == v:
            return None
        path = self._path(u, v)
        if not path:
            return None
        return max(path, key=lambda eid: self._edges[eid][2])

    def is_acyclic(self) -> bool:
        seen: set[Hashable] = set()
        for root in self._adj:
            if root in seen:
                continue
            seen.add(root)
            stack = [(root, None)]
            while stack:
                x, via = stack.pop()
                for y, eid in self._adj[x].items():
                    if eid == via:
                        continue
                    if y in seen:
                        return False
                    seen.add(y)
                    stack.append((y, eid))
        return True

    def __len__(self) -> int:
        return len(self._edges)
