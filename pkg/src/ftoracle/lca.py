"""Constant-time lowest common ancestor queries on a rooted forest."""
from __future__ import annotations

from typing import Sequence

import numpy as np


class LcaOracle:
    """Euler tour plus a sparse table of depth minima.

    ``parent[v]`` is -1 for roots; vertices in different trees have no LCA.
    """

    def __init__(self, parent: Sequence[int]):
        n = len(parent)
        children: list[list[int]] = [[] for _ in range(n)]
        roots = []
        for v, p in enumerate(parent):
            if p < 0:
                roots.append(v)
            else:
                children[p].append(v)
        depth = [0] * n
        comp = [-1] * n
        first = [0] * n
        last = [0] * n
        euler: list[int] = []
        for r in roots:
            stack = [(r, 0)]
            comp[r] = r
            while stack:
                v, i = stack.pop()
                if i == 0:
                    first[v] = len(euler)
                euler.append(v)
                if i < len(children[v]):
                    stack.append((v, i + 1))
                    c = children[v][i]
                    depth[c] = depth[v] + 1
                    comp[c] = r
                    stack.append((c, 0))
                else:
                    last[v] = len(euler) - 1
        if len(euler) != 2 * n - len(roots):
            raise ValueError("parent array contains a cycle")
        self.n = n
        self.parent = list(parent)
        self.depth = depth
        self.first = first
        self.last = last
        self._comp = comp
        self._euler = euler
        e = np.asarray(euler, dtype=np.int64)
        d = np.asarray(depth, dtype=np.int64)
        # table entries hold Euler positions of the shallowest vertex in range
        rows = [np.arange(len(e), dtype=np.int64)]
        span = 1
        while 2 * span <= len(e):
            prev = rows[-1]
            a = prev[: len(e) - 2 * span + 1]
            b = prev[span : len(e) - span + 1]
            rows.append(np.where(d[e[a]] <= d[e[b]], a, b))
            span *= 2
        self._rows = [r.tolist() for r in rows] if len(e) <= 1 << 16 else rows
        self._small = len(e) <= 1 << 16

    def connected(self, u: int, v: int) -> bool:
        return self._comp[u] == self._comp[v]

    def lca(self, u: int, v: int) -> int:
        if u == v:
            return u
        if self._comp[u] != self._comp[v]:
            raise ValueError(f"{u} and {v} lie in different trees")
        i, j = self.first[u], self.first[v]
        if i > j:
            i, j = j, i
        k = (j - i + 1).bit_length() - 1
        row = self._rows[k]
        euler, depth = self._euler, self.depth
        if self._small:
            a, b = row[i], row[j - (1 << k) + 1]
        else:
            a, b = int(row[i]), int(row[j - (1 << k) + 1])
        x, y = euler[a], euler[b]
        return x if depth[x] <= depth[y] else y

    def is_ancestor(self, a: int, v: int) -> bool:
        return self.first[a] <= self.first[v] and self.last[v] <= self.last[a]
