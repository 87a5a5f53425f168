"""Single-source distance oracle answering post-failure distance and path queries.

Combines the SPT (distances and parent pointers), the layered structure H, an
MSF sensitivity oracle over H with the reweighted costs, and LCA queries on
the SPT.  For a failure set F the s-t path in the post-failure MSF of H is a
chain of tree paths joined by the new (non-tree) edges on it; its length is
assembled from tree distances at the junctions and their LCAs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ftoracle.aspt import FtStructure, build_ft_structure
from ftoracle.graph_core import Edge, Graph, SptResult
from ftoracle.lca import LcaOracle
from ftoracle.msf_oracle import MsfOracle, QuerySession

__all__ = [
    "FailureBudgetError",
    "FailureSet",
    "FailureView",
    "LcaOracle",
    "NewEdgeStep",
    "PathAnswer",
    "Ssdo",
    "build_ssdo",
]


class FailureBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class FailureSet:
    edges: frozenset[int]

    @classmethod
    def of(cls, ids: Iterable[int], g: Graph, f: int | None) -> "FailureSet":
        got = frozenset(int(e) for e in ids)
        for e in got:
            if not 0 <= e < g.m:
                raise ValueError(f"unknown edge id {e}")
        if f is not None and len(got) > f:
            raise FailureBudgetError(f"{len(got)} failures exceed the budget f={f}")
        return cls(got)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class NewEdgeStep:
    edge: int  # id in the input graph
    near: int  # endpoint on the source side
    far: int
    weight: float
    reweighted: float


@dataclass(frozen=True)
class PathAnswer:
    target: int
    weight: float
    vertices: tuple[int, ...]  # empty when unreachable
    edges: tuple[int, ...]
    steps: tuple[NewEdgeStep, ...]
    anchors: tuple[int, ...]  # r_1..r_h

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.weight)


class Ssdo:
    def __init__(self, g: Graph, s: int, f: int | None, *, allow_zero: bool = False):
        self.graph = g
        self.source = s
        self.f = f
        self.ft: FtStructure = build_ft_structure(g, s, f, allow_zero=allow_zero)
        self.spt: SptResult = self.ft.spt
        wprime = self.ft.reweighted.wprime
        self.h_ids: tuple[int, ...] = tuple(sorted(self.ft.h_edges))
        self._local = {gid: i for i, gid in enumerate(self.h_ids)}
        local = [
            Edge(i, g.edges[gid].u, g.edges[gid].v, wprime[gid]) for i, gid in enumerate(self.h_ids)
        ]
        self.h_graph = Graph(g.n, local)
        self.q = MsfOracle(self.h_graph)
        self.lca = LcaOracle(self.spt.parent)

    def failures(self, ids: Iterable[int]) -> FailureSet:
        return FailureSet.of(ids, self.graph, self.f)

    def view(self, F: FailureSet | Iterable[int]) -> "FailureView":
        if not isinstance(F, FailureSet):
            F = self.failures(F)
        elif self.f is not None and len(F) > self.f:
            raise FailureBudgetError(f"{len(F)} failures exceed the budget f={self.f}")
        return FailureView(self, F)

    def query_distance(self, F, t: int) -> float:
        return self.view(F).distance(t)

    def query_path(self, F, t: int) -> PathAnswer:
        return self.view(F).path(t)


def build_ssdo(g: Graph, s: int, f: int | None, *, allow_zero: bool = False) -> Ssdo:
    """``f=None`` keeps every edge in H, so any failure set is accepted."""
    return Ssdo(g, s, f, allow_zero=allow_zero)


def lca(o: LcaOracle, u: int, v: int) -> int:
    return o.lca(u, v)


class FailureView:
    """All queries for one failure set share a single oracle session."""

    def __init__(self, o: Ssdo, F: FailureSet):
        self.o = o
        self.failed = F
        local = [o._local[e] for e in F.edges if e in o._local]
        self.session: QuerySession = o.q.session(local)
        self._steps: dict[int, tuple[NewEdgeStep, ...] | None] = {}

    def _check_target(self, t: int) -> None:
        if not 0 <= t < self.o.graph.n:
            raise ValueError(f"unknown target {t}")

    def steps(self, t: int) -> tuple[NewEdgeStep, ...] | None:
        if t in self._steps:
            return self._steps[t]
        self._check_target(t)
        o = self.o
        got = None
        if o.spt.reachable(t):
            trace = self.session.path_new_edges(o.source, t)
            if trace is not None:
                got = tuple(
                    NewEdgeStep(
                        o.h_ids[e.id], near, far, o.graph.edges[o.h_ids[e.id]].weight, e.weight
                    )
                    for e, near, far in trace
                )
        self._steps[t] = got
        return got

    def _weigh(self, steps: tuple[NewEdgeStep, ...], t: int) -> tuple[float, list[int]]:
        d = self.o.spt.dist
        lca = self.o.lca.lca
        if not steps:
            return d[t], []
        total = d[steps[0].near]
        for st in steps:
            total += st.weight
        anchors = []
        for i, st in enumerate(steps):
            nxt = steps[i + 1].near if i + 1 < len(steps) else t
            r = lca(st.far, nxt)
            anchors.append(r)
            total += (d[st.far] - d[r]) + (d[nxt] - d[r])
        return total, anchors

    def distance(self, t: int) -> float:
        steps = self.steps(t)
        if steps is None:
            return math.inf
        return self._weigh(steps, t)[0]

    def path(self, t: int) -> PathAnswer:
        steps = self.steps(t)
        if steps is None:
            return PathAnswer(t, math.inf, (), (), (), ())
        total, anchors = self._weigh(steps, t)
        spt = self.o.spt
        s = self.o.source
        verts: list[int] = []
        edges: list[int] = []

        def climb(a: int, r: int) -> tuple[list[int], list[int]]:
            vs, es = [a], []
            while a != r:
                es.append(spt.parent_edge[a])
                a = spt.parent[a]
                vs.append(a)
            return vs, es

        head = steps[0].near if steps else t
        vs, es = climb(head, s)
        verts.extend(reversed(vs))
        edges.extend(reversed(es))
        for i, st in enumerate(steps):
            edges.append(st.edge)
            nxt = steps[i + 1].near if i + 1 < len(steps) else t
            r = anchors[i]
            up_v, up_e = climb(st.far, r)
            dn_v, dn_e = climb(nxt, r)
            verts.extend(up_v)
            verts.extend(reversed(dn_v[:-1]))
            edges.extend(up_e)
            edges.extend(reversed(dn_e))
        return PathAnswer(t, total, tuple(verts), tuple(edges), steps, tuple(anchors))
