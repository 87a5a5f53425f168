"""Brute-force ground truth: rerun Dijkstra/Kruskal from scratch on the modified graph."""
from __future__ import annotations

import csv
import io
import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ftoracle.aspt import FtStructure
from ftoracle.graph_core import INF, Edge, Graph, UnionFind, dijkstra_spt, edge_key, msf_of

REL_TOL = 1e-9
ABS_TOL = 1e-12


def close_le(a: float, b: float) -> bool:
    """``a <= b`` up to the shared float tolerance."""
    if a <= b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return a - b <= max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


def exact_distances(
    g: Graph, F: Iterable[int], s: int, *, allow_zero: bool = False
) -> tuple[float, ...]:
    return dijkstra_spt(g, s, skip=frozenset(F), allow_zero=allow_zero).dist


def exact_distance(
    g: Graph, F: Iterable[int], s: int, t: int, *, allow_zero: bool = False
) -> float:
    return exact_distances(g, F, s, allow_zero=allow_zero)[t]


def bellman_ford(g: Graph, s: int, skip: Iterable[int] = ()) -> list[float]:
    dead = set(skip)
    dist = [INF] * g.n
    dist[s] = 0.0
    for _ in range(max(g.n - 1, 0)):
        changed = False
        for e in g.edges:
            if e.id in dead:
                continue
            if dist[e.u] + e.weight < dist[e.v]:
                dist[e.v] = dist[e.u] + e.weight
                changed = True
            if dist[e.v] + e.weight < dist[e.u]:
                dist[e.u] = dist[e.v] + e.weight
                changed = True
        if not changed:
            break
    return dist


# ---------------------------------------------------------------------------
# scratch MSF


def updated_edges(g: Graph, batch) -> dict[int, Edge]:
    """Edges of the updated graph by id; inserted edges get ids m, m+1, ..."""
    batch = batch.normalized(g)
    changes = dict(batch.weight_changes)
    out: dict[int, Edge] = {}
    for e in g.edges:
        if e.id in batch.deletions:
            continue
        if e.id in changes:
            e = Edge(e.id, e.u, e.v, changes[e.id], e.tier)
        out[e.id] = e
    for j, (u, v, w) in enumerate(batch.insertions):
        out[g.m + j] = Edge(g.m + j, u, v, w)
    return out


def recompute_msf(g: Graph, batch) -> frozenset[int]:
    edges = updated_edges(g, batch)
    return frozenset(msf_of(g.n, [(edge_key(e), e.id, e.u, e.v) for e in edges.values()]))


def msf_path_new_edges(
    g: Graph, deletions: Iterable[int], u: int, v: int, base: frozenset[int] | None = None
) -> list[tuple[int, int, int]] | None:
    """Non-base edges on the u-v path of the MSF of ``g`` minus ``deletions``,
    as ``(id, near, far)`` in order from ``u``; None if disconnected."""
    dead = set(deletions)
    if base is None:
        base = frozenset(msf_of(g.n, [(edge_key(e), e.id, e.u, e.v) for e in g.edges]))
    msf = msf_of(g.n, [(edge_key(e), e.id, e.u, e.v) for e in g.edges if e.id not in dead])
    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in msf:
        e = g.edges[eid]
        adj.setdefault(e.u, []).append((e.v, eid))
        adj.setdefault(e.v, []).append((e.u, eid))
    prev: dict[int, tuple[int, int] | None] = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y, eid in adj.get(x, ()):
            if y not in prev:
                prev[y] = (x, eid)
                queue.append(y)
    if v not in prev:
        return None
    hops = []
    x = v
    while prev[x] is not None:
        p, eid = prev[x]
        hops.append((eid, p, x))
        x = p
    hops.reverse()
    return [h for h in hops if h[0] not in base]


# ---------------------------------------------------------------------------
# stretch audit


def failure_sets(
    pool: Sequence[int],
    f: int,
    rng: random.Random,
    *,
    samples: int = 500,
    exhaustive_limit: int = 40,
) -> list[tuple[int, ...]]:
    """The empty set, then every set of size <= 2 when the pool is small, and
    ``samples`` distinct random sets for every other size up to ``f``."""
    pool = sorted(pool)
    out: list[tuple[int, ...]] = [()]
    for size in range(1, min(f, len(pool)) + 1):
        if len(pool) <= exhaustive_limit and size <= 2:
            out.extend(itertools.combinations(pool, size))
            continue
        total = math.comb(len(pool), size)
        if total <= samples:
            out.extend(itertools.combinations(pool, size))
            continue
        seen: set[tuple[int, ...]] = set()
        while len(seen) < samples:
            seen.add(tuple(sorted(rng.sample(pool, size))))
        out.extend(sorted(seen))
    return out


@dataclass
class StretchReport:
    rows: list[tuple[tuple[int, ...], int, float, float, float]] = field(default_factory=list)
    max_ratio: float = 1.0
    witness: tuple[tuple[int, ...], int] | None = None
    violations: list[tuple[str, str]] = field(default_factory=list)  # (check, detail)
    queries: int = 0
    failure_sets: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, check: str) -> list[str]:
        return [d for c, d in self.violations if c == check]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["F", "t", "exact", "approx", "ratio"])
        for F, t, exact, approx, ratio in self.rows:
            w.writerow([" ".join(map(str, F)), t, repr(exact), repr(approx), repr(ratio)])
        return buf.getvalue()


def ratio_of(approx: float, exact: float) -> float:
    if math.isinf(exact):
        return 1.0 if math.isinf(approx) else 0.0
    if math.isinf(approx):
        return INF
    if exact == 0:
        return 1.0 if approx == 0 else INF
    return approx / exact


def _sorted_records(g: Graph, ids: Iterable[int], wprime) -> list[tuple[float, int, int, int]]:
    return sorted((wprime[i], i, g.edges[i].u, g.edges[i].v) for i in ids)


def _msf_sorted(n: int, recs, dead: frozenset[int]) -> frozenset[int]:
    uf = UnionFind(n)
    return frozenset(eid for _, eid, u, v in recs if eid not in dead and uf.union(u, v))


def audit_stretch(
    g: Graph,
    s: int,
    f: int,
    sampler: Callable[[FtStructure], Iterable[Sequence[int]]],
    *,
    ssdo=None,
    allow_zero: bool = False,
    keep_rows: bool = True,
    check_msf: bool = True,
) -> StretchReport:
    """Audit every sampled failure set against the reference distances.

    Checks (tagged in ``violations``): ``stretch`` for the oracle answer and
    for true distances in H-F, ``lower`` (answer below the exact distance),
    ``newedge`` (the new-edge weight bounds and the path-weight chain),
    ``budget`` (more new edges than failures), ``consistency`` and ``soundness``
    of returned paths, and ``msf`` (MSF of H-F equals MSF of G'-F).
    """
    from ftoracle.ssdo import build_ssdo

    if ssdo is None:
        ssdo = build_ssdo(g, s, f, allow_zero=allow_zero)
    ft = ssdo.ft
    wprime = ft.reweighted.wprime
    tree = ft.spt.tree_edges
    h_set = ft.h_edges
    outside_h = frozenset(range(g.m)) - h_set
    g_recs = _sorted_records(g, ft.reweighted.edge_ids(), wprime)
    h_recs = _sorted_records(g, h_set, wprime)
    report = StretchReport()

    def bad(check: str, detail: str) -> None:
        report.violations.append((check, detail))

    for F in sampler(ft):
        F = tuple(sorted(F))
        Fs = frozenset(F)
        report.failure_sets += 1
        budget = 2 * len(F) + 1
        ref = dijkstra_spt(g, s, skip=Fs, allow_zero=allow_zero)
        h_dist = dijkstra_spt(g, s, skip=Fs | outside_h, allow_zero=allow_zero).dist
        view = ssdo.view(F)
        if check_msf:
            if _msf_sorted(g.n, h_recs, Fs) != _msf_sorted(g.n, g_recs, Fs):
                bad("msf", f"F={F}")
        for t in range(g.n):
            report.queries += 1
            exact = ref.dist[t]
            ans = view.path(t)
            approx = view.distance(t)
            ratio = ratio_of(approx, exact)
            if keep_rows:
                report.rows.append((F, t, exact, approx, ratio))
            if ratio > report.max_ratio:
                report.max_ratio = ratio
                report.witness = (F, t)
            if not close_le(approx, budget * exact) or not close_le(h_dist[t], budget * exact):
                bad("stretch", f"F={F} t={t} exact={exact} approx={approx} h={h_dist[t]}")
            if not close_le(exact, approx) or not close_le(h_dist[t], approx):
                bad("lower", f"F={F} t={t} exact={exact} approx={approx} h={h_dist[t]}")
            if approx != ans.weight:
                bad("consistency", f"F={F} t={t} distance={approx} path={ans.weight}")
            if math.isinf(exact):
                continue
            steps = ans.steps
            if len(steps) > len(F):
                bad("budget", f"F={F} t={t} h={len(steps)}")
            _check_path(g, s, t, ans, Fs, h_set, bad, F)
            # new edges of the true shortest path, and the bounds relating them
            N = []
            x = t
            while x != s:
                pe = ref.parent_edge[x]
                if pe not in tree:
                    N.append(pe)
                x = ref.parent[x]
            for e in N:
                if not close_le(wprime[e], 2 * exact):
                    bad("newedge", f"F={F} t={t} e={e} w'={wprime[e]} > 2d={2 * exact}")
            cap = max((wprime[e] for e in N), default=-INF)
            for st in steps:
                if not close_le(st.reweighted, cap):
                    bad("newedge", f"F={F} t={t} new edge {st.edge} w'={st.reweighted} > {cap}")
            chain = sum(st.reweighted for st in steps) + ft.spt.dist[t]
            if not close_le(ans.weight, chain):
                bad("newedge", f"F={F} t={t} path {ans.weight} > chain {chain}")
    return report


def _check_path(g, s, t, ans, Fs, h_set, bad, F) -> None:
    vs, es = ans.vertices, ans.edges
    if not vs or vs[0] != s or vs[-1] != t or len(vs) != len(es) + 1:
        bad("soundness", f"F={F} t={t} malformed path")
        return
    total = 0.0
    for i, eid in enumerate(es):
        e = g.edges[eid]
        if eid in Fs or eid not in h_set or {e.u, e.v} != {vs[i], vs[i + 1]}:
            bad("soundness", f"F={F} t={t} bad edge {eid}")
            return
        total += e.weight
    if not (close_le(total, ans.weight) and close_le(ans.weight, total)):
        bad("consistency", f"F={F} t={t} edge sum {total} != {ans.weight}")
