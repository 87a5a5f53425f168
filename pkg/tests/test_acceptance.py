"""Acceptance gate: one test per criterion, each printing a pass/fail line in
the terminal summary."""
from __future__ import annotations

import math
import random
import time
from collections import Counter

import pytest

from conftest import ACCEPTANCE_LINES
from hierarchy_checks import check_hierarchy
from ftoracle.cli import _random_batch
from ftoracle.generators import adversarial_failure_set, gen_lower_bound, gen_random
from ftoracle.graph_core import Graph, kruskal_msf
from ftoracle.hierarchy import build_clustering, reduce_degree
from ftoracle.msf_oracle import UpdateBatch, build_oracle, dynamic_session, query
from ftoracle.reference import (
    audit_stretch,
    bellman_ford,
    exact_distance,
    failure_sets,
    msf_path_new_edges,
    recompute_msf,
)
from ftoracle.ssdo import build_ssdo


def gate(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


# ---------------------------------------------------------------------------
# criteria 1, 2, 3, 6 share one audit over the same sample

SIZES = (20, 50, 100)
FS = (1, 2, 3)
GRAPHS_PER_SIZE = 50
SAMPLES = 500


def size_problems(g: Graph, s: int, f: int, ft) -> list[str]:
    out = []
    h = ft.h_edges
    if len(h) > (f + 1) * max(g.n - 1, 0):
        out.append(f"|E(H)|={len(h)} > {(f + 1) * (g.n - 1)}")
    seen: set[int] = set()
    for i, layer in enumerate(ft.layers):
        if seen & layer:
            out.append(f"layer {i} overlaps earlier layers")
        seen |= layer
    if seen != set(h):
        out.append("H is not the union of its layers")
    if ft.layers[0] != ft.spt.tree_edges:
        out.append("first layer differs from the tree")
    # the tree must be a shortest-path tree: check against Bellman-Ford
    bf = bellman_ford(g, s)
    for v in range(g.n):
        d = 0.0
        x = v
        if math.isinf(bf[v]):
            continue
        while x != s:
            e = g.edges[ft.spt.parent_edge[x]]
            if e.id not in ft.spt.tree_edges:
                out.append(f"parent edge of {x} not in the tree")
                break
            d += e.weight
            x = ft.spt.parent[x]
        if not math.isclose(d, bf[v], rel_tol=1e-9, abs_tol=1e-12):
            out.append(f"tree distance of {v} is {d}, shortest is {bf[v]}")
    return out


@pytest.fixture(scope="module")
def stretch_audit():
    t0 = time.perf_counter()
    stats = {
        "violations": Counter(),
        "examples": {},
        "size_bad": [],
        "max_ratio": 1.0,
        "queries": 0,
        "failure_sets": 0,
        "instances": 0,
    }
    for n in SIZES:
        for i in range(GRAPHS_PER_SIZE):
            seed = 1000 * n + i
            rng = random.Random(seed)
            g = gen_random(n, rng.randint(n, 3 * n), seed=seed)
            for f in FS:
                o = build_ssdo(g, 0, f)
                stats["instances"] += 1
                for p in size_problems(g, 0, f, o.ft):
                    stats["size_bad"].append(f"n={n} seed={seed} f={f}: {p}")
                pick = random.Random(seed * 7 + f)
                rep = audit_stretch(
                    g, 0, f,
                    lambda ft: failure_sets(sorted(ft.h_edges), f, pick, samples=SAMPLES),
                    ssdo=o,
                    keep_rows=False,
                )
                stats["queries"] += rep.queries
                stats["failure_sets"] += rep.failure_sets
                stats["max_ratio"] = max(stats["max_ratio"], rep.max_ratio)
                for check, detail in rep.violations:
                    stats["violations"][check] += 1
                    stats["examples"].setdefault(check, f"n={n} seed={seed} f={f} {detail}")
    stats["seconds"] = time.perf_counter() - t0
    return stats


def _summary(st, checks) -> tuple[bool, str]:
    bad = sum(st["violations"][c] for c in checks)
    detail = (
        f"instances={st['instances']} failure_sets={st['failure_sets']} "
        f"queries={st['queries']} violations={bad}"
    )
    for c in checks:
        if c in st["examples"]:
            detail += f" first[{c}]: {st['examples'][c]}"
    return bad == 0, detail


@pytest.mark.slow
def test_criterion_1_stretch(stretch_audit):
    ok, detail = _summary(stretch_audit, ("stretch", "lower"))
    gate(1, ok, f"max_ratio={stretch_audit['max_ratio']:.6g} {detail} "
                f"audit_seconds={stretch_audit['seconds']:.0f}")


@pytest.mark.slow
def test_criterion_2_size(stretch_audit):
    bad = stretch_audit["size_bad"]
    # a few extra shapes outside the audit sample: trees, dense graphs, f=0
    extra = 0
    for seed in range(30):
        rng = random.Random(seed)
        n = rng.randint(2, 60)
        m = rng.choice([n - 1, min(n * (n - 1) // 2, 4 * n), n * (n - 1) // 2])
        g = gen_random(n, m, seed=seed, connected=True)
        f = rng.randint(0, 5)
        o = build_ssdo(g, 0, f)
        bad = bad + [f"extra seed={seed}: {p}" for p in size_problems(g, 0, f, o.ft)]
        extra += 1
    gate(2, not bad, f"instances={stretch_audit['instances'] + extra} problems={len(bad)}"
                     + (f" first: {bad[0]}" if bad else ""))


@pytest.mark.slow
def test_criterion_3_msf_of_h_minus_f(stretch_audit):
    ok, detail = _summary(stretch_audit, ("msf",))
    gate(3, ok, detail)


@pytest.mark.slow
def test_criterion_6_ssdo_consistency(stretch_audit):
    ok, detail = _summary(stretch_audit, ("consistency", "soundness"))
    gate(6, ok, detail)


# ---------------------------------------------------------------------------
# criteria 4 and 5: MSF oracle against scratch Kruskal

TRIALS = 1000


@pytest.fixture(scope="module")
def msf_trials():
    t0 = time.perf_counter()
    out = {"delta_bad": [], "bound_bad": [], "path_bad": [], "trials": 0, "paths": 0}
    for n in (20, 50, 200):
        for i in range(TRIALS):
            seed = 10_000 * n + i
            rng = random.Random(seed)
            g = gen_random(n, rng.randint(n, 3 * n), seed=seed)
            o = build_oracle(g)
            b = _random_batch(g, rng, rng.randint(0, 8))
            d = query(o, b)
            out["trials"] += 1
            if d.apply(o.base_msf) != recompute_msf(g, b):
                out["delta_bad"].append(f"n={n} seed={seed}")
            if len(d.removed) > b.k or len(d.added) > b.k:
                out["bound_bad"].append(f"n={n} seed={seed} k={b.k}")
            s = o.session(b.deletions)
            for _ in range(10):
                u, v = rng.sample(range(n), 2)
                out["paths"] += 1
                got = s.path_new_edges(u, v)
                want = msf_path_new_edges(g, b.deletions, u, v, o.base_msf)
                got = None if got is None else [(e.id, a, c) for e, a, c in got]
                if got != want:
                    out["path_bad"].append(f"n={n} seed={seed} u={u} v={v}")
    out["seconds"] = time.perf_counter() - t0
    return out


def test_criterion_4_msf_equivalence(msf_trials):
    bad = msf_trials["delta_bad"] + msf_trials["bound_bad"]
    gate(4, not bad, f"trials={msf_trials['trials']} mismatches={len(msf_trials['delta_bad'])} "
                     f"over_2k={len(msf_trials['bound_bad'])} seconds={msf_trials['seconds']:.0f}"
                     + (f" first: {bad[0]}" if bad else ""))


def test_criterion_5_path_new_edges(msf_trials):
    bad = msf_trials["path_bad"]
    gate(5, not bad, f"path_scans={msf_trials['paths']} mismatches={len(bad)}"
                     + (f" first: {bad[0]}" if bad else ""))


# ---------------------------------------------------------------------------
# criterion 7: clustering invariants


def random_tree(n: int, rng: random.Random) -> Graph:
    # random recursive tree, arbitrary degrees
    return Graph.from_triples(n, [(v, rng.randrange(v), float(rng.randint(1, 9))) for v in range(1, n)])


def test_criterion_7_clustering_invariants():
    rng = random.Random(7)
    sizes = [10_000] * 5 + [int(10 ** rng.uniform(0.3, 4)) for _ in range(95)]
    failures: Counter = Counter()
    first: dict[str, str] = {}
    deg_bad = 0
    worst_children = 0
    for n in sizes:
        g = random_tree(n, rng)
        red = reduce_degree(g, frozenset(range(g.m)), root=0)
        if max(red.tree.degrees(), default=0) > 3:
            deg_bad += 1
        h = build_clustering(red.tree)
        worst_children = max(worst_children, h.max_children)
        for prop, msgs in check_hierarchy(h, red.tree.parent, delta=3).items():
            if msgs:
                failures[prop] += 1
                first.setdefault(prop, f"n={n}: {msgs[0]}")
    ok = deg_bad == 0 and not failures
    detail = (f"trees={len(sizes)} max_n={max(sizes)} degree_violations={deg_bad} "
              f"max_children={worst_children} failing_trees={dict(failures)}")
    if first:
        detail += " first: " + "; ".join(f"{k}: {v}" for k, v in sorted(first.items()))
    gate(7, ok, detail)


# ---------------------------------------------------------------------------
# criterion 8: lower-bound realization


def test_criterion_8_lower_bound():
    t0 = time.perf_counter()
    worst_cut = math.inf
    worst_intact = 0.0
    queries = 0
    for a in (2, 4, 8):
        inst = gen_lower_bound(a)
        g, s = inst.graph, inst.source
        threshold = 3 - 4 / inst.girth
        for e in inst.base_edges:
            F = adversarial_failure_set(inst, e)
            v = g.edges[e].v
            exact = exact_distance(g, F, s, v, allow_zero=True)
            cut = exact_distance(g, F | {e}, s, v, allow_zero=True)
            # independent oracle for the intact graph
            intact = bellman_ford(g, s, F)[v]
            worst_cut = min(worst_cut, cut / exact)
            worst_intact = max(worst_intact, intact / exact)
            queries += 1
    ok = worst_cut >= threshold - 1e-9 and worst_intact <= 1 + 1e-9
    gate(8, ok, f"queries={queries} min_ratio_without_e={worst_cut:.6g} (needs >= {threshold:g}) "
                f"max_ratio_intact={worst_intact:.6g} seconds={time.perf_counter() - t0:.1f}")


# ---------------------------------------------------------------------------
# criterion 9: dynamic session against a sequential simulation


def simulate(n: int, present: dict[tuple[int, int], float]) -> set[tuple[int, int]]:
    # plain Kruskal on the current edge set; weights are distinct
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = set()
    for (u, v), w in sorted(present.items(), key=lambda kv: kv[1]):
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            out.add((u, v))
    return out


def test_criterion_9_dynamic_session():
    bad = []
    runs = 20
    for seed in range(runs):
        rng = random.Random(seed)
        g = gen_random(100, 250, seed=seed, digits=None)
        o = build_oracle(g)
        present = {tuple(sorted(e.endpoints())): e.weight for e in g.edges}
        ops = []
        states = []
        while len(ops) < 32:
            u, v = sorted(rng.sample(range(g.n), 2))
            w = rng.uniform(1.0, 10.0)
            if (u, v) in present:
                if rng.random() < 0.5:
                    ops.append(("d", u, v))
                    del present[(u, v)]
                else:
                    ops.append(("c", u, v, w))
                    present[(u, v)] = w
            else:
                ops.append(("i", u, v, w))
                present[(u, v)] = w
            states.append((simulate(g.n, present), dict(present)))
        deltas = list(dynamic_session(o, ops))
        for i, (d, (want, now)) in enumerate(zip(deltas, states), start=1):
            # deltas are edge-id sets: unchanged ids keep their place even if reweighted
            got = {tuple(sorted(g.edges[x].endpoints())) for x in o.base_msf - d.removed}
            added = {tuple(sorted(e.endpoints())): e.weight for e in d.added}
            if got | set(added) != want or any(now.get(p) != w for p, w in added.items()):
                bad.append(f"seed={seed} prefix={i}")
        if len(deltas) != 32:
            bad.append(f"seed={seed} got {len(deltas)} deltas")
    gate(9, not bad, f"sessions={runs} h=32 prefixes={32 * runs} mismatches={len(bad)}"
                     + (f" first: {bad[0]}" if bad else ""))


# ---------------------------------------------------------------------------
# criterion 10: probe growth and edge touches


@pytest.mark.slow
def test_criterion_10_performance_proxy():
    rng = random.Random(10)
    n = 100_000
    g = gen_random(n, 2 * n, seed=10)
    o = build_oracle(g)
    avg = {}
    touches = {}
    for k in (1, 2, 4, 8):
        probes = tch = 0
        for _ in range(100):
            d = query(o, UpdateBatch(frozenset(rng.sample(range(g.m), k))))
            probes += d.stats.probes
            tch += d.stats.touches
        avg[k] = probes / 100
        touches[k] = tch / 100
    growth = {k: avg[2 * k] / avg[k] for k in (1, 2, 4)}
    # scratch Kruskal reads every surviving edge of the graph
    scratch = g.m - 4
    ratio = scratch / touches[4]
    # spot-check that the timed answers are right
    b = UpdateBatch(frozenset(rng.sample(range(g.m), 4)))
    same = query(o, b).apply(o.base_msf) == kruskal_msf(g, exclude=b.deletions)
    ok = max(growth.values()) <= 4.5 and ratio >= 20 and same
    gate(10, ok, "probes_avg=" + ",".join(f"k{k}:{avg[k]:.0f}" for k in avg)
                 + " growth=" + ",".join(f"{growth[k]:.2f}" for k in growth)
                 + f" touches_k4={touches[4]:.0f} scratch_touches={scratch} ({ratio:.0f}x fewer)")
