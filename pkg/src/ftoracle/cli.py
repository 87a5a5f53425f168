"""Command-line front end: gen, build, query, verify, bench."""
from __future__ import annotations

import argparse
import csv
import io
import math
import random
import sys
import time
from pathlib import Path

from ftoracle.aspt import build_ft_structure, format_layers, parse_layers, structure_from_layers
from ftoracle.generators import adversarial_failure_set, gen_lower_bound, gen_random
from ftoracle.graph_core import Graph, GraphFormatError, format_graph, format_weight, parse_graph
from ftoracle.msf_oracle import BatchError, UpdateBatch, build_oracle, parse_batch, query
from ftoracle.reference import (
    audit_stretch,
    exact_distance,
    failure_sets,
    ratio_of,
    recompute_msf,
)
from ftoracle.ssdo import FailureBudgetError, Ssdo

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load_graph(path: str) -> Graph:
    try:
        return parse_graph(_read(path))
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _source(g: Graph, flag: int | None) -> int:
    if flag is not None:
        if not 1 <= flag <= g.n:
            raise UsageError("source out of range")
        return flag - 1
    if g.source is None:
        raise UsageError("graph has no 's' line; pass --source")
    return g.source


def _edge_text(e) -> str:
    return f"{e.id}({e.u + 1},{e.v + 1},{format_weight(e.weight)})"


# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "random":
        if args.n is None or args.m is None:
            raise UsageError("gen random needs --n and --m")
        try:
            g = gen_random(
                args.n, args.m, (args.wmin, args.wmax), args.seed, connected=args.connected
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write(args.out, format_graph(g))
    else:
        if args.a is None or args.a < 2:
            raise UsageError("gen lowerbound needs --a >= 2")
        inst = gen_lower_bound(args.a)
        _write(args.out, format_graph(inst.graph))
    return OK


def cmd_build(args) -> int:
    g = _load_graph(args.graph)
    s = _source(g, args.source)
    if args.f < 0:
        raise UsageError("--f must be nonnegative")
    ft = build_ft_structure(g, s, args.f, allow_zero=args.allow_zero)
    ft.check()
    print(f"n {g.n}")
    print(f"m {g.m}")
    print(f"h_edges {len(ft.h_edges)}")
    print("layer_sizes " + " ".join(str(x) for x in ft.layer_sizes()))
    if args.dump_layers:
        _write(args.dump_layers, format_layers(ft))
    return OK


def _query_blocks(text: str, g: Graph):
    failed: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "f":
                failed = [int(x) for x in parts[1:]]
            elif parts[0] == "t" and len(parts) == 2:
                t = int(parts[1]) - 1
                if not 0 <= t < g.n:
                    raise UsageError(f"query line {lineno}: target out of range")
                yield tuple(failed), t
            else:
                raise UsageError(f"query line {lineno}: expected 'f <ids>' or 't <vertex>'")
        except ValueError:
            raise UsageError(f"query line {lineno}: non-integer token") from None


def cmd_query(args) -> int:
    g = _load_graph(args.graph)
    if args.mode == "msf":
        if not args.batch:
            raise UsageError("query msf needs --batch")
        try:
            batch = parse_batch(_read(args.batch), g)
        except BatchError as exc:
            raise UsageError(str(exc)) from None
        d = query(build_oracle(g), batch)
        print(("removed: " + " ".join(_edge_text(g.edges[i]) for i in sorted(d.removed))).rstrip())
        print(("added: " + " ".join(_edge_text(e) for e in d.added)).rstrip())
        return OK

    if not args.queries:
        raise UsageError("query ssdo needs --queries")
    s = _source(g, args.source)
    if args.f is None:
        raise UsageError("query ssdo needs --f")
    o = Ssdo(g, s, args.f, allow_zero=args.allow_zero)
    if args.layers:
        try:
            layers = parse_layers(_read(args.layers))
            ft = structure_from_layers(g, s, layers, allow_zero=args.allow_zero)
        except ValueError as exc:
            raise UsageError(f"{args.layers}: {exc}") from None
        if ft.h_edges != o.ft.h_edges:
            raise UsageError(f"{args.layers}: layers do not match a fresh build for f={args.f}")
    views: dict[tuple[int, ...], object] = {}
    out = io.StringIO()
    for F, t in _query_blocks(_read(args.queries), g):
        if F not in views:
            try:
                views[F] = o.view(F)
            except FailureBudgetError as exc:
                raise UsageError(str(exc)) from None
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        ans = views[F].path(t)
        if math.isinf(ans.weight):
            out.write("dist inf\n")
            if args.path:
                out.write("path none\n")
        else:
            out.write(f"dist {format_weight(ans.weight)}\n")
            if args.path:
                out.write("path " + " ".join(str(v + 1) for v in ans.vertices) + "\n")
    sys.stdout.write(out.getvalue())
    return OK


def _verify_lowerbound(args) -> int:
    inst = gen_lower_bound(args.lowerbound)
    g = inst.graph
    s = inst.source
    ft = build_ft_structure(g, s, g.m, allow_zero=True)
    h = set(ft.h_edges)
    if args.truncate:
        layer1 = sorted(set(inst.base_edges) & ft.layers[1]) if len(ft.layers) > 1 else []
        if not layer1:
            raise UsageError("no base edge in layer 1 to drop")
        h.discard(layer1[0])
        print(f"dropped edge {layer1[0]}")
    outside = frozenset(range(g.m)) - h
    threshold = 3 - 4 / inst.girth
    worst = 0.0
    rows = []
    for e in inst.base_edges:
        F = adversarial_failure_set(inst, e)
        v = g.edges[e].v
        exact = exact_distance(g, F, s, v, allow_zero=True)
        approx = exact_distance(g, F | outside, s, v, allow_zero=True)
        r = ratio_of(approx, exact)
        worst = max(worst, r)
        rows.append((e, len(F), exact, approx, r))
    if args.report:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge", "F_size", "exact", "approx", "ratio"])
        w.writerows(rows)
        _write(args.report, buf.getvalue())
    ok = worst < threshold
    print(f"lowerbound a={args.lowerbound} queries={len(rows)} max_ratio={worst:g} "
          f"threshold={threshold:g} {'PASS' if ok else 'FAIL'}")
    return OK if ok else FAILED


def cmd_verify(args) -> int:
    if args.lowerbound is not None:
        if args.lowerbound < 2:
            raise UsageError("--lowerbound needs a >= 2")
        return _verify_lowerbound(args)
    if not args.graph:
        raise UsageError("verify needs a graph file or --lowerbound")
    g = _load_graph(args.graph)
    s = _source(g, args.source)
    rng = random.Random(args.seed)
    rep = audit_stretch(
        g,
        s,
        args.f,
        lambda ft: failure_sets(sorted(ft.h_edges), args.f, rng, samples=args.samples),
        allow_zero=args.allow_zero,
    )
    if args.report:
        _write(args.report, rep.to_csv())
    print(f"stretch failure_sets={rep.failure_sets} queries={rep.queries} "
          f"max_ratio={rep.max_ratio:.6g} violations={len(rep.violations)}")
    for check, detail in rep.violations[:10]:
        print(f"  {check}: {detail}")
    msf_bad = 0
    o = build_oracle(g)
    for _ in range(args.batches):
        b = _random_batch(g, rng, rng.randint(0, 8))
        d = query(o, b)
        if d.apply(o.base_msf) != recompute_msf(g, b):
            msf_bad += 1
    print(f"msf batches={args.batches} mismatches={msf_bad}")
    ok = rep.ok and msf_bad == 0
    print("PASS" if ok else "FAIL")
    return OK if ok else FAILED


def _random_batch(g: Graph, rng: random.Random, k: int) -> UpdateBatch:
    """Mixed batch of at most ``k`` updates touching distinct edges."""
    ids = rng.sample(range(g.m), min(k, g.m))
    dels, chg = [], []
    for eid in ids:
        if rng.random() < 0.5:
            dels.append(eid)
        else:
            chg.append((eid, round(rng.uniform(0.5, 12.0), 3)))
    ins: list[tuple[int, int, float]] = []
    pairs = set()
    tries = 0
    while len(ids) + len(ins) < k and tries < 50 and g.n > 1:
        tries += 1
        u, v = rng.sample(range(g.n), 2)
        p = (min(u, v), max(u, v))
        if p in pairs or g.edge_between(u, v) is not None:
            continue
        pairs.add(p)
        ins.append((u, v, round(rng.uniform(0.5, 12.0), 3)))
    rng.shuffle(ins)
    return UpdateBatch(frozenset(dels), tuple(ins), tuple(chg))


def cmd_bench(args) -> int:
    try:
        sizes = [int(x) for x in args.sizes.split(",")]
        ks = [int(x) for x in args.ks.split(",")]
    except ValueError:
        raise UsageError("--sizes and --ks take comma-separated integers") from None
    rng = random.Random(args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "k", "queries", "oracle_s", "scratch_s", "probes_avg",
                "touches_avg", "scratch_touches"])
    for n in sizes:
        g = gen_random(n, 2 * n, seed=rng.randrange(1 << 30))
        o = build_oracle(g)
        for k in ks:
            batches = [
                UpdateBatch(frozenset(rng.sample(range(g.m), k))) for _ in range(args.queries)
            ]
            t0 = time.perf_counter()
            probes = touches = 0
            for b in batches:
                d = query(o, b)
                probes += d.stats.probes
                touches += d.stats.touches
            t_oracle = time.perf_counter() - t0
            t0 = time.perf_counter()
            for b in batches[: args.scratch]:
                recompute_msf(g, b)
            t_scratch = (time.perf_counter() - t0) / max(args.scratch, 1)
            w.writerow([n, g.m, k, len(batches), f"{t_oracle:.6f}", f"{t_scratch:.6f}",
                        f"{probes / len(batches):.1f}", f"{touches / len(batches):.1f}",
                        g.m - k])
            if args.out in (None, "-"):
                sys.stdout.write(buf.getvalue())
                buf.seek(0)
                buf.truncate()
    if args.out not in (None, "-"):
        _write(args.out, buf.getvalue())
    return OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ftoracle", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=["random", "lowerbound"])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--a", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--wmin", type=float, default=1.0)
    g.add_argument("--wmax", type=float, default=10.0)
    g.add_argument("--connected", action="store_true")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build the layered structure and print its size")
    b.add_argument("graph")
    b.add_argument("--f", type=int, required=True)
    b.add_argument("--source", type=int)
    b.add_argument("--dump-layers")
    b.add_argument("--allow-zero", action="store_true")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer distance/path or MSF batch queries")
    q.add_argument("mode", choices=["ssdo", "msf"])
    q.add_argument("graph")
    q.add_argument("--f", type=int)
    q.add_argument("--source", type=int)
    q.add_argument("--queries")
    q.add_argument("--batch")
    q.add_argument("--layers")
    q.add_argument("--path", action="store_true")
    q.add_argument("--allow-zero", action="store_true")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="audit answers against brute force")
    v.add_argument("graph", nargs="?")
    v.add_argument("--f", type=int, default=2)
    v.add_argument("--source", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=500)
    v.add_argument("--batches", type=int, default=100)
    v.add_argument("--report")
    v.add_argument("--lowerbound", type=int, metavar="A")
    v.add_argument("--truncate", action="store_true")
    v.add_argument("--allow-zero", action="store_true")
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="time oracle queries against scratch recomputation")
    be.add_argument("--sizes", default="1000,10000,100000")
    be.add_argument("--ks", default="1,2,4,8")
    be.add_argument("--queries", type=int, default=100)
    be.add_argument("--scratch", type=int, default=5)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("-o", "--out")
    be.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
