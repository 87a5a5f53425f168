"""Fault-tolerant approximate SPT: reweight around an SPT, then peel disjoint MSF layers."""
from __future__ import annotations

from dataclasses import dataclass

from ftoracle.graph_core import Graph, SptResult, UnionFind, dijkstra_spt


@dataclass(frozen=True)
class ReweightedGraph:
    """``wprime[e]`` is None for edges outside the source's component."""

    base: Graph
    spt: SptResult
    wprime: tuple[float | None, ...]

    @property
    def tree_edges(self) -> frozenset[int]:
        return self.spt.tree_edges

    def key(self, eid: int) -> tuple[float, int]:
        return (self.wprime[eid], eid)

    def edge_ids(self) -> list[int]:
        return [i for i, w in enumerate(self.wprime) if w is not None]


def reweight(g: Graph, spt: SptResult) -> ReweightedGraph:
    dist = spt.dist
    tree = spt.tree_edges
    wp: list[float | None] = []
    for e in g.edges:
        if not (spt.reachable(e.u) and spt.reachable(e.v)):
            wp.append(None)
        elif e.id in tree:
            wp.append(0.0)
        else:
            wp.append(dist[e.u] + e.weight + dist[e.v])
    return ReweightedGraph(g, spt, tuple(wp))


@dataclass(frozen=True)
class FtStructure:
    f: int | None  # None: layers peeled until the graph is exhausted
    spt: SptResult
    reweighted: ReweightedGraph
    layers: tuple[frozenset[int], ...]

    @property
    def graph(self) -> Graph:
        return self.reweighted.base

    @property
    def h_edges(self) -> frozenset[int]:
        out: set[int] = set()
        for layer in self.layers:
            out |= layer
        return frozenset(out)

    def layer_sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    def check(self) -> None:
        """Raise AssertionError if a structural invariant fails."""
        seen: set[int] = set()
        for layer in self.layers:
            assert not (layer & seen), "layers overlap"
            seen |= layer
        assert self.layers[0] == self.spt.tree_edges, "first layer differs from the SPT"
        n = self.graph.n
        if self.f is not None:
            assert len(seen) <= (self.f + 1) * max(n - 1, 0)


def _peel_layers(rg: ReweightedGraph, rounds: int | None) -> list[frozenset[int]]:
    g = rg.base
    order = sorted(rg.edge_ids(), key=rg.key)
    remaining = order
    layers: list[frozenset[int]] = []
    while rounds is None or len(layers) < rounds:
        if not remaining:
            if rounds is None:
                break
            layers.append(frozenset())
            continue
        uf = UnionFind(g.n)
        taken = []
        rest = []
        for eid in remaining:
            e = g.edges[eid]
            (taken if uf.union(e.u, e.v) else rest).append(eid)
        layers.append(frozenset(taken))
        remaining = rest
    if not layers:
        layers.append(frozenset())
    return layers


def build_ft_structure(
    g: Graph, s: int, f: int | None, *, allow_zero: bool = False
) -> FtStructure:
    """Layers ``M_0..M_f`` of the reweighted graph; ``f=None`` peels until empty."""
    if f is not None and f < 0:
        raise ValueError("fault budget must be nonnegative")
    spt = dijkstra_spt(g, s, allow_zero=allow_zero)
    rg = reweight(g, spt)
    layers = _peel_layers(rg, None if f is None else f + 1)
    return FtStructure(f, spt, rg, tuple(layers))


def format_layers(ft: FtStructure) -> str:
    lines = []
    for i, layer in enumerate(ft.layers):
        ids = " ".join(str(e) for e in sorted(layer))
        lines.append(f"layer {i}: {ids}".rstrip())
    return "\n".join(lines) + "\n"


def parse_layers(text: str) -> list[frozenset[int]]:
    layers: dict[int, frozenset[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "layer" or not _:
            raise ValueError(f"line {lineno}: expected 'layer <i>: <ids>'")
        try:
            idx = int(parts[1])
            ids = frozenset(int(t) for t in body.split())
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer token") from None
        if idx in layers:
            raise ValueError(f"line {lineno}: layer {idx} repeated")
        layers[idx] = ids
    if sorted(layers) != list(range(len(layers))):
        raise ValueError("layer indices must be 0..k without gaps")
    return [layers[i] for i in range(len(layers))]


def structure_from_layers(
    g: Graph, s: int, layers: list[frozenset[int]], *, allow_zero: bool = False
) -> FtStructure:
    """Rehydrate a dumped structure; the SPT is recomputed and must match layer 0."""
    spt = dijkstra_spt(g, s, allow_zero=allow_zero)
    rg = reweight(g, spt)
    for layer in layers:
        for eid in layer:
            if not 0 <= eid < g.m:
                raise ValueError(f"edge id {eid} not in graph")
    ft = FtStructure(len(layers) - 1, spt, rg, tuple(layers))
    try:
        ft.check()
    except AssertionError as exc:
        raise ValueError(f"inconsistent layer dump: {exc}") from None
    return ft
