"""Fault-tolerant approximate shortest-path trees and MSF sensitivity oracles."""

from ftoracle.graph_core import (
    Edge,
    Graph,
    GraphFormatError,
    SptResult,
    Tier,
    UnionFind,
    augment_with_dummy,
    dijkstra_spt,
    format_graph,
    kruskal_msf,
    parse_graph,
)
from ftoracle.aspt import FtStructure, ReweightedGraph, build_ft_structure, reweight
from ftoracle.msf_oracle import MsfOracle, MstDelta, UpdateBatch, build_oracle
from ftoracle.ssdo import Ssdo, build_ssdo

__all__ = [
    "Edge",
    "FtStructure",
    "Graph",
    "GraphFormatError",
    "MsfOracle",
    "MstDelta",
    "ReweightedGraph",
    "SptResult",
    "Ssdo",
    "Tier",
    "UnionFind",
    "UpdateBatch",
    "augment_with_dummy",
    "build_ft_structure",
    "build_oracle",
    "build_ssdo",
    "dijkstra_spt",
    "format_graph",
    "kruskal_msf",
    "parse_graph",
    "reweight",
]
