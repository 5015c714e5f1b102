"""End-to-end build: map -> visibility graph -> hub labels -> grid index
-> budget compression.  Thin glue shared by the CLI, benchmarks and tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .compress import CompressionConfig, compress
from .hub_labels import build_hub_labels, vertex_ordering
from .index import EhlIndex, build_ehl
from .io import BuildMeta
from .maps import GridMap, PolygonalMap, convex_vertices, extract_obstacles
from .visibility import VisibilityGraph, build_visibility_graph


@dataclass
class BuildResult:
    pmap: PolygonalMap
    graph: VisibilityGraph
    index: EhlIndex
    meta: BuildMeta
    initial_units: int


def build_index(pmap: PolygonalMap | GridMap, cell_size: float = 1.0,
                budget_percent: float = 100.0, mode: str = "uniform",
                workload: dict[tuple[int, int], int] | None = None,
                alpha: float = 0.2, seed: int = 0) -> BuildResult:
    """Build and (when budget_percent < 100) compress an index.

    The budget is budget_percent of the uncompressed via-label count,
    rounded down.
    """
    if isinstance(pmap, GridMap):
        pmap = extract_obstacles(pmap)
    vertices = convex_vertices(pmap)
    graph = build_visibility_graph(pmap, vertices)
    labels = build_hub_labels(graph, vertex_ordering(graph))
    index = build_ehl(pmap, labels, vertices, cell_size)
    initial = index.memory_units
    budget = int(initial * budget_percent / 100.0)
    if budget_percent >= 100.0:
        outcome = "fit"
    else:
        cfg = CompressionConfig(budget_units=budget, mode=mode,
                                alpha=alpha, workload=workload, seed=seed)
        outcome = compress(index, cfg)
    meta = BuildMeta(mode, budget, alpha, seed, outcome)
    return BuildResult(pmap, graph, index, meta, initial)
