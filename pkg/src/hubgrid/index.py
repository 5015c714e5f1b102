"""Grid overlay index: per-cell via-labels grouped by hub.

Each free grid cell starts as its own region.  A region's label set is the
union, over every convex vertex visible from the region's cells, of that
vertex's hub labels — stored as (hub, via, dist) triples grouped by hub.
Regions are later merged by the compressor; queries only ever need the
group for one hub at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .hub_labels import HubLabel
from .maps import PolygonalMap, ConvexVertex, cell_count
from .visibility import all_cell_visibility


class ViaLabel(NamedTuple):
    """One region label: reach `via` on foot, then `dist` along the graph
    from `via` to `hub`."""

    hub: int
    via: int
    dist: float


def build_label_groups(vias: Iterable[int],
                       labels: list[list[HubLabel]]) -> dict[int, list[tuple[int, float]]]:
    """Group (via, dist) pairs by hub for every hub label of every via vertex.

    Groups are keyed by hub id; each group is sorted by via id and free of
    duplicate vias.  This is the label set of a region whose visible-vertex
    list is `vias`.
    """
    groups: dict[int, dict[int, float]] = {}
    for v in vias:
        for entry in labels[v]:
            groups.setdefault(entry.hub, {})[v] = entry.dist
    return {h: sorted(g.items()) for h, g in sorted(groups.items())}


@dataclass
class Region:
    """A connected set of grid cells sharing one label table."""

    id: int
    cells: set[tuple[int, int]]
    groups: dict[int, list[tuple[int, float]]]
    score: float = 0.0
    #: bumped on every merge; used for lazy heap invalidation
    generation: int = 0

    @property
    def hubs(self) -> list[int]:
        return sorted(self.groups)

    @property
    def label_count(self) -> int:
        return sum(len(g) for g in self.groups.values())

    def labels(self) -> Iterable[ViaLabel]:
        for hub in sorted(self.groups):
            for via, dist in self.groups[hub]:
                yield ViaLabel(hub, via, dist)


@dataclass
class EhlIndex:
    """Uniform-grid label index over a polygonal map.

    `regions[rid]` is None once region rid has been merged away.  `mapper`
    assigns every free cell id (row * ncols + col) its current region id;
    blocked cells map to -1.
    """

    cell_size: float
    ncols: int
    nrows: int
    regions: list[Region | None]
    mapper: list[int]
    vertices: list[ConvexVertex] = field(default_factory=list)
    hub_labels: list[list[HubLabel]] = field(default_factory=list)

    def cell_id(self, cell: tuple[int, int]) -> int:
        i, j = cell
        return j * self.ncols + i

    def region_of_cell(self, cell: tuple[int, int]) -> Region | None:
        rid = self.mapper[self.cell_id(cell)]
        return None if rid < 0 else self.regions[rid]

    def live_regions(self) -> list[Region]:
        return [r for r in self.regions if r is not None]

    @property
    def memory_units(self) -> int:
        return sum(r.label_count for r in self.regions if r is not None)

    def memory_bytes(self, bytes_per_label: int = 16) -> int:
        return self.memory_units * bytes_per_label


def build_ehl(pmap: PolygonalMap, labels: list[list[HubLabel]],
              vertices: list[ConvexVertex], cell_size: float = 1.0) -> EhlIndex:
    """Assemble the uncompressed index: one region per free cell.

    A cell's label table is derived from the vertices visible from any
    traversable point of the cell; fully blocked cells get no region.
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    ncols, nrows = cell_count(pmap, cell_size)
    cellvis = all_cell_visibility(pmap, vertices, cell_size)
    mapper = [-1] * (ncols * nrows)
    regions: list[Region | None] = []
    for cell in sorted(cellvis, key=lambda c: (c[1], c[0])):
        rid = len(regions)
        regions.append(Region(rid, {cell}, build_label_groups(cellvis[cell], labels)))
        mapper[cell[1] * ncols + cell[0]] = rid
    return EhlIndex(cell_size, ncols, nrows, regions, mapper,
                    vertices=vertices, hub_labels=labels)
