"""Shortest-distance and shortest-path queries over the grid index.

A query locates the endpoint regions, merge-joins their sorted hub lists,
and for each common hub combines the best walk-to-a-visible-via leg on each
side.  Visibility is abstracted behind a small provider interface so the
engine can run against either a real map or a fixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hub_labels import HubLabel, _walk_to_hub
from .index import EhlIndex, Region
from .maps import (GeometryError, Point, PolygonalMap, ConvexVertex, cell_of,
                   point_is_traversable)
from .visibility import co_visible, visible_mask, vertex_positions


class MapVisibility:
    """Visibility provider backed by a polygonal map.

    Point-to-vertex checks are memoized per point, so repeated hub groups
    sharing via vertices cost one segment test each.
    """

    def __init__(self, pmap: PolygonalMap, vertices: list[ConvexVertex]):
        self.pmap = pmap
        self.positions = vertex_positions(pmap, vertices)
        self._memo: dict[tuple[float, float, int], bool] = {}

    def position(self, vid: int) -> tuple[float, float]:
        x, y = self.positions[vid]
        return float(x), float(y)

    def co_visible(self, p: Point, q: Point) -> bool:
        return co_visible(self.pmap, p, q)

    def sees_vertex(self, p: Point, vid: int) -> bool:
        key = (p[0], p[1], vid)
        hit = self._memo.get(key)
        if hit is None:
            hit = bool(visible_mask(self.pmap, p, self.positions[vid:vid + 1])[0])
            self._memo[key] = hit
        return hit

    def traversable(self, p: Point) -> bool:
        return point_is_traversable(self.pmap, p)


@dataclass
class QueryResult:
    """Answer to one query; dist is None when s and t are disconnected."""

    dist: float | None
    path: list[Point] | None = None
    hub: int | None = None
    via_s: int | None = None
    via_t: int | None = None
    labels_inspected: int = 0

    @property
    def reachable(self) -> bool:
        return self.dist is not None


def locate_region(index: EhlIndex, p: Point) -> Region:
    """Region owning the cell containing p.

    A point on the shared edge of a blocked and a free cell is traversable
    but cell_of may land it on the blocked side; the free edge-adjacent
    neighbor is used in that case.
    """
    i = int(p[0] // index.cell_size)
    j = int(p[1] // index.cell_size)
    i = min(max(i, 0), index.ncols - 1)
    j = min(max(j, 0), index.nrows - 1)
    region = index.region_of_cell((i, j))
    if region is not None:
        return region
    for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
        if 0 <= ni < index.ncols and 0 <= nj < index.nrows:
            region = index.region_of_cell((ni, nj))
            if region is not None:
                return region
    raise GeometryError(f"no region contains point {p!r}")


def vdist_min(p: Point, hub: int, region: Region, vis) -> tuple[float, int | None, int]:
    """Cheapest hub access from p through a visible via vertex.

    Scans the region's label group for `hub`, skipping vias invisible from
    p; returns (distance, via id, vias inspected), with distance infinity
    and via None when no via is visible.
    """
    group = region.groups.get(hub)
    if group is None:
        raise KeyError(f"hub {hub} not in region {region.id}")
    best = math.inf
    best_via: int | None = None
    for via, d in group:
        if not vis.sees_vertex(p, via):
            continue
        vx, vy = vis.position(via)
        total = math.hypot(p[0] - vx, p[1] - vy) + d
        if total < best:
            best, best_via = total, via
    return best, best_via, len(group)


def _check_endpoints(vis, s: Point, t: Point) -> None:
    for p in (s, t):
        if not vis.traversable(p):
            raise GeometryError(f"query endpoint {p!r} is blocked or out of bounds")


def shortest_distance(index: EhlIndex, vis, s: Point, t: Point) -> QueryResult:
    """Exact shortest distance between two traversable points.

    Co-visible pairs short-circuit to the straight-line distance; otherwise
    the minimum over common hubs of the two endpoint regions is taken, ties
    between hubs going to the smaller hub id.
    """
    _check_endpoints(vis, s, t)
    if s == t:
        return QueryResult(0.0)
    if vis.co_visible(s, t):
        return QueryResult(math.hypot(s[0] - t[0], s[1] - t[1]))
    rs = locate_region(index, s)
    rt = locate_region(index, t)
    hs, ht = rs.hubs, rt.hubs
    inspected = len(hs) + len(ht)
    best = math.inf
    result = QueryResult(None)
    i = j = 0
    while i < len(hs) and j < len(ht):
        if hs[i] == ht[j]:
            hub = hs[i]
            ds, via_s, k1 = vdist_min(s, hub, rs, vis)
            dt, via_t, k2 = vdist_min(t, hub, rt, vis)
            inspected += k1 + k2
            total = ds + dt
            if total < best:
                best = total
                result = QueryResult(total, hub=hub, via_s=via_s, via_t=via_t)
            i += 1
            j += 1
        elif hs[i] < ht[j]:
            i += 1
        else:
            j += 1
    result.labels_inspected = inspected
    return result


def shortest_path(index: EhlIndex, vis, s: Point, t: Point) -> QueryResult:
    """Shortest distance plus the polyline realizing it.

    The polyline is s, the s-side via vertex, the label next-hop chain
    through the meeting hub to the t-side via vertex, then t; consecutive
    duplicates (e.g. when a via *is* the hub) are collapsed.
    """
    _check_endpoints(vis, s, t)
    if s == t:
        return QueryResult(0.0, path=[Point(*s)])
    if vis.co_visible(s, t):
        return QueryResult(math.hypot(s[0] - t[0], s[1] - t[1]),
                           path=[Point(*s), Point(*t)])
    result = shortest_distance(index, vis, s, t)
    if not result.reachable:
        return result
    left = _walk_to_hub(index.hub_labels, result.via_s, result.hub)
    right = _walk_to_hub(index.hub_labels, result.via_t, result.hub)
    ids = left + right[::-1][1:]
    points: list[Point] = [Point(*s)]
    for vid in ids:
        q = Point(*vis.position(vid))
        if q != points[-1]:
            points.append(q)
    if Point(*t) != points[-1]:
        points.append(Point(*t))
    result.path = points
    return result
