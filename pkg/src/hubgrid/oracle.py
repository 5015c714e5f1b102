"""Reference shortest-path solver used to validate the label index.

Runs plain Dijkstra over the visibility graph with the two query points
attached as temporary nodes.  Slow but direct: no labels, no grid cells,
no compression -- just the graph.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .maps import GeometryError, Point, PolygonalMap, point_is_traversable
from .visibility import VisibilityGraph, vertex_positions, visible_mask


@dataclass
class OracleAnswer:
    dist: float | None
    path: list[Point]  # empty when unreachable

    @property
    def reachable(self) -> bool:
        return self.dist is not None


def oracle_query(pmap: PolygonalMap, graph: VisibilityGraph,
                 s: Point | tuple, t: Point | tuple) -> OracleAnswer:
    """Exact shortest Euclidean path between two traversable points."""
    s = Point(*s)
    t = Point(*t)
    for p in (s, t):
        if not point_is_traversable(pmap, p):
            raise GeometryError(f"query point {p} is not traversable")
    if visible_mask(pmap, s, np.asarray([t], dtype=float))[0]:
        d = s.dist(t)
        return OracleAnswer(dist=d, path=[s, t] if s != t else [s])

    pos = vertex_positions(pmap, graph.vertices)
    n = graph.n
    s_vis = visible_mask(pmap, s, pos)
    t_vis = visible_mask(pmap, t, pos)
    if not s_vis.any() or not t_vis.any():
        return OracleAnswer(dist=None, path=[])

    # nodes 0..n-1 are graph vertices, node n is s; t is the implicit goal
    dist = [math.inf] * n
    prev: list[int | None] = [None] * n
    heap = []
    for v in np.nonzero(s_vis)[0]:
        v = int(v)
        d = math.hypot(pos[v, 0] - s.x, pos[v, 1] - s.y)
        if d < dist[v]:
            dist[v] = d
            heap.append((d, v))
    heapq.heapify(heap)
    t_edge = {int(v): math.hypot(pos[v, 0] - t.x, pos[v, 1] - t.y)
              for v in np.nonzero(t_vis)[0]}
    best_t = math.inf
    best_t_via: int | None = None
    settled = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        if d >= best_t:
            break
        if u in t_edge and d + t_edge[u] < best_t:
            best_t = d + t_edge[u]
            best_t_via = u
        for v, w in graph.adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))

    if best_t_via is None:
        return OracleAnswer(dist=None, path=[])
    chain = [best_t_via]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    pts = [s] + [Point(float(pos[v, 0]), float(pos[v, 1])) for v in reversed(chain)] + [t]
    return OracleAnswer(dist=best_t, path=pts)
