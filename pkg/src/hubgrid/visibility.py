"""Sight-line predicates, per-cell visible-vertex lists, visibility graph.

Two points are co-visible when the open segment between them stays out of
every blocked cell's interior and does not pass through a corner where two
blocked cells touch diagonally.  Grazing along obstacle edges and around
convex corners is allowed.

The per-cell lists are computed exactly (no false negatives) by subtracting
radial shadow polygons from the free space and intersecting the result with
the cell squares, rather than by sampling points inside the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import box as shapely_box
from shapely.ops import unary_union

from .maps import (
    ConvexVertex,
    GeometryError,
    Point,
    PolygonalMap,
    bad_corners,
    cell_count,
    point_is_traversable,
)

#: tolerance for "strictly inside" tests against blocked cell interiors
EPS = 1e-9
_BIG = 1e30


def _context(pmap: PolygonalMap):
    """Cached numpy arrays describing the blocked geometry.

    Each blocked cell is stored as an epsilon-adjusted box: faces shared
    with another blocked cell are pushed outward so interior seams between
    blocked cells count as blocked, while faces on the true obstacle
    boundary are pulled inward so grazing along the boundary stays visible.
    """
    ctx = pmap._cache.get("vis_ctx")
    if ctx is None:
        blocked = pmap.grid.blocked
        js, is_ = np.nonzero(blocked)
        if len(is_):
            lo = np.stack([is_, js], axis=1).astype(float)
            hi = lo + 1.0
            # neighbors, with everything outside the map counting as blocked
            pad = np.pad(blocked, 1, constant_values=True)
            left = pad[js + 1, is_]
            right = pad[js + 1, is_ + 2]
            down = pad[js, is_ + 1]
            up = pad[js + 2, is_ + 1]
            lo[:, 0] += np.where(left, -EPS, EPS)
            hi[:, 0] += np.where(right, EPS, -EPS)
            lo[:, 1] += np.where(down, -EPS, EPS)
            hi[:, 1] += np.where(up, EPS, -EPS)
        else:
            lo = np.zeros((0, 2))
            hi = np.zeros((0, 2))
        ctx = (lo, hi, bad_corners(pmap))
        pmap._cache["vis_ctx"] = ctx
    return ctx


def visible_mask(pmap: PolygonalMap, p: Point | tuple, targets: np.ndarray) -> np.ndarray:
    """Boolean array: which target points are co-visible from p.

    Endpoint validity is not checked here; see co_visible for the scalar,
    precondition-checked variant.
    """
    lo_box, hi_box, corners = _context(pmap)
    p = np.asarray(p, dtype=float)
    t = np.asarray(targets, dtype=float).reshape(-1, 2)
    d = t - p  # (n, 2)
    n = len(t)
    degenerate = (d[:, 0] == 0.0) & (d[:, 1] == 0.0)
    blocked = np.zeros(n, dtype=bool)

    if len(lo_box):
        lo = lo_box[None, :, :]  # (1, m, 2)
        hi = hi_box[None, :, :]
        dd = d[:, None, :]       # (n, 1, 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - p) / dd
            t2 = (hi - p) / dd
        enter = np.minimum(t1, t2)
        exit_ = np.maximum(t1, t2)
        # axes the segment is parallel to: inside the slab -> always, else never
        par = dd == 0.0
        inside = (lo < p) & (p < hi)
        enter = np.where(par, np.where(inside, -_BIG, _BIG), enter)
        exit_ = np.where(par, np.where(inside, _BIG, -_BIG), exit_)
        tmin = np.maximum(np.maximum(enter[:, :, 0], enter[:, :, 1]), 0.0)
        tmax = np.minimum(np.minimum(exit_[:, :, 0], exit_[:, :, 1]), 1.0)
        blocked |= ((tmax - tmin) > 1e-12).any(axis=1)

    if len(corners):
        w = corners[None, :, :] - p  # (1, k, 2)
        dn = d[:, None, :]
        len2 = np.maximum((dn * dn).sum(axis=2), 1e-300)
        tproj = (w * dn).sum(axis=2) / len2
        cross = np.abs(dn[:, :, 0] * w[:, :, 1] - dn[:, :, 1] * w[:, :, 0])
        dist = cross / np.sqrt(len2)
        through = (dist < EPS) & (tproj > 1e-12) & (tproj < 1.0 - 1e-12)
        blocked |= through.any(axis=1)

    blocked[degenerate] = False
    return ~blocked


def co_visible(pmap: PolygonalMap, p: Point | tuple, q: Point | tuple) -> bool:
    """Symmetric sight-line predicate between two traversable points."""
    for pt in (p, q):
        if not point_is_traversable(pmap, Point(*pt)):
            raise GeometryError(f"point {pt} is not traversable")
    return bool(visible_mask(pmap, p, np.asarray([q], dtype=float))[0])


def visible_vertices_from_point(pmap: PolygonalMap, p: Point | tuple,
                                vertices: list[ConvexVertex]) -> list[int]:
    """Ids of convex vertices co-visible from p."""
    if not point_is_traversable(pmap, Point(*p)):
        raise GeometryError(f"point {p} is not traversable")
    pos = vertex_positions(pmap, vertices)
    mask = visible_mask(pmap, p, pos)
    return [v.id for v, ok in zip(vertices, mask) if ok]


def vertex_positions(pmap: PolygonalMap, vertices: list[ConvexVertex]) -> np.ndarray:
    key = ("vpos", len(vertices))
    pos = pmap._cache.get(key)
    if pos is None:
        pos = np.asarray([(v.x, v.y) for v in vertices], dtype=float).reshape(-1, 2)
        pmap._cache[key] = pos
    return pos


# ---------------------------------------------------------------------------
# visibility graph
# ---------------------------------------------------------------------------


@dataclass
class VisibilityGraph:
    """Undirected graph on convex vertices with Euclidean edge lengths."""

    vertices: list[ConvexVertex]
    adj: list[list[tuple[int, float]]]  # adj[v] = [(neighbor id, length), ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return any(w == v for w, _ in self.adj[u])


def build_visibility_graph(pmap: PolygonalMap, vertices: list[ConvexVertex]) -> VisibilityGraph:
    """Connect every co-visible pair of convex vertices."""
    pos = vertex_positions(pmap, vertices)
    n = len(vertices)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u in range(n):
        if u + 1 >= n:
            break
        mask = visible_mask(pmap, pos[u], pos[u + 1:])
        for off in np.nonzero(mask)[0]:
            v = u + 1 + int(off)
            w = float(np.hypot(*(pos[v] - pos[u])))
            adj[u].append((v, w))
            adj[v].append((u, w))
    return VisibilityGraph(vertices=vertices, adj=adj)


# ---------------------------------------------------------------------------
# cell visibility lists
# ---------------------------------------------------------------------------


def free_space_polygon(pmap: PolygonalMap):
    """Map rectangle minus all blocked cells, as a shapely geometry."""
    poly = pmap._cache.get("free_poly")
    if poly is None:
        frame = shapely_box(0.0, 0.0, float(pmap.width), float(pmap.height))
        js, is_ = np.nonzero(pmap.grid.blocked)
        if len(is_):
            blocked = unary_union([shapely_box(x, y, x + 1.0, y + 1.0)
                                   for x, y in zip(is_, js)])
            poly = frame.difference(blocked)
        else:
            poly = frame
        pmap._cache["free_poly"] = poly
    return poly


def _boundary_segments(pmap: PolygonalMap) -> list[tuple[tuple, tuple]]:
    """Obstacle boundary segments with the blocked interior on their left."""
    segs = pmap._cache.get("boundary_segs")
    if segs is None:
        segs = []
        for obs in pmap.obstacles:
            for loop in obs.loops:
                for a, b in zip(loop, loop[1:] + loop[:1]):
                    segs.append((a, b))
        pmap._cache["boundary_segs"] = segs
    return segs


def vertex_visible_region(pmap: PolygonalMap, p: Point | tuple):
    """Everything visible from p: free space minus radial edge shadows.

    Shadows are cast through the open interior of every obstacle edge not
    collinear with p, so sight lines that merely graze edge endpoints
    (convex corners) remain visible, matching co_visible.
    """
    px, py = float(p[0]), float(p[1])
    reach = 4.0 * (pmap.width + pmap.height) + 8.0
    quads = []
    for (ax, ay), (bx, by) in _boundary_segments(pmap):
        # Any sight line crossing the open interior of a boundary edge has
        # passed through blocked interior, whichever side p lies on; only
        # edges collinear with p cast nothing (grazing is allowed).
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross == 0.0:
            continue
        da = math.hypot(ax - px, ay - py)
        db = math.hypot(bx - px, by - py)
        if da == 0.0 or db == 0.0:
            continue
        fa = (px + (ax - px) * (1.0 + reach / da), py + (ay - py) * (1.0 + reach / da))
        fb = (px + (bx - px) * (1.0 + reach / db), py + (by - py) * (1.0 + reach / db))
        quads.append(shapely.Polygon([(ax, ay), (bx, by), fb, fa]))
    free = free_space_polygon(pmap)
    if not quads:
        return free
    return free.difference(unary_union(quads))


def _free_cells(pmap: PolygonalMap, cell_size: float) -> list[tuple[int, int]]:
    """Index cells that contain at least some traversable area."""
    ncols, nrows = cell_count(pmap, cell_size)
    if cell_size == 1.0:
        return [(i, j) for j in range(nrows) for i in range(ncols)
                if not pmap.grid.blocked[j, i]]
    free = free_space_polygon(pmap)
    out = []
    for j in range(nrows):
        for i in range(ncols):
            b = shapely_box(i * cell_size, j * cell_size,
                            min((i + 1) * cell_size, pmap.width),
                            min((j + 1) * cell_size, pmap.height))
            if free.intersection(b).area > 1e-12:
                out.append((i, j))
    return out


def all_cell_visibility(pmap: PolygonalMap, vertices: list[ConvexVertex],
                        cell_size: float = 1.0) -> dict[tuple[int, int], set[int]]:
    """For every free cell, the set of vertex ids visible from some point of it.

    The sets may over-include (a vertex visible only from a zero-width
    grazing line still counts) but never miss a vertex that any traversable
    point of the cell can see.
    """
    key = ("cellvis", cell_size)
    cached = pmap._cache.get(key)
    if cached is not None:
        return cached
    cells = _free_cells(pmap, cell_size)
    lists: dict[tuple[int, int], set[int]] = {c: set() for c in cells}
    boxes = np.array([
        shapely_box(i * cell_size, j * cell_size,
                    min((i + 1) * cell_size, pmap.width),
                    min((j + 1) * cell_size, pmap.height))
        for i, j in cells
    ], dtype=object)
    for v in vertices:
        region = vertex_visible_region(pmap, (v.x, v.y))
        hits = shapely.intersects(np.asarray([region], dtype=object), boxes)
        for c, hit in zip(cells, hits):
            if hit:
                lists[c].add(v.id)
    pmap._cache[key] = lists
    return lists


def cell_visibility_list(pmap: PolygonalMap, vertices: list[ConvexVertex],
                         cell: tuple[int, int], cell_size: float = 1.0) -> set[int]:
    """Visible-vertex set for one cell (empty for fully blocked cells)."""
    return all_cell_visibility(pmap, vertices, cell_size).get(tuple(cell), set())
