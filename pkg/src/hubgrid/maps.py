"""Grid maps, obstacle polygon extraction, and convex corner detection.

A map is a rectangular grid of unit cells, each traversable or blocked.
Geometry lives in "map units": cell (i, j) covers the square
[i, i+1] x [j, j+1], with j increasing down the rows of the map file.
Everything outside the map rectangle counts as blocked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class Point(NamedTuple):
    """A point in map units."""

    x: float
    y: float

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class MapParseError(ValueError):
    """Raised for malformed map files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GeometryError(ValueError):
    """Raised when a query point violates a geometric precondition."""


#: Map symbols an agent may stand on.
TRAVERSABLE_SYMBOLS = frozenset(".G")
#: Map symbols treated as blocked terrain.
BLOCKED_SYMBOLS = frozenset("@OTSW")


@dataclass
class GridMap:
    """A width x height boolean occupancy grid (True = blocked)."""

    width: int
    height: int
    blocked: np.ndarray  # bool array of shape (height, width), row j, col i

    def is_blocked(self, i: int, j: int) -> bool:
        """Blocked test for cell (i, j); out-of-bounds cells are blocked."""
        if 0 <= i < self.width and 0 <= j < self.height:
            return bool(self.blocked[j, i])
        return True

    def to_text(self) -> str:
        """Serialize back to a map-file body (one row per line)."""
        rows = []
        for j in range(self.height):
            rows.append("".join("@" if self.blocked[j, i] else "." for i in range(self.width)))
        return "\n".join(rows)


def grid_from_strings(rows: list[str]) -> GridMap:
    """Build a GridMap from equal-length strings of '.' (free) and '@' (blocked)."""
    height = len(rows)
    width = len(rows[0]) if rows else 0
    blocked = np.zeros((height, width), dtype=bool)
    for j, row in enumerate(rows):
        if len(row) != width:
            raise MapParseError("ragged row", line=j + 1)
        for i, ch in enumerate(row):
            if ch in BLOCKED_SYMBOLS:
                blocked[j, i] = True
            elif ch not in TRAVERSABLE_SYMBOLS:
                raise MapParseError(f"unknown map symbol {ch!r}", line=j + 1)
    return GridMap(width, height, blocked)


def parse_movingai_map(text: str) -> GridMap:
    """Parse a MovingAI-format .map file.

    Expected header::

        type octile
        height <H>
        width <W>
        map

    followed by H rows of W symbols.  '.' and 'G' are traversable;
    '@', 'O', 'T', 'S', 'W' are blocked.  Any other symbol is an error.
    """
    lines = text.splitlines()
    header: dict[str, str] = {}
    body_start = None
    for n, line in enumerate(lines):
        stripped = line.strip()
        if stripped == "map":
            body_start = n + 1
            break
        parts = stripped.split(None, 1)
        if len(parts) == 2:
            header[parts[0].lower()] = parts[1]
        elif stripped:
            raise MapParseError(f"malformed header line {stripped!r}", line=n + 1)
    if body_start is None:
        raise MapParseError("missing 'map' header terminator")
    try:
        height = int(header["height"])
        width = int(header["width"])
    except (KeyError, ValueError) as exc:
        raise MapParseError(f"bad or missing width/height header: {exc}") from exc
    rows = [line for line in lines[body_start:] if line.strip()]
    if len(rows) != height:
        raise MapParseError(f"expected {height} map rows, found {len(rows)}", line=body_start + 1)
    blocked = np.zeros((height, width), dtype=bool)
    for j, row in enumerate(rows):
        row = row.rstrip("\r")
        if len(row) != width:
            raise MapParseError(f"row has {len(row)} symbols, expected {width}", line=body_start + j + 1)
        for i, ch in enumerate(row):
            if ch in BLOCKED_SYMBOLS:
                blocked[j, i] = True
            elif ch not in TRAVERSABLE_SYMBOLS:
                raise MapParseError(f"unknown map symbol {ch!r}", line=body_start + j + 1)
    return GridMap(width, height, blocked)


# ---------------------------------------------------------------------------
# obstacle polygons
# ---------------------------------------------------------------------------

#: axis directions in counter-clockwise order: east, north, west, south
_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass
class Obstacle:
    """One 4-connected blocked component traced into closed vertex loops.

    Loops carry the blocked interior on their left: the outer boundary is
    counter-clockwise, hole boundaries are clockwise.  Consecutive collinear
    vertices are merged away.
    """

    id: int
    loops: list[list[tuple[int, int]]]
    n_cells: int

    def signed_area(self) -> float:
        """Sum of loop signed areas; equals n_cells for a valid trace."""
        total = 0.0
        for loop in self.loops:
            acc = 0
            for (x1, y1), (x2, y2) in zip(loop, loop[1:] + loop[:1]):
                acc += x1 * y2 - x2 * y1
            total += acc / 2.0
        return total


@dataclass
class PolygonalMap:
    """A grid map together with its traced obstacle polygons."""

    grid: GridMap
    obstacles: list[Obstacle]
    component: np.ndarray  # int array (height, width); -1 for free cells
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def width(self) -> int:
        return self.grid.width

    @property
    def height(self) -> int:
        return self.grid.height


def _label_components(grid: GridMap) -> tuple[np.ndarray, int]:
    """4-connected labelling of blocked cells; returns (labels, count)."""
    labels = np.full((grid.height, grid.width), -1, dtype=np.int32)
    next_id = 0
    for j in range(grid.height):
        for i in range(grid.width):
            if not grid.blocked[j, i] or labels[j, i] >= 0:
                continue
            stack = [(i, j)]
            labels[j, i] = next_id
            while stack:
                ci, cj = stack.pop()
                for di, dj in _DIRS:
                    ni, nj = ci + di, cj + dj
                    if 0 <= ni < grid.width and 0 <= nj < grid.height:
                        if grid.blocked[nj, ni] and labels[nj, ni] < 0:
                            labels[nj, ni] = next_id
                            stack.append((ci + di, cj + dj))
            next_id += 1
    return labels, next_id


def _trace_component(grid: GridMap, labels: np.ndarray, comp: int) -> list[list[tuple[int, int]]]:
    """Trace the boundary loops of one component, interior kept on the left.

    Boundary edges are unit lattice edges between a component cell and
    anything else (free cell, another component, or out of bounds).  At a
    lattice point where the component touches itself diagonally, the walk
    takes the left-most turn, which keeps the two corners pinched apart --
    matching the rule that such corners are not traversable.
    """
    # directed edges: start point -> list of end points, interior on left
    out_edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def other_is_foreign(i: int, j: int) -> bool:
        if 0 <= i < grid.width and 0 <= j < grid.height:
            return labels[j, i] != comp
        return True

    js, is_ = np.nonzero(labels == comp)
    for i, j in zip(is_.tolist(), js.tolist()):
        if other_is_foreign(i, j - 1):  # bottom edge, directed east
            out_edges.setdefault((i, j), []).append((i + 1, j))
        if other_is_foreign(i + 1, j):  # right edge, directed north
            out_edges.setdefault((i + 1, j), []).append((i + 1, j + 1))
        if other_is_foreign(i, j + 1):  # top edge, directed west
            out_edges.setdefault((i + 1, j + 1), []).append((i, j + 1))
        if other_is_foreign(i - 1, j):  # left edge, directed south
            out_edges.setdefault((i, j + 1), []).append((i, j))

    loops = []
    while out_edges:
        start = min(out_edges)
        loop = [start]
        prev, cur = start, out_edges[start].pop(0)
        if not out_edges[start]:
            del out_edges[start]
        while cur != start:
            loop.append(cur)
            candidates = out_edges[cur]
            if len(candidates) == 1:
                nxt = candidates[0]
                del out_edges[cur]
            else:
                # pinch point: prefer the left-most turn w.r.t. incoming direction
                din = (cur[0] - prev[0], cur[1] - prev[1])
                left = (-din[1], din[0])
                nxt = None
                for cand in ((cur[0] + left[0], cur[1] + left[1]),
                             (cur[0] + din[0], cur[1] + din[1])):
                    if cand in candidates:
                        nxt = cand
                        break
                if nxt is None:
                    nxt = candidates[0]
                candidates.remove(nxt)
                if not candidates:
                    del out_edges[cur]
            prev, cur = cur, nxt
        loops.append(_merge_collinear(loop))
    return loops


def _merge_collinear(loop: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Drop vertices where the boundary continues straight."""
    out = []
    n = len(loop)
    for k, p in enumerate(loop):
        a = loop[k - 1]
        b = loop[(k + 1) % n]
        if (p[0] - a[0]) * (b[1] - p[1]) != (p[1] - a[1]) * (b[0] - p[0]):
            out.append(p)
    return out


def extract_obstacles(grid: GridMap) -> PolygonalMap:
    """Trace every blocked component into a polygon set."""
    labels, count = _label_components(grid)
    obstacles = []
    for comp in range(count):
        loops = _trace_component(grid, labels, comp)
        n_cells = int((labels == comp).sum())
        obstacles.append(Obstacle(id=comp, loops=loops, n_cells=n_cells))
    return PolygonalMap(grid=grid, obstacles=obstacles, component=labels)


# ---------------------------------------------------------------------------
# convex corners
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexVertex:
    """A convex obstacle corner; the only places a taut path can bend."""

    id: int
    x: int
    y: int
    obstacle: int

    @property
    def point(self) -> Point:
        return Point(float(self.x), float(self.y))


def convex_vertices(pmap: PolygonalMap) -> list[ConvexVertex]:
    """All convex obstacle corners, numbered densely in (y, x) scan order.

    A lattice point is a convex corner when exactly one of its four incident
    cells is blocked.  Corners where two blocked cells meet only diagonally
    are excluded (they cannot be rounded by an agent), as are corners flush
    with the map frame (the outside counts as blocked).
    """
    grid = pmap.grid
    out = []
    for y in range(1, grid.height):
        for x in range(1, grid.width):
            incident = [(x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)]
            hits = [(i, j) for i, j in incident if grid.blocked[j, i]]
            if len(hits) == 1:
                i, j = hits[0]
                out.append(ConvexVertex(id=len(out), x=x, y=y,
                                        obstacle=int(pmap.component[j, i])))
    return out


def bad_corners(pmap: PolygonalMap) -> np.ndarray:
    """Lattice points where blocked cells touch diagonally (non-traversable).

    Sight lines passing exactly through such a point are blocked, and an
    agent cannot squeeze through it.
    """
    grid = pmap.grid
    pts = []
    for y in range(1, grid.height):
        for x in range(1, grid.width):
            sw = grid.blocked[y - 1, x - 1]
            se = grid.blocked[y - 1, x]
            nw = grid.blocked[y, x - 1]
            ne = grid.blocked[y, x]
            if (sw and ne and not se and not nw) or (se and nw and not sw and not ne):
                pts.append((x, y))
    return np.asarray(pts, dtype=float).reshape(-1, 2)


# ---------------------------------------------------------------------------
# cells
# ---------------------------------------------------------------------------


def cell_count(pmap: PolygonalMap, cell_size: float) -> tuple[int, int]:
    """Number of index cells along x and y for the given cell size."""
    ncols = max(1, math.ceil(pmap.width / cell_size - 1e-12))
    nrows = max(1, math.ceil(pmap.height / cell_size - 1e-12))
    return ncols, nrows


def cell_of(pmap: PolygonalMap, p: Point, cell_size: float = 1.0) -> tuple[int, int]:
    """Index cell (i, j) containing point p.

    Points on a shared cell boundary belong to the cell with the larger
    index; points exactly on the map's right/top border are clamped into
    the last cell.  Raises GeometryError for out-of-bounds points.
    """
    if not (0.0 <= p[0] <= pmap.width and 0.0 <= p[1] <= pmap.height):
        raise GeometryError(f"point {p} outside map bounds")
    ncols, nrows = cell_count(pmap, cell_size)
    i = min(int(p[0] // cell_size), ncols - 1)
    j = min(int(p[1] // cell_size), nrows - 1)
    return i, j


def point_is_traversable(pmap: PolygonalMap, p: Point) -> bool:
    """True if an agent may stand at p.

    Obstacle boundaries count as traversable; obstacle interiors, shared
    edges between two blocked cells, diagonal-touch corners, and
    out-of-bounds points do not.
    """
    x, y = p
    if not (0.0 <= x <= pmap.width and 0.0 <= y <= pmap.height):
        return False
    grid = pmap.grid
    xi, yi = math.floor(x), math.floor(y)
    on_vx = x == xi  # on a vertical lattice line
    on_vy = y == yi
    cells = [(xi, yi)]
    if on_vx:
        cells.append((xi - 1, yi))
    if on_vy:
        cells.append((xi, yi - 1))
    if on_vx and on_vy:
        cells.append((xi - 1, yi - 1))
        sw = grid.is_blocked(xi - 1, yi - 1)
        se = grid.is_blocked(xi, yi - 1)
        nw = grid.is_blocked(xi - 1, yi)
        ne = grid.is_blocked(xi, yi)
        if (sw and ne) or (se and nw):
            # diagonal pinch: not traversable even when the other two cells are free
            return False
    return any(not grid.is_blocked(i, j) for i, j in cells)
