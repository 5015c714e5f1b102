"""Query-set generators: uniform, clustered, mixed, and workload counting.

Clustered sets mimic localized traffic: endpoints are drawn from a few
small rectangles (each 10% of the map's width and height).  A workload is
the per-cell count of historical query endpoints, consumed by the
workload-aware compressor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .maps import GeometryError, Point, PolygonalMap, cell_of, point_is_traversable

#: rejection-sampling cap for placing cluster rectangles
MAX_PLACEMENT_ATTEMPTS = 10_000


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def center(self) -> Point:
        return Point((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)


@dataclass(frozen=True)
class ClusterSpec:
    rectangles: tuple[Rect, ...]
    seed: int


def _components(pmap: PolygonalMap) -> dict[tuple[int, int], int]:
    """Connected-component label per free grid cell (4-neighbor flood fill)."""
    cached = pmap._cache.get("components")
    if cached is not None:
        return cached
    grid = pmap.grid
    comp: dict[tuple[int, int], int] = {}
    next_label = 0
    for j in range(grid.height):
        for i in range(grid.width):
            if grid.blocked[j, i] or (i, j) in comp:
                continue
            stack = [(i, j)]
            comp[(i, j)] = next_label
            while stack:
                ci, cj = stack.pop()
                for ni, nj in ((ci - 1, cj), (ci + 1, cj), (ci, cj - 1), (ci, cj + 1)):
                    if (0 <= ni < grid.width and 0 <= nj < grid.height
                            and not grid.blocked[nj, ni] and (ni, nj) not in comp):
                        comp[(ni, nj)] = next_label
                        stack.append((ni, nj))
            next_label += 1
    pmap._cache["components"] = comp
    return comp


def _component_of_point(comp: dict[tuple[int, int], int], p: Point) -> int | None:
    return comp.get((int(p[0]), int(p[1])))


def _sample_free_point(pmap: PolygonalMap, rng: random.Random,
                       rect: Rect | None = None) -> Point:
    """Uniform traversable point inside rect (or the whole map)."""
    x0, y0 = (rect.x0, rect.y0) if rect else (0.0, 0.0)
    x1, y1 = (rect.x1, rect.y1) if rect else (float(pmap.width), float(pmap.height))
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        p = Point(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if point_is_traversable(pmap, p):
            return p
    raise GeometryError("could not sample a traversable point (area fully blocked?)")


def gen_cluster_spec(pmap: PolygonalMap, x: int, seed: int) -> ClusterSpec:
    """Place x axis-aligned rectangles sized 10% x 10% of the map.

    Centers are drawn over the traversable area; a placement is accepted
    only when every rectangle's center shares a connected component with at
    least one other rectangle's center, so cross-rectangle queries exist.
    """
    rng = random.Random(seed)
    w = 0.10 * pmap.width
    h = 0.10 * pmap.height
    comp = _components(pmap)
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        rects = []
        for _ in range(x):
            c = _sample_free_point(pmap, rng)
            cx = min(max(c.x, w / 2), pmap.width - w / 2)
            cy = min(max(c.y, h / 2), pmap.height - h / 2)
            rects.append(Rect(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2))
        comps = [_component_of_point(comp, r.center) for r in rects]
        if any(c is None for c in comps):
            continue
        if all(comps.count(c) >= 2 for c in comps) or x == 1:
            return ClusterSpec(tuple(rects), seed)
    raise GeometryError(f"could not place {x} mutually reachable cluster rectangles")


def sample_query(pmap: PolygonalMap, spec: ClusterSpec | None,
                 rng: random.Random) -> tuple[Point, Point]:
    """One reachable (s, t) pair, endpoints clustered when spec is given."""
    comp = _components(pmap)
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        if spec is None:
            s = _sample_free_point(pmap, rng)
            t = _sample_free_point(pmap, rng)
        else:
            rs, rt = rng.choice(spec.rectangles), rng.choice(spec.rectangles)
            try:
                s = _sample_free_point(pmap, rng, rs)
                t = _sample_free_point(pmap, rng, rt)
            except GeometryError:
                continue
        cs, ct = _component_of_point(comp, s), _component_of_point(comp, t)
        if cs is not None and cs == ct:
            return s, t
    raise GeometryError("could not sample a reachable query pair")


def gen_queries(pmap: PolygonalMap, spec: ClusterSpec | None, n: int,
                seed: int) -> list[tuple[Point, Point]]:
    rng = random.Random(seed)
    return [sample_query(pmap, spec, rng) for _ in range(n)]


def gen_mixed_queries(pmap: PolygonalMap, spec: ClusterSpec, n: int,
                      adherence: int, seed: int) -> list[tuple[Point, Point]]:
    """n pairs, adherence% drawn from the cluster spec, the rest uniform,
    shuffled deterministically."""
    if not 0 <= adherence <= 100:
        raise ValueError("adherence must be in [0, 100]")
    rng = random.Random(seed)
    n_cluster = n * adherence // 100
    queries = [sample_query(pmap, spec, rng) for _ in range(n_cluster)]
    queries += [sample_query(pmap, None, rng) for _ in range(n - n_cluster)]
    rng.shuffle(queries)
    return queries


def build_workload(pmap: PolygonalMap, spec: ClusterSpec | None, n: int,
                   cell_size: float, seed: int) -> dict[tuple[int, int], int]:
    """Per-cell endpoint counts over n sampled historical queries."""
    counts: dict[tuple[int, int], int] = {}
    for s, t in gen_queries(pmap, spec, n, seed):
        for p in (s, t):
            c = cell_of(pmap, p, cell_size)
            counts[c] = counts.get(c, 0) + 1
    return counts


def write_query_file(path: str, queries: list[tuple[Point, Point]]) -> None:
    with open(path, "w") as fh:
        for s, t in queries:
            fh.write(f"{s[0]!r} {s[1]!r} {t[0]!r} {t[1]!r}\n")


def read_query_file(path: str) -> list[tuple[Point, Point]]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sx, sy, tx, ty = map(float, line.split())
            out.append((Point(sx, sy), Point(tx, ty)))
    return out


def read_scen_file(path: str) -> list[tuple[Point, Point]]:
    """MovingAI .scen query rows; start/goal cells interpreted at centers."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.lower().startswith("version"):
                continue
            cols = line.split("\t")
            if len(cols) < 8:
                cols = line.split()
            sx, sy, tx, ty = (float(c) + 0.5 for c in cols[4:8])
            out.append((Point(sx, sy), Point(tx, ty)))
    return out
