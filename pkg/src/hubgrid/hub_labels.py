"""Hub labeling with pruned landmark Dijkstra searches.

Every vertex v gets a label set H(v) of (hub, distance, next_hop) entries
such that any connected pair (u, v) shares a hub lying on a shortest u-v
path.  Distances between labeled vertices then reduce to a merge join of
two sorted label lists.
"""

from __future__ import annotations

import heapq
from typing import NamedTuple

import numpy as np

from .visibility import VisibilityGraph


class HubLabel(NamedTuple):
    """One label entry: distance from the owning vertex to hub, and the
    first vertex after the owner on a shortest path toward the hub."""

    hub: int
    dist: float
    next_hop: int


#: Slack used only by the ordering heuristic when counting covered pairs.
#: Label pruning itself compares exactly: a label is dropped only when the
#: detour sum is certifiably no longer than the direct distance.
EPS_DIST = 1e-9


def _all_pairs(graph: VisibilityGraph) -> np.ndarray:
    """All-pairs shortest-path matrix via one Dijkstra per vertex."""
    n = graph.n
    inf = float("inf")
    dist = np.full((n, n), inf)
    for src in range(n):
        row = dist[src]
        row[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, w = heapq.heappop(heap)
            if d > row[w]:
                continue
            for v, length in graph.adj[w]:
                nd = d + length
                if nd < row[v]:
                    row[v] = nd
                    heapq.heappush(heap, (nd, v))
    return dist


def vertex_ordering(graph: VisibilityGraph) -> list[int]:
    """Hub processing order: descending shortest-path coverage, ties by id.

    A vertex covers the pair (x, y) when some shortest x-y path passes
    through it.  Vertices lying on many shortest paths make the most
    effective hubs, so they are processed first; pairs a vertex cannot
    cover (different component) do not count toward it.
    """
    n = graph.n
    if n == 0:
        return []
    dist = _all_pairs(graph)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1) & np.isfinite(dist)
    coverage = [0] * n
    for v in range(n):
        through = dist[v][:, None] + dist[v][None, :]
        coverage[v] = int(np.count_nonzero(upper & (through <= dist + EPS_DIST)))
    return sorted(range(n), key=lambda v: (-coverage[v], v))


def build_hub_labels(graph: VisibilityGraph, order: list[int] | None = None) -> list[list[HubLabel]]:
    """Pruned labeling: one Dijkstra per vertex in hub order.

    A settled vertex w is pruned (receives no label, is not expanded) when
    the labels built so far already certify a route of no greater length,
    so later searches stay local.  Labels are kept sorted by hub id.
    """
    if order is None:
        order = vertex_ordering(graph)
    n = graph.n
    labels: list[list[HubLabel]] = [[] for _ in range(n)]
    # label distances as dicts for O(1) pruning queries
    label_maps: list[dict[int, float]] = [{} for _ in range(n)]

    for hub in order:
        hub_map = label_maps[hub]
        dist = {hub: 0.0}
        # next_hop[w]: first vertex after w on the w -> hub shortest path
        hop = {hub: hub}
        heap = [(0.0, hub)]
        settled = set()
        while heap:
            d, w = heapq.heappop(heap)
            if w in settled:
                continue
            settled.add(w)
            # prune if an existing common hub already covers (hub, w) at <= d
            wmap = label_maps[w]
            small, large = (wmap, hub_map) if len(wmap) < len(hub_map) else (hub_map, wmap)
            covered = False
            for h, dh in small.items():
                other = large.get(h)
                if other is not None and dh + other <= d:
                    covered = True
                    break
            if covered:
                continue
            labels[w].append(HubLabel(hub, d, hop[w]))
            wmap[hub] = d
            for v, length in graph.adj[w]:
                nd = d + length
                if nd < dist.get(v, float("inf")):
                    dist[v] = nd
                    hop[v] = w if v != hub else v
                    heapq.heappush(heap, (nd, v))

    for lab in labels:
        lab.sort(key=lambda e: e.hub)
    return labels


def hl_distance(a: list[HubLabel], b: list[HubLabel]) -> tuple[float, int] | None:
    """Merge join of two sorted label lists.

    Returns (distance, meeting hub) minimizing the two-leg sum, preferring
    the smaller hub id on ties; None when no hub is shared (unreachable).
    """
    best: tuple[float, int] | None = None
    i = j = 0
    while i < len(a) and j < len(b):
        ha, hb = a[i].hub, b[j].hub
        if ha == hb:
            d = a[i].dist + b[j].dist
            if best is None or d < best[0]:
                best = (d, ha)
            i += 1
            j += 1
        elif ha < hb:
            i += 1
        else:
            j += 1
    return best


def _walk_to_hub(labels: list[list[HubLabel]], v: int, hub: int) -> list[int]:
    """Follow next_hop pointers from v to hub (inclusive)."""
    path = [v]
    cur = v
    while cur != hub:
        entry = next(e for e in labels[cur] if e.hub == hub)
        cur = entry.next_hop
        path.append(cur)
    return path


def unfold_path(labels: list[list[HubLabel]], u: int, v: int) -> list[int] | None:
    """Vertex sequence of a shortest u-v path via the best common hub."""
    best = hl_distance(labels[u], labels[v])
    if best is None:
        return None
    hub = best[1]
    left = _walk_to_hub(labels, u, hub)
    right = _walk_to_hub(labels, v, hub)
    return left + right[::-1][1:]
