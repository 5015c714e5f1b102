"""Greedy region merging under a memory budget.

Starting from one region per cell, repeatedly take the lowest-score live
region and merge it with the most label-similar adjacent region until the
total via-label count fits the budget.  Merging regions with near-identical
hub sets deduplicates most of their labels, so memory shrinks while every
label needed for exact answers is preserved.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .index import EhlIndex, Region


@dataclass(frozen=True)
class CompressionConfig:
    """Knobs for the merge loop.

    budget_units is the target via-label count.  In workload_aware mode a
    cell's starting score is 1 plus its historical query-endpoint count, and
    neighbor selection blends label similarity with a preference for merging
    into rarely queried regions (weight `alpha`).
    """

    budget_units: int
    mode: str = "uniform"  # "uniform" | "workload_aware"
    alpha: float = 0.2
    workload: dict[tuple[int, int], int] | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget_units < 0:
            raise ValueError("budget_units must be >= 0")
        if self.mode not in ("uniform", "workload_aware"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if (self.workload is not None) != (self.mode == "workload_aware"):
            raise ValueError("workload must be given exactly when mode is workload_aware")


def initialize_scores(index: EhlIndex, cfg: CompressionConfig) -> None:
    """Set every single-cell region's score: 1, plus its workload count."""
    for region in index.live_regions():
        if len(region.cells) != 1:
            raise ValueError("scores must be initialized before any merge")
        score = 1.0
        if cfg.mode == "workload_aware":
            cell = next(iter(region.cells))
            score += cfg.workload.get(cell, 0)
        region.score = score


def jaccard(a: Region, b: Region) -> float:
    """Similarity of the two regions' hub-id sets; both empty counts as 1 so
    that label-free regions merge away immediately."""
    ha, hb = set(a.groups), set(b.groups)
    union = len(ha | hb)
    if union == 0:
        return 1.0
    return len(ha & hb) / union


def _neighbor_ids(index: EhlIndex, region: Region) -> set[int]:
    """Ids of distinct live regions edge-adjacent to `region`."""
    out: set[int] = set()
    for i, j in region.cells:
        for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
            if 0 <= ni < index.ncols and 0 <= nj < index.nrows:
                rid = index.mapper[nj * index.ncols + ni]
                if rid >= 0 and rid != region.id:
                    out.add(rid)
    return out


def adjacent_region_selection(index: EhlIndex, region: Region,
                              cfg: CompressionConfig) -> int | None:
    """Pick the best merge partner among edge-adjacent regions.

    Uniform mode maximizes hub-set similarity; workload-aware mode maximizes
    (1 - alpha) * similarity + alpha / partner_score, steering merges away
    from heavily queried regions.  Ties go to the smallest region id; None
    when the region has no neighbor (isolated component).
    """
    best_id: int | None = None
    best_key = -1.0
    for rid in sorted(_neighbor_ids(index, region)):
        other = index.regions[rid]
        sim = jaccard(region, other)
        if cfg.mode == "workload_aware":
            key = (1.0 - cfg.alpha) * sim + cfg.alpha / other.score
        else:
            key = sim
        if key > best_key:
            best_key, best_id = key, rid
    return best_id


def merge_regions(index: EhlIndex, e: Region, r: Region) -> int:
    """Merge r into e; returns the number of duplicate labels dropped.

    e absorbs r's cells, labels (deduplicated per (hub, via) pair) and
    score; r is retired and its cells remapped to e.
    """
    if e.id == r.id:
        raise ValueError("cannot merge a region with itself")
    dropped = 0
    for hub, pairs in r.groups.items():
        mine = e.groups.get(hub)
        if mine is None:
            e.groups[hub] = list(pairs)
            continue
        have = {via for via, _ in mine}
        added = [p for p in pairs if p[0] not in have]
        dropped += len(pairs) - len(added)
        if added:
            mine += added
            mine.sort()
    e.cells |= r.cells
    e.score += r.score
    e.generation += 1
    for cell in r.cells:
        index.mapper[index.cell_id(cell)] = e.id
    index.regions[r.id] = None
    return dropped


def compress(index: EhlIndex, cfg: CompressionConfig) -> str:
    """Merge until the label count fits cfg.budget_units.

    Returns "fit" when the budget is met, or "single_region_overflow" when
    every connected component has collapsed to one region and memory still
    exceeds the budget.  The merge sequence is deterministic: the heap
    orders by (score, region id) and stale entries are skipped via
    per-region generation counters.
    """
    initialize_scores(index, cfg)
    memory = index.memory_units
    heap = [(r.score, r.id, r.generation) for r in index.live_regions()]
    heapq.heapify(heap)
    while memory > cfg.budget_units and heap:
        score, rid, gen = heapq.heappop(heap)
        region = index.regions[rid]
        if region is None or region.generation != gen or region.score != score:
            continue
        partner = adjacent_region_selection(index, region, cfg)
        if partner is None:
            # isolated component fully merged: retire from consideration
            continue
        memory -= merge_regions(index, region, index.regions[partner])
        heapq.heappush(heap, (region.score, region.id, region.generation))
    return "fit" if memory <= cfg.budget_units else "single_region_overflow"
