"""Shared fixtures: small maps with precomputed pipelines."""

from __future__ import annotations

import pytest

from hubgrid.hub_labels import build_hub_labels, vertex_ordering
from hubgrid.maps import convex_vertices, extract_obstacles, grid_from_strings
from hubgrid.visibility import build_visibility_graph

TOY_ROWS = [
    "........",
    "..@@....",
    "..@@....",
    "........",
    "....@@..",
    "....@@..",
    "........",
    "........",
]

TWO_CHAMBERS = [
    ".....@.....",
    ".....@.....",
    ".....@.....",
    ".....@.....",
    ".....@.....",
]


@pytest.fixture(scope="session")
def toy_pipeline():
    """(pmap, vertices, graph, labels) for a small two-obstacle map."""
    pmap = extract_obstacles(grid_from_strings(TOY_ROWS))
    vertices = convex_vertices(pmap)
    graph = build_visibility_graph(pmap, vertices)
    labels = build_hub_labels(graph, vertex_ordering(graph))
    return pmap, vertices, graph, labels


@pytest.fixture(scope="session")
def split_map():
    """Two traversable chambers separated by a full wall."""
    return extract_obstacles(grid_from_strings(TWO_CHAMBERS))
