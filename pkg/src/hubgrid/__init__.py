"""Memory-budgeted grid hub-label index for Euclidean shortest paths.

Pipeline: polygonal map -> visibility graph over convex obstacle corners
-> pruned hub labeling -> per-grid-cell via-labels -> greedy region
merging down to a memory budget -> exact point-to-point queries.
"""

from .compress import CompressionConfig, compress, jaccard, merge_regions
from .hub_labels import HubLabel, build_hub_labels, hl_distance, vertex_ordering
from .index import EhlIndex, Region, ViaLabel, build_ehl, build_label_groups
from .io import BuildMeta, load_index, save_index
from .maps import (ConvexVertex, GeometryError, GridMap, MapParseError, Point,
                   PolygonalMap, convex_vertices, extract_obstacles,
                   grid_from_strings, parse_movingai_map)
from .oracle import OracleAnswer, oracle_query
from .pipeline import BuildResult, build_index
from .query import MapVisibility, QueryResult, shortest_distance, shortest_path
from .visibility import VisibilityGraph, build_visibility_graph, co_visible
from .workload import (ClusterSpec, build_workload, gen_cluster_spec,
                       gen_mixed_queries, gen_queries)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
