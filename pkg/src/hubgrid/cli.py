"""Command-line interface: build, query, verify, visualize, gen-queries, bench."""

from __future__ import annotations

import argparse
import csv
import hashlib
import statistics
import sys
import time

from .index import EhlIndex
from .io import BuildMeta, load_index, save_index
from .maps import Point, PolygonalMap, convex_vertices, extract_obstacles, parse_movingai_map
from .oracle import oracle_query
from .pipeline import build_index
from .query import MapVisibility, shortest_distance, shortest_path
from .visibility import build_visibility_graph
from .workload import (build_workload, gen_cluster_spec, gen_mixed_queries,
                       gen_queries, read_query_file, read_scen_file,
                       write_query_file)

BYTES_PER_LABEL = 16

BENCH_COLUMNS = ["map", "budget_percent", "mode", "memory_units", "estimated_mb",
                 "build_seconds", "mean_us", "median_us", "p99_us",
                 "mean_labels_inspected", "verified_pass_rate"]


def _load_map(path: str) -> PolygonalMap:
    with open(path) as fh:
        return extract_obstacles(parse_movingai_map(fh.read()))


def _read_queries(path: str) -> list[tuple[Point, Point]]:
    return read_scen_file(path) if path.endswith(".scen") else read_query_file(path)


def _read_workload_counts(path: str) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if len(parts) == 3:
                i, j, c = map(int, parts)
                counts[(i, j)] = c
    return counts


def cmd_build(args) -> int:
    pmap = _load_map(args.map)
    workload = _read_workload_counts(args.workload) if args.workload else None
    start = time.monotonic()
    result = build_index(pmap, cell_size=args.cell_size,
                         budget_percent=args.budget_percent, mode=args.mode,
                         workload=workload, alpha=args.alpha, seed=args.seed)
    elapsed = time.monotonic() - start
    index, meta = result.index, result.meta
    save_index(args.out, index, pmap, meta)
    print(f"memory before: {result.initial_units} units "
          f"({result.initial_units * BYTES_PER_LABEL / 1e6:.2f} MB est.)")
    print(f"memory after:  {index.memory_units} units "
          f"({index.memory_bytes(BYTES_PER_LABEL) / 1e6:.2f} MB est.)")
    print(f"outcome: {meta.outcome}  build time: {elapsed:.2f}s  -> {args.out}")
    if meta.outcome != "fit":
        print("budget could not be met: every component is a single region",
              file=sys.stderr)
        return 1
    return 0


def cmd_query(args) -> int:
    pmap = _load_map(args.map)
    index, _meta = load_index(args.index, pmap)
    vis = MapVisibility(pmap, index.vertices)
    if args.pair:
        queries = [(Point(args.pair[0], args.pair[1]), Point(args.pair[2], args.pair[3]))]
    else:
        queries = _read_queries(args.queries)
    writer = csv.writer(sys.stdout)
    writer.writerow(["sx", "sy", "tx", "ty", "dist", "mean_us", "labels_inspected"])
    for s, t in queries:
        best = None
        for _ in range(args.repeat):
            t0 = time.monotonic_ns()
            res = (shortest_path if args.path else shortest_distance)(index, vis, s, t)
            dt = time.monotonic_ns() - t0
            best = dt if best is None else best + dt
        mean_us = best / args.repeat / 1000.0
        dist = "unreachable" if not res.reachable else repr(res.dist)
        writer.writerow([s.x, s.y, t.x, t.y, dist, f"{mean_us:.2f}", res.labels_inspected])
        if args.path and res.path:
            print("# path: " + " ".join(f"({p.x},{p.y})" for p in res.path))
    return 0


def cmd_verify(args) -> int:
    pmap = _load_map(args.map)
    index, _meta = load_index(args.index, pmap)
    vis = MapVisibility(pmap, index.vertices)
    graph = build_visibility_graph(pmap, index.vertices)
    queries = gen_queries(pmap, None, args.n, args.seed)
    failures = []
    for s, t in queries:
        engine = shortest_distance(index, vis, s, t)
        oracle = oracle_query(pmap, graph, s, t)
        ok = (engine.dist is None and oracle.dist is None) or (
            engine.dist is not None and oracle.dist is not None
            and abs(engine.dist - oracle.dist) <= 1e-6 * max(1.0, abs(oracle.dist)))
        if not ok:
            failures.append((s, t, engine.dist, oracle.dist))
    print(f"verified {len(queries)} queries: {len(queries) - len(failures)} pass, "
          f"{len(failures)} fail")
    for s, t, e, o in failures[:10]:
        print(f"  MISMATCH s={s} t={t} engine={e} oracle={o}")
    return 1 if failures else 0


def _region_color(rid: int) -> str:
    h = hashlib.sha1(str(rid).encode()).digest()
    return f"rgb({80 + h[0] % 160},{80 + h[1] % 160},{80 + h[2] % 160})"


def cmd_visualize(args) -> int:
    pmap = _load_map(args.map)
    index, _meta = load_index(args.index, pmap)
    cs = index.cell_size
    scale = args.scale
    w, h = index.ncols * cs * scale, index.nrows * cs * scale
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             f'viewBox="0 0 {index.ncols * cs} {index.nrows * cs}">']
    for j in range(index.nrows):
        for i in range(index.ncols):
            rid = index.mapper[j * index.ncols + i]
            fill = "black" if rid < 0 else _region_color(rid)
            parts.append(f'<rect x="{i * cs}" y="{j * cs}" width="{cs}" height="{cs}" '
                         f'fill="{fill}"/>')
    parts.append("</svg>")
    with open(args.out, "w") as fh:
        fh.write("\n".join(parts))
    print(f"wrote {args.out}")
    return 0


def cmd_gen_queries(args) -> int:
    pmap = _load_map(args.map)
    spec = None
    if args.clusters:
        spec = gen_cluster_spec(pmap, args.clusters, args.seed)
        with open(args.out + ".clusters", "w") as fh:
            for r in spec.rectangles:
                fh.write(f"{r.x0} {r.y0} {r.x1} {r.y1}\n")
    if spec is not None and args.adherence < 100:
        queries = gen_mixed_queries(pmap, spec, args.n, args.adherence, args.seed)
    else:
        queries = gen_queries(pmap, spec, args.n, args.seed)
    write_query_file(args.out, queries)
    print(f"wrote {len(queries)} queries -> {args.out}")
    return 0


def cmd_bench(args) -> int:
    pmap = _load_map(args.map)
    graph = build_visibility_graph(pmap, convex_vertices(pmap))
    queries = _read_queries(args.queries) if args.queries else \
        gen_queries(pmap, None, args.n, args.seed)
    rows = []
    for pct in args.budgets:
        workload = None
        if args.mode == "workload_aware":
            spec = gen_cluster_spec(pmap, args.clusters, args.seed) if args.clusters else None
            workload = build_workload(pmap, spec, args.workload_n, args.cell_size, args.seed)
        t0 = time.monotonic()
        result = build_index(pmap, cell_size=args.cell_size, budget_percent=pct,
                             mode=args.mode, workload=workload, seed=args.seed)
        build_s = time.monotonic() - t0
        index = result.index
        vis = MapVisibility(pmap, index.vertices)
        times, labels, passes = [], [], 0
        for s, t in queries:
            reps = []
            for _ in range(args.repeat):
                t1 = time.monotonic_ns()
                res = shortest_distance(index, vis, s, t)
                reps.append(time.monotonic_ns() - t1)
            times.append(sum(reps) / len(reps) / 1000.0)
            labels.append(res.labels_inspected)
            oracle = oracle_query(pmap, graph, s, t)
            same = (res.dist is None and oracle.dist is None) or (
                res.dist is not None and oracle.dist is not None
                and abs(res.dist - oracle.dist) <= 1e-6 * max(1.0, abs(oracle.dist)))
            passes += same
        times.sort()
        rows.append({
            "map": args.map, "budget_percent": pct, "mode": args.mode,
            "memory_units": index.memory_units,
            "estimated_mb": f"{index.memory_bytes(BYTES_PER_LABEL) / 1e6:.4f}",
            "build_seconds": f"{build_s:.3f}",
            "mean_us": f"{statistics.fmean(times):.2f}" if times else "",
            "median_us": f"{statistics.median(times):.2f}" if times else "",
            "p99_us": f"{times[max(0, int(0.99 * len(times)) - 1)]:.2f}" if times else "",
            "mean_labels_inspected": f"{statistics.fmean(labels):.2f}" if labels else "",
            "verified_pass_rate": f"{passes / len(queries):.4f}" if queries else "1.0000",
        })
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        out.close()
        print(f"wrote {args.out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hubgrid",
                                description="Grid hub-label index for Euclidean shortest paths")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="build (and compress) an index")
    b.add_argument("map")
    b.add_argument("--out", required=True)
    b.add_argument("--cell-size", type=float, default=1.0)
    b.add_argument("--budget-percent", type=float, default=100.0)
    b.add_argument("--mode", choices=["uniform", "workload_aware"], default="uniform")
    b.add_argument("--workload", help="per-cell counts file: 'i j count' lines")
    b.add_argument("--alpha", type=float, default=0.2)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(fn=cmd_build)

    q = sub.add_parser("query", help="answer queries from an index file")
    q.add_argument("map")
    q.add_argument("index")
    q.add_argument("--queries", help="query file (or .scen)")
    q.add_argument("--pair", type=float, nargs=4, metavar=("SX", "SY", "TX", "TY"))
    q.add_argument("--path", action="store_true", help="also print paths")
    q.add_argument("--repeat", type=int, default=5)
    q.set_defaults(fn=cmd_query)

    v = sub.add_parser("verify", help="compare an index against the exact solver")
    v.add_argument("map")
    v.add_argument("index")
    v.add_argument("--n", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    z = sub.add_parser("visualize", help="render merged regions to SVG")
    z.add_argument("map")
    z.add_argument("index")
    z.add_argument("--out", required=True)
    z.add_argument("--scale", type=float, default=8.0)
    z.set_defaults(fn=cmd_visualize)

    g = sub.add_parser("gen-queries", help="generate query sets")
    g.add_argument("map")
    g.add_argument("--out", required=True)
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--clusters", type=int, choices=[1, 2, 4, 8])
    g.add_argument("--adherence", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(fn=cmd_gen_queries)

    m = sub.add_parser("bench", help="build at several budgets and report CSV stats")
    m.add_argument("map")
    m.add_argument("--budgets", type=float, nargs="+",
                   default=[100, 80, 60, 40, 20, 10, 5])
    m.add_argument("--mode", choices=["uniform", "workload_aware"], default="uniform")
    m.add_argument("--clusters", type=int, choices=[1, 2, 4, 8])
    m.add_argument("--workload-n", type=int, default=2000)
    m.add_argument("--queries")
    m.add_argument("--n", type=int, default=200)
    m.add_argument("--repeat", type=int, default=5)
    m.add_argument("--cell-size", type=float, default=1.0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    m.set_defaults(fn=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
