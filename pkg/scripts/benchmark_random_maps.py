#!/usr/bin/env python3
"""Benchmark budget compression on seeded random maps.

Generates rectilinear random maps, writes them as .map files, and runs the
`hubgrid bench` pipeline on each, collecting one CSV of build/query/memory
statistics per budget.  Use --mode workload_aware to also exercise the
cluster-driven compressor.

Example:
    python3 scripts/benchmark_random_maps.py --seeds 0 1 2 --out bench.csv
"""

import argparse
import os
import sys
import tempfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from mapgen import random_rect_map

from hubgrid.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--size", type=int, default=None,
                    help="map side length (default: seeded 32-48)")
    ap.add_argument("--budgets", type=float, nargs="+",
                    default=[100, 80, 60, 40, 20, 10, 5])
    ap.add_argument("--mode", choices=["uniform", "workload_aware"],
                    default="uniform")
    ap.add_argument("--clusters", type=int, default=2)
    ap.add_argument("--n", type=int, default=200, help="queries per map")
    ap.add_argument("--out", default=None, help="CSV output (default stdout)")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        for seed in args.seeds:
            grid = random_rect_map(seed, size=args.size)
            map_path = os.path.join(tmp, f"random-{seed}.map")
            with open(map_path, "w") as fh:
                fh.write(f"type octile\nheight {grid.height}\n"
                         f"width {grid.width}\nmap\n{grid.to_text()}\n")
            argv = ["bench", map_path, "--n", str(args.n), "--seed", str(seed),
                    "--mode", args.mode, "--budgets",
                    *[str(b) for b in args.budgets]]
            if args.mode == "workload_aware":
                argv += ["--clusters", str(args.clusters)]
            if args.out:
                argv += ["--out", f"{args.out}.{seed}" if len(args.seeds) > 1
                         else args.out]
            cli_main(argv)


if __name__ == "__main__":
    main()
