"""Error maxima of log-price NR and naive NR over the default (k, c) grid.

    python scripts/reproduce_grid.py              # full grid, 5 iterations
    python scripts/reproduce_grid.py --subset     # 0.01 <= c <= 0.5, e^k <= 1.25, 4 iterations
    python scripts/reproduce_grid.py --out rows.csv --oracle --bounds
"""

import argparse
import time

from ivbounds import harness

ap = argparse.ArgumentParser()
ap.add_argument("--subset", action="store_true")
ap.add_argument("--iters", type=int)
ap.add_argument("--oracle", action="store_true", help="add the bisection column")
ap.add_argument("--bounds", action="store_true", help="add the bound columns")
ap.add_argument("--out", help="write every row as CSV (large for the full grid)")
args = ap.parse_args()

spec = harness.GridSpec()
if args.subset:
    spec = spec.subset()
iters = args.iters or (4 if args.subset else 5)

t0 = time.perf_counter()
result = harness.run_grid_bench(spec, iters, oracle=args.oracle, with_bounds=args.bounds)
print(f"{time.perf_counter() - t0:.1f} s")
for line in result.summary_lines():
    print(line)
if args.out:
    result.write_csv(args.out)
