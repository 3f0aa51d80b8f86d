"""Command line entry point: ``ivbounds <command> ...``."""

import argparse
import json
import math
import sys

from . import bounds, harness, solver
from .bs_core import RawQuote
from .specfun import DomainError


def _trace_lines(res):
    for n, (y, g) in enumerate(res.trace):
        yield f"  n={n}  sigma={y:.17g}  g={g:.3e}"


def _cmd_solve(a, out):
    quote = RawQuote(premium=a.price, forward=a.forward, strike=a.strike, expiry=a.expiry,
                     is_call=a.type == "call", discount_factor=a.df)
    raw = solver.solve_raw(quote, solver.SolverConfig(record_trace=True))
    res = raw.result
    print(f"c={raw.option.c:.17g} k={raw.option.k:.17g}", file=out)
    print(f"total_sigma={res.sigma:.17g} volatility={raw.volatility:.17g} "
          f"iterations={res.iterations_used} log_error={res.final_log_error:.3e}", file=out)
    for line in _trace_lines(res):
        print(line, file=out)


def _cmd_solve_std(a, out):
    res = solver.solve_log_nr(a.c, a.k, solver.SolverConfig(record_trace=True))
    print(f"sigma={res.sigma:.17g} iterations={res.iterations_used} "
          f"log_error={res.final_log_error:.3e} converged={res.converged}", file=out)
    for line in _trace_lines(res):
        print(line, file=out)


def _cmd_bounds(a, out):
    b = bounds.all_bounds(a.c, a.k)
    d = b.as_dict()
    if a.json:
        json.dump(d, out, indent=2)
        out.write("\n")
        return
    for name, v in d.items():
        print(f"{name:>9} {'undefined' if v is None else format(v, '.17g')}", file=out)


def _cmd_grid_bench(a, out):
    spec = harness.GridSpec.from_json(a.grid_file) if a.grid_file else harness.GridSpec()
    if a.subset:
        spec = spec.subset()
    result = harness.run_grid_bench(spec, a.iters, oracle=not a.no_oracle,
                                    with_bounds=not a.no_bounds)
    to_stdout = a.out == "-"
    if a.out:
        result.write_csv(out if to_stdout else a.out)
    log = sys.stderr if to_stdout else out
    for line in result.summary_lines():
        print(line, file=log)


def _cmd_figures(a, out):
    params = harness.FigureParams(n_points=a.points, l1_axis=a.l1_axis)
    if a.k is not None:
        params.k = a.k
    if a.ek is not None:
        params.k = math.log(a.ek)
    if a.sigma is not None:
        params.sigma = a.sigma
    cols = harness.emit_figure_data(a.which, params)
    harness.write_columns(cols, out if a.out == "-" else a.out)


def build_parser():
    p = argparse.ArgumentParser(prog="ivbounds",
                                description="Implied volatility by log-price Newton with bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="implied volatility of a quoted option")
    s.add_argument("--price", type=float, required=True, help="option premium")
    s.add_argument("--forward", type=float, required=True)
    s.add_argument("--strike", type=float, required=True)
    s.add_argument("--expiry", type=float, required=True, help="years")
    s.add_argument("--type", choices=("call", "put"), default="call")
    s.add_argument("--df", type=float, default=1.0, help="discount factor (default 1)")
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("solve-std", help="total volatility of a standardized (c, k)")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--k", type=float, required=True)
    s.set_defaults(func=_cmd_solve_std)

    s = sub.add_parser("bounds", help="every lower and upper bound at (c, k)")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_bounds)

    s = sub.add_parser("grid-bench", help="error maxima of both solvers over a (k, c) grid")
    s.add_argument("--grid-file", help='JSON {"k_values": [...], "c_values": [...]}')
    s.add_argument("--iters", type=int, default=5)
    s.add_argument("--out", help="CSV of every grid row ('-' for stdout)")
    s.add_argument("--subset", action="store_true",
                   help="restrict to 0.01 <= c <= 0.5 and e^k <= 1.25")
    s.add_argument("--no-oracle", action="store_true", help="skip the bisection column")
    s.add_argument("--no-bounds", action="store_true", help="skip the bound columns")
    s.set_defaults(func=_cmd_grid_bench)

    s = sub.add_parser("figures", help="CSV behind the price-shape and bound plots")
    s.add_argument("--which", choices=harness.FIGURES, required=True)
    s.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    s.add_argument("--k", type=float)
    s.add_argument("--ek", type=float, help="e^k instead of k")
    s.add_argument("--sigma", type=float, help="fixed total volatility for bounds-vs-k")
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--l1-axis", action="store_true", help="bounds-vs-price: x = L1(c)")
    s.set_defaults(func=_cmd_figures)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if getattr(args, "iters", 1) < 1:
        print("ivbounds: error: --iters must be >= 1", file=sys.stderr)
        return 2
    try:
        args.func(args, out)
    except DomainError as exc:
        print(f"ivbounds: domain error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ivbounds: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
