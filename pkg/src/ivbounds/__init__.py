"""Black-Scholes implied volatility by Newton iteration on the log price.

The solver is seeded with a closed-form lower bound, which makes the
iteration monotone and free of bracketing; the bound family and the
transforms that tighten it are exposed alongside.
"""

from .bounds import BoundSet, all_bounds, bound_table
from .bs_core import (BandViolation, RawQuote, StandardizedOption, destandardize_vol,
                      log_price, price, price_to_delta, price_to_vega, standardize)
from .harness import GridSpec, run_grid_bench
from .solver import (SolverConfig, SolverResult, oracle_bisection, solve, solve_log_nr,
                     solve_naive_nr, solve_raw)
from .specfun import DomainError, mills_ratio, norm_cdf, norm_cdf_inv

__version__ = "0.1.0"

__all__ = [
    "BandViolation", "BoundSet", "DomainError", "GridSpec", "RawQuote", "SolverConfig",
    "SolverResult", "StandardizedOption", "all_bounds", "bound_table", "destandardize_vol",
    "log_price", "mills_ratio", "norm_cdf", "norm_cdf_inv", "oracle_bisection", "price",
    "price_to_delta", "price_to_vega", "run_grid_bench", "solve", "solve_log_nr",
    "solve_naive_nr", "solve_raw", "standardize",
]
