"""Implied total volatility by Newton-Raphson, on the price and on the log price.

The log-price iteration solves g(y) = log C_BS(y) - log c = 0.  Because
g' = 1 / C_V is positive and decreasing, g is concave and every Newton step
started below the root stays below it and moves up.  Seeding with the L3
lower bound therefore gives a monotone, bracket-free iteration.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from . import bounds, bs_core
from .bs_core import RawQuote, StandardizedOption, _prep, standardize
from .specfun import DomainError, norm_cdf_inv_centered

SEEDS = ("l3", "l2", "l_u23", "inflection")
LOWER_BOUND_SEEDS = ("l3", "l2", "l_u23")


@dataclass
class SolverConfig:
    max_iter: int = 8
    tol_log: float = 1e-12
    record_trace: bool = False
    # one of SEEDS, or a user-supplied starting volatility
    initial_guess: Union[str, float] = "l3"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol_log > 0.0:
            raise ValueError("tol_log must be positive")
        if isinstance(self.initial_guess, str):
            if self.initial_guess not in SEEDS:
                raise ValueError(f"initial_guess must be one of {SEEDS} or a float")
        elif not self.initial_guess > 0.0:
            raise ValueError("a user-supplied initial guess must be positive")


@dataclass
class SolverResult:
    sigma: float
    iterations_used: int
    final_log_error: float
    converged: bool
    trace: List[Tuple[float, float]] = field(default_factory=list)


@dataclass
class RawSolverResult:
    result: SolverResult
    option: StandardizedOption
    volatility: float  # annualized, sigma / sqrt(expiry)


def _check(c, k):
    if not np.all((c > 0.0) & (c < 1.0)):
        raise DomainError("standardized price c must lie in (0, 1)")
    if not np.all(k >= 0.0):
        raise DomainError("log strike k must be >= 0")


def atm_sigma(c):
    """Closed-form inverse at k = 0: sigma = 2 Phi^{-1}((1 + c)/2)."""
    c = np.asarray(c, dtype=float)
    return (2.0 * norm_cdf_inv_centered(0.5 * (1.0 + c), c))[()]


def log_error(sigma, c, k):
    """g(sigma) = log C_BS(sigma) - log c."""
    return bs_core.log_price(sigma, k) - np.log(c)


def _seed(c, k, policy):
    if not isinstance(policy, str):
        return np.broadcast_to(float(policy), np.shape(c)).astype(float)[()]
    if policy == "l3":
        return bounds.lower_l3(c, k)
    if policy == "l2":
        return bounds.lower_l2(c, k)
    if policy == "l_u23":
        return bounds.lower_l_u23(c, k)
    if policy == "inflection":
        return bs_core.inflection_sigma(k)
    raise ValueError(f"unknown seed policy {policy!r}")


def _log_step(y, log_c, k):
    """One Newton step on g, returning (new y, g(y))."""
    log_cv = bs_core.log_price_to_vega(y, k)
    dd1 = -k / y + 0.5 * y
    # log C_BS(y) = log phi(d1) + log C_V(y)
    g = -0.5 * dd1 * dd1 - 0.5 * math.log(2.0 * math.pi) + log_cv - log_c
    return y - g * np.exp(log_cv), g


def nr_log_step(y, c, k):
    """y + [d1(y)^2/2 - log C_V(y) + log(c sqrt(2 pi))] C_V(y).

    From any y at or below the implied volatility the result lies in [y, sigma].
    """
    y, c, k = _prep(y, c, k)
    _check(c, k)
    if not np.all(y > 0.0):
        raise DomainError("nr_log_step needs y > 0")
    return _log_step(y, np.log(c), k)[0]


def solve_log_nr(c, k, cfg: Optional[SolverConfig] = None) -> SolverResult:
    """Log-price Newton-Raphson for one (c, k).

    k = 0 is answered in closed form with zero iterations.  From a lower-bound
    seed every iterate is clamped to max(previous, new), which only ever acts
    on rounding.  Other seeds may lie above the root, where a step can
    overshoot below zero; their iterates are floored at L2 instead, after
    which the iteration proceeds from below.
    """
    cfg = cfg or SolverConfig()
    c, k = float(c), float(k)
    _check(c, k)
    if k == 0.0:
        sigma = float(atm_sigma(c))
        err = abs(float(log_error(sigma, c, k)))
        trace = [(sigma, err)] if cfg.record_trace else []
        return SolverResult(sigma, 0, err, True, trace)
    log_c = math.log(c)
    y = float(_seed(c, k, cfg.initial_guess))
    from_below = cfg.initial_guess in LOWER_BOUND_SEEDS
    floor = 0.0 if from_below else float(bounds.lower_l2(c, k))
    trace = []
    n = 0
    while True:
        new, g = _log_step(y, log_c, k)
        if cfg.record_trace:
            trace.append((y, float(g)))
        if abs(g) <= cfg.tol_log or n == cfg.max_iter:
            break
        # from below, exact arithmetic never decreases y; rounding may
        y = float(max(new, y) if from_below else max(new, floor))
        n += 1
    return SolverResult(y, n, abs(float(g)), bool(abs(g) <= cfg.tol_log), trace)


def solve_naive_nr(c, k, cfg: Optional[SolverConfig] = None) -> SolverResult:
    """Newton-Raphson on C_BS(y) - c from the inflection point sqrt(2k).

    Convergence is guaranteed but slow for far out-of-the-money prices.  The
    stopping rule uses the same log error |g| as the log-price solver.
    """
    cfg = cfg or SolverConfig()
    c, k = float(c), float(k)
    _check(c, k)
    y = math.sqrt(2.0 * k)
    trace = []
    n = 0
    while True:
        px = float(bs_core.price(y, k))
        g = math.log(px) - math.log(c) if px > 0.0 else -math.inf
        if cfg.record_trace:
            trace.append((y, g))
        if abs(g) <= cfg.tol_log or n == cfg.max_iter:
            break
        dd1 = 0.5 * y if k == 0.0 else -k / y + 0.5 * y
        y = y - (px - c) / (math.exp(-0.5 * dd1 * dd1) / math.sqrt(2.0 * math.pi))
        n += 1
    return SolverResult(y, n, abs(g), bool(abs(g) <= cfg.tol_log), trace)


def solve(c, k) -> SolverResult:
    """Default pipeline: log-price NR seeded at L3."""
    return solve_log_nr(c, k, SolverConfig())


def solve_raw(q: RawQuote, cfg: Optional[SolverConfig] = None) -> RawSolverResult:
    opt = standardize(q)
    res = solve_log_nr(opt.c, opt.k, cfg)
    return RawSolverResult(res, opt, bs_core.destandardize_vol(res.sigma, q.expiry))


# -- vectorized paths --------------------------------------------------------

def log_nr_path(c, k, n_iter, seed="l3"):
    """Log-price NR iterates sigma_0..sigma_n on arrays, shape (n_iter + 1, *c.shape).

    k = 0 entries are filled with the closed form at every step.
    """
    c, k = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(k, dtype=float))
    _check(c, k)
    atm = k == 0.0
    out = np.empty((n_iter + 1,) + c.shape)
    y = np.empty(c.shape)
    if atm.any():
        y[atm] = atm_sigma(c[atm])
    live = ~atm
    cl, kl = c[live], k[live]
    log_c = np.log(cl)
    yl = np.asarray(_seed(cl, kl, seed), dtype=float)
    from_below = seed in LOWER_BOUND_SEEDS
    floor = None if from_below else np.asarray(bounds.lower_l2(cl, kl), dtype=float)
    y[live] = yl
    out[0] = y
    for n in range(1, n_iter + 1):
        new, _ = _log_step(yl, log_c, kl)
        yl = np.maximum(new, yl) if from_below else np.maximum(new, floor)
        y[live] = yl
        out[n] = y
    return out


def naive_nr_path(c, k, n_iter):
    """Price-NR iterates from sqrt(2k) on arrays, shape (n_iter + 1, *c.shape)."""
    c, k = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(k, dtype=float))
    _check(c, k)
    out = np.empty((n_iter + 1,) + c.shape)
    y = np.sqrt(2.0 * k)
    out[0] = y
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for n in range(1, n_iter + 1):
            dd1 = np.where(k == 0.0, 0.5 * y, -k / y + 0.5 * y)
            vega = np.exp(-0.5 * dd1 * dd1) / math.sqrt(2.0 * math.pi)
            y = y - (bs_core.price(y, k) - c) / vega
            out[n] = y
    return out


def oracle_bisection(c, k, tol=1e-14, max_iter=2000):
    """Implied volatility by bisection of g on the bracket [L2(c), U1(c)].

    Independent of the Newton solvers; used to validate them and the bounds.
    ``tol`` is the relative width of the final bracket; near c = 1 g is so
    flat that a tolerance on |g| would not pin sigma down.  Midpoints are
    geometric once the lower end is positive, so tiny sigma costs no more
    than moderate sigma.  Returns the end of the final bracket with smaller |g|.
    """
    scalar = np.ndim(c) == 0 and np.ndim(k) == 0
    c, k = np.broadcast_arrays(np.atleast_1d(np.asarray(c, dtype=float)),
                               np.atleast_1d(np.asarray(k, dtype=float)))
    _check(c, k)
    lo = np.array(bounds.lower_l2(c, k), dtype=float)
    hi = np.array(bounds.upper_u1(c, k), dtype=float)
    log_c = np.log(c)
    # bracket sanity, with rounding slack: a failure means a bounds bug
    g_hi = bs_core.log_price(hi, k) - log_c
    pos = lo > 0.0
    g_lo = np.full(c.shape, -np.inf)
    if pos.any():
        g_lo[pos] = bs_core.log_price(lo[pos], k[pos]) - log_c[pos]
    if np.any(g_hi < -1e-12) or np.any(g_lo > 1e-12):
        raise RuntimeError("oracle bracket [L2, U1] does not contain the root")
    active = (hi - lo > tol * hi) & (g_hi != 0.0) & (g_lo != 0.0)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a, b = lo[idx], hi[idx]
        mid = np.where(a > 0.0, np.sqrt(a * b), 0.5 * b)
        stuck = (mid <= a) | (mid >= b)
        g = bs_core.log_price(np.where(stuck, b, mid), k[idx]) - log_c[idx]
        below = ~stuck & (g < 0.0)
        above = ~stuck & (g > 0.0)
        lo[idx] = np.where(below, mid, a)
        g_lo[idx] = np.where(below, g, g_lo[idx])
        hi[idx] = np.where(above, mid, b)
        g_hi[idx] = np.where(above, g, g_hi[idx])
        exact = ~stuck & (g == 0.0)
        lo[idx] = np.where(exact, mid, lo[idx])
        hi[idx] = np.where(exact, mid, hi[idx])
        g_lo[idx] = np.where(exact, 0.0, g_lo[idx])
        active[idx] = ~stuck & ~exact & (hi[idx] - lo[idx] > tol * hi[idx])
    best = np.where(np.abs(g_lo) < np.abs(g_hi), lo, hi)
    return best[0] if scalar else best
