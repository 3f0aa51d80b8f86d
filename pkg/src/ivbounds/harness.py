"""Grid benchmark and figure data, written as CSV.

Results are held column-wise (one numpy array per CSV column) because the
default grid has over three million points; ``BenchResult.rows()`` yields
``BenchRow`` records for callers who want them one at a time.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

import numpy as np

from . import bounds, bs_core, solver
from .specfun import DomainError

FLOAT_FMT = "%.17g"

# bound columns carried by every grid row; u2 is left out because it is
# undefined on part of the grid and u23 already equals it where it exists
ROW_BOUNDS = ("l1", "l2", "l_inv", "l3", "l_u23", "u1", "u3", "u3_prime", "u23")
FIGURE_BOUNDS = ("l1", "l2", "l_inv", "l3", "l_u23", "u1", "u2", "u3", "u3_prime", "u23")


def default_k_values() -> List[float]:
    """0, 1e-10, 1e-9, ..., 1e-3, then 0.01, 0.02, ..., 3.00 (309 values)."""
    return [0.0] + [10.0 ** e for e in range(-10, -2)] + [j / 100 for j in range(1, 301)]


def default_c_values() -> List[float]:
    """1e-40, 1e-39, ..., 1e-4, then 0.0002, 0.0003, ..., 0.9999 (10035 values)."""
    return [10.0 ** e for e in range(-40, -3)] + [j / 10000 for j in range(2, 10000)]


@dataclass
class GridSpec:
    k_values: List[float] = field(default_factory=default_k_values)
    c_values: List[float] = field(default_factory=default_c_values)

    def __post_init__(self):
        if not self.k_values or not self.c_values:
            raise DomainError("grid needs at least one k and one c")
        if any(not k >= 0.0 for k in self.k_values):
            raise DomainError("grid k values must be >= 0")
        if any(not 0.0 < c < 1.0 for c in self.c_values):
            raise DomainError("grid c values must lie in (0, 1)")

    @classmethod
    def from_json(cls, path) -> "GridSpec":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read grid file {path}: {exc.strerror}") from exc
        return cls(k_values=[float(v) for v in data["k_values"]],
                   c_values=[float(v) for v in data["c_values"]])

    def subset(self, c_min=0.01, c_max=0.5, ek_max=1.25) -> "GridSpec":
        """The comparison region c_min <= c <= c_max, e^k <= ek_max."""
        ks = [k for k in self.k_values if math.exp(k) <= ek_max]
        cs = [c for c in self.c_values if c_min <= c <= c_max]
        return GridSpec(k_values=ks, c_values=cs)

    def points(self):
        """Flattened (c, k) arrays in k-major order."""
        kk, cc = np.meshgrid(np.asarray(self.k_values, dtype=float),
                             np.asarray(self.c_values, dtype=float), indexing="ij")
        return cc.ravel(), kk.ravel()

    @property
    def size(self):
        return len(self.k_values) * len(self.c_values)


@dataclass
class BenchRow:
    k: float
    c: float
    sigma_oracle: Optional[float]
    sigma: List[float]
    log_error: List[float]
    naive_sigma: List[float]
    naive_log_error: List[float]
    abs_error: List[float]
    naive_abs_error: List[float]
    bounds: Dict[str, float]


def _log_errors(sig, c, k):
    """|g(sigma)| elementwise, with +inf where sigma is not positive."""
    out = np.full(sig.shape, np.inf)
    pos = sig > 0.0
    if pos.any():
        out[pos] = np.abs(bs_core.log_price(sig[pos], k[pos]) - np.log(c[pos]))
    return out


def _abs_errors(sig, c, k):
    return np.abs(bs_core.price(np.maximum(sig, 0.0), k) - c)


@dataclass
class BenchResult:
    n_iters: int
    columns: Dict[str, np.ndarray]
    summary: Dict[str, object]

    def rows(self) -> Iterator[BenchRow]:
        col = self.columns
        n = self.n_iters
        for i in range(len(col["k"])):
            yield BenchRow(
                k=float(col["k"][i]),
                c=float(col["c"][i]),
                sigma_oracle=float(col["sigma_oracle"][i]) if "sigma_oracle" in col else None,
                sigma=[float(col[f"sigma_{j}"][i]) for j in range(n + 1)],
                log_error=[float(col[f"log_error_{j}"][i]) for j in range(n + 1)],
                naive_sigma=[float(col[f"naive_sigma_{j}"][i]) for j in range(n + 1)],
                naive_log_error=[float(col[f"naive_log_error_{j}"][i]) for j in range(n + 1)],
                abs_error=[float(col[f"abs_error_{j}"][i]) for j in range(n + 1)],
                naive_abs_error=[float(col[f"naive_abs_error_{j}"][i]) for j in range(n + 1)],
                bounds={b: float(col[b][i]) for b in ROW_BOUNDS if b in col},
            )

    def write_csv(self, path_or_file, chunk=100_000):
        write_columns(self.columns, path_or_file, chunk=chunk)

    def summary_lines(self) -> List[str]:
        s = self.summary
        lines = [f"points {s['points']}  iterations {s['n_iters']}"]
        for n in range(self.n_iters + 1):
            lines.append(
                f"n={n}  max|g| {s['max_log_error'][n]:.3e}  max|C-c| {s['max_abs_error'][n]:.3e}"
                f"  naive max|g| {s['naive_max_log_error'][n]:.3e}"
                f"  naive max|C-c| {s['naive_max_abs_error'][n]:.3e}")
        if s.get("max_last_step") is not None:
            lines.append(f"max|sigma_{self.n_iters} - sigma_{self.n_iters - 1}| "
                         f"{s['max_last_step']:.3e}")
        if s.get("max_oracle_gap") is not None:
            lines.append(f"max|sigma_{self.n_iters} - oracle| {s['max_oracle_gap']:.3e}")
        return lines


def run_grid_bench(spec: GridSpec, n_iters: int = 5, *, oracle: bool = True,
                   with_bounds: bool = True, seed: str = "l3") -> BenchResult:
    """Run log-NR and naive NR for n_iters steps on every grid point.

    The summary maxima are taken over the emitted columns, so they always
    agree with the CSV.  The oracle (bisection to |g| <= 1e-14) and the bound
    columns dominate the cost and can be switched off for error-only runs.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    c, k = spec.points()
    cols: Dict[str, np.ndarray] = {"k": k, "c": c}
    if oracle:
        cols["sigma_oracle"] = solver.oracle_bisection(c, k, tol=1e-14)
    path = solver.log_nr_path(c, k, n_iters, seed=seed)
    naive = solver.naive_nr_path(c, k, n_iters)
    for prefix, iterates in (("", path), ("naive_", naive)):
        for n in range(n_iters + 1):
            cols[f"{prefix}sigma_{n}"] = iterates[n]
            cols[f"{prefix}log_error_{n}"] = _log_errors(iterates[n], c, k)
            cols[f"{prefix}abs_error_{n}"] = _abs_errors(iterates[n], c, k)
    if with_bounds:
        table = bounds.bound_table(c, k)
        for b in ROW_BOUNDS:
            cols[b] = np.asarray(table[b], dtype=float)

    def col_max(name):
        return [float(np.max(cols[f"{name}_{n}"])) for n in range(n_iters + 1)]

    summary = {
        "points": int(c.size),
        "n_iters": n_iters,
        "max_log_error": col_max("log_error"),
        "max_abs_error": col_max("abs_error"),
        "naive_max_log_error": col_max("naive_log_error"),
        "naive_max_abs_error": col_max("naive_abs_error"),
        "max_last_step": float(np.max(np.abs(path[n_iters] - path[n_iters - 1]))),
        "max_oracle_gap": (float(np.max(np.abs(path[n_iters] - cols["sigma_oracle"])))
                           if oracle else None),
    }
    return BenchResult(n_iters=n_iters, columns=cols, summary=summary)


# -- CSV ---------------------------------------------------------------------

def _fmt(v):
    return FLOAT_FMT % v


def write_columns(columns: Dict[str, np.ndarray], path_or_file, chunk=100_000):
    """Header of column names, then one line per row with 17 significant digits."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    n_rows = len(arrays[0]) if arrays else 0

    def _emit(fh):
        fh.write(",".join(names) + "\n")
        for start in range(0, n_rows, chunk):
            block = [a[start:start + chunk].tolist() for a in arrays]
            fh.write("".join(",".join(_fmt(v) for v in row) + "\n" for row in zip(*block)))

    if hasattr(path_or_file, "write"):
        _emit(path_or_file)
        return
    try:
        with open(path_or_file, "w", newline="") as fh:
            _emit(fh)
    except OSError as exc:
        raise OSError(f"cannot write {path_or_file}: {exc.strerror}") from exc


def read_columns(path_or_text) -> Dict[str, np.ndarray]:
    """Inverse of write_columns (accepts a path or the CSV text itself)."""
    if "\n" in path_or_text:
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, newline="")
    with fh:
        reader = csv.reader(fh)
        names = next(reader)
        data = [[float(v) for v in row] for row in reader]
    arr = np.array(data, dtype=float).reshape(len(data), len(names))
    return {n: arr[:, i] for i, n in enumerate(names)}


# -- figure data -------------------------------------------------------------

FIGURES = ("price-shapes", "bounds-vs-price", "bounds-vs-k")


@dataclass
class FigureParams:
    k: float = math.log(2.0)
    sigma: float = 0.2
    n_points: int = 400
    sigma_max: float = 3.0
    k_max: float = 3.0
    # bounds-vs-price: put L1(c) on the x axis instead of c
    l1_axis: bool = False


def _insert_marker(grid, value):
    """Sorted grid with value inserted, and a 0/1 marker column flagging it."""
    grid = np.asarray(grid, dtype=float)
    idx = int(np.searchsorted(grid, value))
    if idx < grid.size and grid[idx] == value:
        out = grid
    else:
        out = np.insert(grid, idx, value)
    marker = np.zeros(out.size)
    marker[idx] = 1.0
    return out, marker


def _price_shapes(p: FigureParams):
    if not p.sigma_max > 0.0:
        raise DomainError("sigma_max must be positive")
    grid = np.linspace(0.0, p.sigma_max, p.n_points + 1)[1:]
    sig, marker = _insert_marker(grid, math.sqrt(2.0 * p.k))
    if sig[0] == 0.0:
        # k = 0 puts the inflection at sigma = 0, where the ratios are limits
        sig, marker = sig[1:], marker[1:]
        marker[0] = 1.0
    k = np.full(sig.shape, float(p.k))
    return {
        "sigma": sig,
        "price": bs_core.price(sig, k),
        "price_to_delta": bs_core.price_to_delta(sig, k),
        "log_price": bs_core.log_price(sig, k),
        "price_to_vega": bs_core.price_to_vega(sig, k),
        "inflection": marker,
    }


def _bounds_columns(c, k):
    table = bounds.bound_table(c, k)
    return {b: np.asarray(table[b], dtype=float) for b in FIGURE_BOUNDS}


def _bounds_vs_price(p: FigureParams):
    k = float(p.k)
    grid = np.arange(1, p.n_points) / p.n_points
    c, marker = _insert_marker(grid, float(bs_core.price(math.sqrt(2.0 * k), k)))
    kk = np.full(c.shape, k)
    out = {"c": c}
    if p.l1_axis:
        out["x"] = bounds.lower_l1(c, kk)
    out["sigma"] = solver.oracle_bisection(c, kk, tol=1e-14)
    out.update(_bounds_columns(c, kk))
    out["inflection"] = marker
    return out


def _bounds_vs_k(p: FigureParams):
    sigma = float(p.sigma)
    if not sigma > 0.0:
        raise DomainError("sigma must be positive")
    grid = np.linspace(0.0, p.k_max, p.n_points + 1)
    k, marker = _insert_marker(grid, 0.5 * sigma * sigma)
    c = bs_core.price(np.full(k.shape, sigma), k)
    keep = c > 0.0
    k, c, marker = k[keep], c[keep], marker[keep]
    out = {"k": k, "c": c, "sigma": np.full(k.shape, sigma)}
    out.update(_bounds_columns(c, k))
    out["inflection"] = marker
    return out


def emit_figure_data(which: str, params: Optional[FigureParams] = None) -> Dict[str, np.ndarray]:
    """Columns behind one figure; write them with write_columns."""
    params = params or FigureParams()
    if which == "price-shapes":
        return _price_shapes(params)
    if which == "bounds-vs-price":
        return _bounds_vs_price(params)
    if which == "bounds-vs-k":
        return _bounds_vs_k(params)
    raise DomainError(f"unknown figure {which!r}; expected one of {', '.join(FIGURES)}")

