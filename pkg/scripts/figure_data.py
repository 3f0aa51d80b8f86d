"""Write the CSV behind the price-shape and bound plots into a directory.

    python scripts/figure_data.py out/
"""

import math
import pathlib
import sys

from ivbounds import harness

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(parents=True, exist_ok=True)

jobs = [
    ("price_shapes_ln2.csv", "price-shapes", harness.FigureParams(k=math.log(2.0))),
    ("bounds_vs_price_ek2.csv", "bounds-vs-price", harness.FigureParams(k=math.log(2.0))),
    ("bounds_vs_price_ek8.csv", "bounds-vs-price", harness.FigureParams(k=math.log(8.0))),
    ("bounds_vs_price_ek2_l1.csv", "bounds-vs-price",
     harness.FigureParams(k=math.log(2.0), l1_axis=True)),
    ("bounds_vs_price_ek8_l1.csv", "bounds-vs-price",
     harness.FigureParams(k=math.log(8.0), l1_axis=True)),
    ("bounds_vs_k_s0.2.csv", "bounds-vs-k", harness.FigureParams(sigma=0.2)),
    ("bounds_vs_k_s1.5.csv", "bounds-vs-k", harness.FigureParams(sigma=1.5)),
]
for name, which, params in jobs:
    harness.write_columns(harness.emit_figure_data(which, params), out / name)
    print(out / name)
