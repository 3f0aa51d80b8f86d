"""Far out-of-the-money case: e^k = 1.5, sigma = 0.04, c ~ 9.01e-27.

Prints the log-price NR trace from L3 and where naive NR stands after 50 steps.
"""

import math
import timeit

from ivbounds import bounds, bs_core, solver

k = math.log(1.5)
c = float(bs_core.price(0.04, k))
print(f"c = {c:.15g}  k = {k:.15g}")
print(f"L2 = {bounds.lower_l2(c, k):.15g}  L3 = {bounds.lower_l3(c, k):.15g}  "
      f"L_U23 = {bounds.lower_l_u23(c, k):.15g}")

res = solver.solve_log_nr(c, k, solver.SolverConfig(max_iter=5, tol_log=1e-300, record_trace=True))
print("log-price NR from L3")
for n, (y, g) in enumerate(res.trace):
    print(f"  n={n}  sigma - 0.04 = {y - 0.04: .3e}  g = {g: .3e}")

naive = solver.solve_naive_nr(c, k, solver.SolverConfig(max_iter=50))
print(f"naive NR from sqrt(2k), 50 steps: sigma = {naive.sigma:.6f}")

t_log = min(timeit.repeat(lambda: solver.solve_log_nr(c, k, solver.SolverConfig(max_iter=3)),
                          number=100, repeat=5)) / 100
t_naive = min(timeit.repeat(lambda: solver.solve_naive_nr(c, k, solver.SolverConfig(max_iter=50)),
                            number=20, repeat=5)) / 20
print(f"runtime: log-NR x3 {t_log * 1e3:.3f} ms, naive x50 {t_naive * 1e3:.3f} ms")
