"""Compare the direct solver with the iterative baselines on all four grids.

Run with ``python3 demos/bench.py``; the same table is produced by
``inudft bench --grids 1,2,3,4 --m 1024 --n 512 --methods direct,cg_nor,pcg_nor_strang,cg_adj``.
"""

import sys

from inudft.bench import emit_bench_csv, run_bench

results = run_bench(["1", "2", "3", "4"], 1024, 512,
                    ["direct", "cg_nor", "pcg_nor_strang", "cg_adj"], tol=1e-7, maxit=3000)
emit_bench_csv(results, sys.stdout)

print("\nsummary:", file=sys.stderr)
for r in results:
    its = "" if r.iterations is None else f", {r.iterations} iterations"
    t = (r.factor_s or 0.0) + r.solve_s_per_rhs
    print(f"  {r.grid:15s} {r.method:15s} {t:7.3f} s  residual {r.rel_residual:.1e}{its}  "
          f"cond {r.cond2:.1e}", file=sys.stderr)
