"""Factor once, solve many: least-squares inversion of nonuniform samples.

Run with ``python3 demos/quickstart.py``.
"""

import time

import numpy as np

from inudft import GridKind, generate_grid, inudft_factor, inudft_solve, nudft_type2_apply

m, n = 4096, 2048
rng = np.random.default_rng(0)

# uniform random sample locations in [0, 1)
p = generate_grid(GridKind("uniform_random"), m, n)

# samples of a random trigonometric polynomial, plus a little noise
x_true = rng.standard_normal(n) + 1j * rng.standard_normal(n)
b = nudft_type2_apply(p, x_true)
b_noisy = b + 1e-6 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))

t0 = time.perf_counter()
fact = inudft_factor(p, n, epsilon=1e-10)
t1 = time.perf_counter()
x = inudft_solve(fact, b)
t2 = time.perf_counter()
print(f"factor {t1 - t0:.2f} s, solve {t2 - t1:.3f} s, max HSS rank {fact.hss.max_rank()}")
print(f"consistent data: coefficient error {np.linalg.norm(x - x_true) / np.linalg.norm(x_true):.2e}")

# the factorization is reused for further right-hand sides
x_noisy = inudft_solve(fact, b_noisy)
r = nudft_type2_apply(p, x_noisy) - b_noisy
print(f"noisy data: relative residual {np.linalg.norm(r) / np.linalg.norm(b_noisy):.2e}")

B = np.column_stack([b, b_noisy, 1j * b])
t0 = time.perf_counter()
X = inudft_solve(fact, B)
print(f"3 right-hand sides in {time.perf_counter() - t0:.3f} s; "
      f"column 3 equals 1j * column 1: {np.allclose(X[:, 2], 1j * X[:, 0])}")
