"""Recover the Fourier coefficients of a filtered discontinuous signal from gappy samples.

The sample set has a gap of width 8/n near p = 1, which makes the Vandermonde
matrix badly conditioned.  The direct solver recovers the coefficients while
conjugate gradients capped at 500 steps does not.

Run with ``python3 demos/reconstruction.py``.
"""

import numpy as np

from inudft import GridKind, generate_grid, inudft_factor, inudft_solve, iterative_solve, prephase
from inudft import grids

n = 512
m = int(round(1.8 * n))
p = generate_grid(GridKind("random_gap"), m, n)
x_true = grids.test_signal(n)

# samples of the Fourier series with symmetric frequencies -n/2..n/2-1
k = np.arange(-(n // 2), n // 2)
b = np.exp(-2j * np.pi * np.mod(np.outer(p, k), 1.0)) @ x_true
# shift to frequencies 0..n-1 so the solver output is in symmetric order
b = prephase(p, b, n)

cond = np.linalg.cond(np.exp(-2j * np.pi * np.mod(np.outer(p, np.arange(n)), 1.0)))
print(f"m={m}, n={n}, cond(V) = {cond:.2e}")


def err(x):
    return np.linalg.norm(x - x_true) / np.linalg.norm(x_true)


for eps in (1e-10, 1e-14):
    x = inudft_solve(inudft_factor(p, n, epsilon=eps), b)
    print(f"direct solver, eps={eps:g}: coefficient error {err(x):.2e}")
for meth in ("cg_nor", "cg_adj"):
    rep = iterative_solve(meth, p, n, b, tol=1e-14, maxit=500)
    print(f"{meth}, 500 iterations: coefficient error {err(rep.x):.2e}")

# the reconstructed signal on a fine grid, via a zero-padded FFT
N = 6 * n
pad = np.zeros(N, complex)
pad[k % N] = inudft_solve(inudft_factor(p, n, epsilon=1e-14), b)
f = np.fft.fft(pad)
print("signal at x = 0, 0.25, 0.5:", ", ".join(f"{f[int(t * N)].real:+.4f}" for t in (0, 0.25, 0.5)))
print(f"largest sample location {p.max():.4f}; no samples in the last {8 / n:.4f} of the period")
