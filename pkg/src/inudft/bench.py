"""Benchmark harness: direct solver and iterative baselines on the four grids, reported as CSV."""

from dataclasses import dataclass
import csv
import math
import time

import numpy as np

from .grids import GridKind, generate_grid
from .iterative import IterativeMethod, iterative_solve
from .pipeline import DEFAULT_EPSILON, inudft_factor, inudft_solve
from .transforms import nudft_type2_apply

__all__ = ["BenchResult", "BENCH_HEADER", "emit_bench_csv", "parse_bench_csv", "run_bench", "METHODS"]

BENCH_HEADER = ["method", "grid", "m", "n", "tol", "factor_s", "solve_s_per_rhs",
                "rel_residual", "iterations", "cond2"]
METHODS = ("direct",) + tuple(m.value for m in IterativeMethod)
# the condition number is only computed (densely) below this many entries
COND_LIMIT = 1 << 22


@dataclass
class BenchResult:
    method: str
    grid: str
    m: int
    n: int
    tol: float
    factor_s: float = None
    solve_s_per_rhs: float = None
    rel_residual: float = None
    iterations: int = None
    cond2: float = None

    def __post_init__(self):
        for name in ("factor_s", "solve_s_per_rhs"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.rel_residual is not None and not math.isfinite(self.rel_residual):
            raise ValueError("residual must be finite")


def _fmt_time(v):
    return "" if v is None else f"{v:.3g}"


def _fmt_float(v):
    return "" if v is None else repr(float(v))


def _row(r):
    return [r.method, r.grid, str(r.m), str(r.n), _fmt_float(r.tol), _fmt_time(r.factor_s),
            _fmt_time(r.solve_s_per_rhs), _fmt_float(r.rel_residual),
            "" if r.iterations is None else str(r.iterations), _fmt_float(r.cond2)]


def emit_bench_csv(results, out):
    """Write `results` in input order to the text stream `out`."""
    results = list(results)
    if not results:
        raise ValueError("no benchmark results to write")
    w = csv.writer(out)
    w.writerow(BENCH_HEADER)
    for r in results:
        w.writerow(_row(r))


def parse_bench_csv(text_or_stream):
    """Read rows written by :func:`emit_bench_csv` back into :class:`BenchResult` objects."""
    src = text_or_stream.splitlines() if isinstance(text_or_stream, str) else text_or_stream
    reader = csv.reader(src)
    header = next(reader)
    if header != BENCH_HEADER:
        raise ValueError(f"unexpected header {header}")

    def opt(s, conv):
        return None if s == "" else conv(s)

    out = []
    for rec in reader:
        if not rec:
            continue
        d = dict(zip(BENCH_HEADER, rec))
        out.append(BenchResult(method=d["method"], grid=d["grid"], m=int(d["m"]), n=int(d["n"]),
                               tol=float(d["tol"]), factor_s=opt(d["factor_s"], float),
                               solve_s_per_rhs=opt(d["solve_s_per_rhs"], float),
                               rel_residual=opt(d["rel_residual"], float),
                               iterations=opt(d["iterations"], int), cond2=opt(d["cond2"], float)))
    return out


def _rel_residual(p, n, x, b):
    return float(np.linalg.norm(nudft_type2_apply(p, x) - b) / np.linalg.norm(b))


def run_bench(grids, m, n, methods=("direct",), tol=1e-7, epsilon=DEFAULT_EPSILON, seed=None,
              maxit=None, cond=True):
    """One :class:`BenchResult` per (grid, method), grids outermost.

    The right-hand side is consistent, ``b = V x`` with complex Gaussian ``x``
    drawn from `seed`; the direct solver uses `epsilon` and reports it in the
    ``tol`` column, iterative methods stop at `tol`.
    """
    results = []
    for g in grids:
        kind = GridKind(str(g), seed=seed)
        p = generate_grid(kind, m, n)
        rng = np.random.Generator(np.random.PCG64(kind.seed if kind.seed is not None else 0))
        x_true = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        b = nudft_type2_apply(p, x_true)
        c2 = None
        if cond and m * n <= COND_LIMIT:
            c2 = float(np.linalg.cond(np.exp(-2j * np.pi * np.mod(np.outer(p, np.arange(n)), 1.0))))
        for meth in methods:
            if meth == "direct":
                t0 = time.perf_counter()
                fact = inudft_factor(p, n, epsilon)
                t1 = time.perf_counter()
                x = inudft_solve(fact, b)
                t2 = time.perf_counter()
                results.append(BenchResult("direct", kind.tag, m, n, epsilon, t1 - t0, t2 - t1,
                                           _rel_residual(p, n, x, b), None, c2))
            else:
                t0 = time.perf_counter()
                rep = iterative_solve(meth, p, n, b, tol, maxit)
                t1 = time.perf_counter()
                results.append(BenchResult(IterativeMethod(meth).value, kind.tag, m, n, tol, None, t1 - t0,
                                           _rel_residual(p, n, rep.x, b), rep.iterations, c2))
    return results
