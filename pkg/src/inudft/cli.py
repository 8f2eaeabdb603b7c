"""Command-line front end: ``inudft {grid,solve,factor,apply,bench,reconstruct}``.

Exit status is 0 on success, 1 for usage and input errors, 2 when the
factorization breaks down numerically.
"""

import argparse
import logging
import sys

import numpy as np

from .adi import ShiftCollisionError
from .bench import METHODS, emit_bench_csv, run_bench
from .fileio import read_complex_csv, read_nodes, write_complex_csv, write_nodes
from .grids import GRID_ALIASES, GRID_KINDS, GridKind, generate_grid, prephase, test_signal
from .iterative import iterative_solve
from .pipeline import DEFAULT_EPSILON, inudft_factor, inudft_solve
from .serialize import ContainerError, load_factorization, save_factorization
from .urv import RankDeficiencyError, UrvBreakdownError

__all__ = ["main"]

log = logging.getLogger("inudft")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (UrvBreakdownError, RankDeficiencyError, ShiftCollisionError, np.linalg.LinAlgError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _grid_kind(s):
    tag = GRID_ALIASES.get(s, s)
    if tag not in GRID_KINDS:
        raise argparse.ArgumentTypeError(f"unknown grid {s!r}")
    return tag


def _csv_list(s):
    return [x.strip() for x in s.split(",") if x.strip()]


def _out_stream(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")


def build_parser():
    ap = _Parser(prog="inudft", description="Direct least-squares inversion of the type-II NUDFT.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("grid", help="write sample locations, one per line")
    g.add_argument("--kind", type=_grid_kind, required=True, help="jittered|chebyshev|uniform_random|random_gap or 1-4")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--theta", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=None, help="defaults to $INUDFT_SEED")
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="factor and solve in one go")
    s.add_argument("--nodes", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--tol", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--leaf-cols", type=int, default=None)
    s.add_argument("--out", required=True)

    f = sub.add_parser("factor", help="factor and save to a binary container")
    f.add_argument("--nodes", required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--tol", type=float, default=DEFAULT_EPSILON)
    f.add_argument("--leaf-cols", type=int, default=None)
    f.add_argument("--out", required=True)

    a = sub.add_parser("apply", help="solve with a saved factorization")
    a.add_argument("--factor", required=True)
    a.add_argument("--rhs", required=True)
    a.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="time the direct and iterative solvers; CSV output")
    b.add_argument("--grids", type=_csv_list, default=["1", "2", "3", "4"])
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--methods", type=_csv_list, default=["direct"])
    b.add_argument("--tol", type=float, default=1e-7, help="iterative stopping tolerance")
    b.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="direct-solver accuracy")
    b.add_argument("--maxit", type=int, default=None)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--no-cond", action="store_true", help="skip the dense condition number")
    b.add_argument("--out", default="-")

    r = sub.add_parser("reconstruct", help="test-signal reconstruction; CSV of the signal on 6n points")
    r.add_argument("--grid", type=_grid_kind, default="random_gap")
    r.add_argument("--n", type=int, default=512)
    r.add_argument("--m", type=int, default=None, help="defaults to round(1.8 n)")
    r.add_argument("--noise", type=float, default=0.0, help="std of the real and imaginary noise parts")
    r.add_argument("--method", default="direct", choices=METHODS)
    r.add_argument("--tol", type=float, default=DEFAULT_EPSILON)
    r.add_argument("--maxit", type=int, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default="-")
    return ap


def _solve_to_file(fact, rhs_path, out):
    B = read_complex_csv(rhs_path)
    if B.shape[0] != fact.m:
        raise UsageError(f"right-hand side has {B.shape[0]} rows but there are {fact.m} nodes")
    write_complex_csv(out, inudft_solve(fact, B))


def _cmd_grid(args):
    p = generate_grid(GridKind(args.kind, theta=args.theta, seed=args.seed), args.m, args.n)
    write_nodes(args.out, p)


def _cmd_solve(args):
    fact = inudft_factor(read_nodes(args.nodes), args.n, args.tol, leaf_cols=args.leaf_cols)
    _solve_to_file(fact, args.rhs, args.out)


def _cmd_factor(args):
    fact = inudft_factor(read_nodes(args.nodes), args.n, args.tol, leaf_cols=args.leaf_cols)
    save_factorization(fact, args.out)


def _cmd_apply(args):
    _solve_to_file(load_factorization(args.factor), args.rhs, args.out)


def _cmd_bench(args):
    for g in args.grids:
        _grid_kind(g)
    bad = [m for m in args.methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown methods {bad}; choose from {list(METHODS)}")
    res = run_bench(args.grids, args.m, args.n, args.methods, tol=args.tol, epsilon=args.epsilon,
                    seed=args.seed, maxit=args.maxit, cond=not args.no_cond)
    out = _out_stream(args.out)
    try:
        emit_bench_csv(res, out)
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_reconstruct(args):
    n = args.n
    m = args.m if args.m is not None else int(round(1.8 * n))
    kind = GridKind(args.grid, seed=args.seed)
    p = generate_grid(kind, m, n)
    x_true = test_signal(n)
    k = np.arange(-(n // 2), n // 2)
    b = np.exp(-2j * np.pi * np.mod(np.outer(p, k), 1.0)) @ x_true
    if args.noise > 0:
        rng = np.random.Generator(np.random.PCG64(kind.seed if kind.seed is not None else 0))
        b = b + args.noise * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    b = prephase(p, b, n)
    if args.method == "direct":
        x = inudft_solve(inudft_factor(p, n, args.tol), b)
    else:
        x = iterative_solve(args.method, p, n, b, args.tol, args.maxit).x
    err = np.linalg.norm(x - x_true) / np.linalg.norm(x_true)
    print(f"relative coefficient error {err:.3e}", file=sys.stderr)
    # Fourier series on 6n equispaced points by a zero-padded FFT
    N = 6 * n
    pad_true = np.zeros(N, complex)
    pad_rec = np.zeros(N, complex)
    pad_true[k % N] = x_true
    pad_rec[k % N] = x
    f_true, f_rec = np.fft.fft(pad_true), np.fft.fft(pad_rec)
    out = _out_stream(args.out)
    try:
        out.write("p,true_re,true_im,rec_re,rec_im\r\n")
        for q in range(N):
            vals = (q / N, f_true[q].real, f_true[q].imag, f_rec[q].real, f_rec[q].imag)
            out.write(",".join(repr(float(v)) for v in vals) + "\r\n")
    finally:
        if out is not sys.stdout:
            out.close()


_COMMANDS = {"grid": _cmd_grid, "solve": _cmd_solve, "factor": _cmd_factor, "apply": _cmd_apply,
             "bench": _cmd_bench, "reconstruct": _cmd_reconstruct}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        _COMMANDS[args.cmd](args)
    except NUMERIC_ERRORS as e:
        print(f"inudft: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError, ContainerError) as e:
        print(f"inudft: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
