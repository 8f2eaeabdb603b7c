import io

import numpy as np
import pytest

from inudft.bench import BENCH_HEADER, BenchResult, emit_bench_csv, parse_bench_csv, run_bench
from inudft.fileio import read_complex_csv, read_nodes, write_complex_csv, write_nodes

from conftest import crandn


def test_nodes_round_trip(tmp_path, rng):
    p = rng.random(50)
    write_nodes(tmp_path / "n.txt", p)
    assert np.array_equal(read_nodes(tmp_path / "n.txt"), p)
    assert len((tmp_path / "n.txt").read_text().splitlines()) == 50


def test_complex_csv_round_trip(tmp_path, rng):
    for X in (crandn(rng, 9), crandn(rng, 9, 3)):
        write_complex_csv(tmp_path / "x.csv", X)
        Y = read_complex_csv(tmp_path / "x.csv")
        assert np.array_equal(Y, X.reshape(9, -1))
    header = (tmp_path / "x.csv").read_text().splitlines()[0]
    assert header == "re0,im0,re1,im1,re2,im2"


def test_complex_csv_errors(tmp_path):
    (tmp_path / "bad.csv").write_text("re,im\n1,2,3\n")
    with pytest.raises(ValueError):
        read_complex_csv(tmp_path / "bad.csv")


def test_single_row_csv():
    buf = io.StringIO()
    emit_bench_csv([BenchResult("direct", "jittered", 10, 5, 1e-10, 0.0123456, 0.001, 1e-11, None, None)], buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(BENCH_HEADER)
    fields = lines[1].split(",")
    assert fields[5] == "0.0123" and fields[8] == "" and fields[9] == ""


def test_empty_results_rejected():
    with pytest.raises(ValueError):
        emit_bench_csv([], io.StringIO())
    with pytest.raises(ValueError):
        BenchResult("x", "g", 1, 1, 1e-3, factor_s=-1.0)
    with pytest.raises(ValueError):
        BenchResult("x", "g", 1, 1, 1e-3, rel_residual=float("nan"))


def test_parse_back(rng):
    res = [BenchResult("cg_nor", "random_gap", 100, 50, 1e-7, None, 0.25, float(rng.random()), 42,
                       float(rng.random()) * 1e6),
           BenchResult("direct", "chebyshev", 100, 50, 1e-10, 1.0, 0.5, 1 / 3, None, None)]
    buf = io.StringIO()
    emit_bench_csv(res, buf)
    back = parse_bench_csv(buf.getvalue())
    for a, b in zip(res, back):
        for f in ("method", "grid", "m", "n", "tol", "rel_residual", "iterations", "cond2"):
            assert getattr(a, f) == getattr(b, f)
        for f in ("factor_s", "solve_s_per_rhs"):
            if getattr(a, f) is not None:
                assert float(f"{getattr(a, f):.3g}") == getattr(b, f)


def test_run_bench_rows():
    res = run_bench(["1", "4"], 128, 64, ["direct", "cg_nor"], tol=1e-7, seed=3)
    assert [(r.grid, r.method) for r in res] == [("jittered", "direct"), ("jittered", "cg_nor"),
                                                 ("random_gap", "direct"), ("random_gap", "cg_nor")]
    assert all(r.rel_residual < 1e-6 for r in res)
    assert res[0].iterations is None and res[1].iterations > 0 and res[0].cond2 is not None
