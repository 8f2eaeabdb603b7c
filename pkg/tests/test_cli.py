import subprocess
import sys

import numpy as np
import pytest

from inudft.bench import BENCH_HEADER
from inudft.cli import main
from inudft.fileio import read_complex_csv, read_nodes, write_complex_csv, write_nodes

from conftest import crandn, dense_V


@pytest.fixture
def problem(tmp_path):
    nodes = tmp_path / "nodes.txt"
    assert main(["grid", "--kind", "jittered", "--m", "512", "--n", "256", "--theta", "0.5",
                 "--seed", "7", "--out", str(nodes)]) == 0
    p = read_nodes(nodes)
    rhs = tmp_path / "b.csv"
    write_complex_csv(rhs, dense_V(p, 256) @ crandn(np.random.default_rng(0), 256, 2))
    return tmp_path, nodes, rhs


def test_grid_lines(problem):
    _, nodes, _ = problem
    assert len(nodes.read_text().splitlines()) == 512


def test_solve_rows(problem):
    d, nodes, rhs = problem
    out = d / "x.csv"
    assert main(["solve", "--nodes", str(nodes), "--n", "256", "--rhs", str(rhs), "--tol", "1e-10", "--out", str(out)]) == 0
    assert read_complex_csv(out).shape == (256, 2)


def test_factor_apply_matches_solve(problem):
    d, nodes, rhs = problem
    assert main(["solve", "--nodes", str(nodes), "--n", "256", "--rhs", str(rhs), "--out", str(d / "x1.csv")]) == 0
    assert main(["factor", "--nodes", str(nodes), "--n", "256", "--out", str(d / "f.bin")]) == 0
    assert main(["apply", "--factor", str(d / "f.bin"), "--rhs", str(rhs), "--out", str(d / "x2.csv")]) == 0
    assert (d / "x1.csv").read_bytes() == (d / "x2.csv").read_bytes()


def test_bench_rows(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--grids", "1,2,3,4", "--m", "512", "--n", "256", "--methods", "direct,cg_nor",
                 "--tol", "1e-7", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(BENCH_HEADER)
    assert len(lines) == 1 + 8


def test_bench_reproducible(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"b{i}.csv"
        assert main(["bench", "--grids", "3", "--m", "128", "--n", "64", "--methods", "direct,cg_adj",
                     "--seed", "4", "--out", str(out)]) == 0
        rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
        outs.append([[f for j, f in enumerate(r) if j not in (5, 6)] for r in rows])
    assert outs[0] == outs[1]


def test_usage_errors(tmp_path, capsys):
    assert main([]) == 1
    assert main(["bench", "--m", "8", "--n", "4", "--bogus"]) == 1
    assert main(["grid", "--kind", "spiral", "--m", "8", "--n", "4", "--out", str(tmp_path / "g")]) == 1
    assert main(["solve", "--nodes", str(tmp_path / "missing"), "--n", "4", "--rhs", "x", "--out", "y"]) == 1
    assert main(["bench", "--m", "8", "--n", "4", "--methods", "magic"]) == 1
    assert "inudft" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    import inudft.cli as cli
    from inudft.urv import UrvBreakdownError

    def boom(*a, **k):
        raise UrvBreakdownError("node 3: 2 active rows cannot triangularize 5 columns")

    monkeypatch.setattr(cli, "inudft_factor", boom)
    write_nodes(tmp_path / "n.txt", np.linspace(0, 0.9, 10))
    assert main(["factor", "--nodes", str(tmp_path / "n.txt"), "--n", "4", "--out", str(tmp_path / "f")]) == 2


def test_reconstruct(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["reconstruct", "--grid", "1", "--n", "64", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 6 * 64
    vals = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    assert np.max(np.abs(vals[:, 1] - vals[:, 3])) < 1e-6
    assert "relative coefficient error" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "inudft", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "reconstruct" in r.stdout
