import threading

import numpy as np
import pytest

from inudft.hss import hss_to_dense, random_hss
from inudft.urv import RankDeficiencyError, Reflectors, UrvBreakdownError, urv_factor, urv_solve

from conftest import crandn, rel


def _lstsq(A, b):
    return np.linalg.lstsq(A, b, rcond=None)[0]


def test_single_leaf_is_dense_qr(rng):
    H = random_hss([30], [12], 0, rng)
    b = crandn(rng, 30)
    y = urv_solve(urv_factor(H), b)
    assert rel(y, _lstsq(H.D[0], b)) < 1e-12


def test_two_leaf_oracle(rng):
    H = random_hss([20, 20], [10, 10], 3, rng)
    A = hss_to_dense(H)
    b = crandn(rng, 40)
    y = urv_solve(urv_factor(H), b)
    r, r0 = np.linalg.norm(A @ y - b), np.linalg.norm(A @ _lstsq(A, b) - b)
    assert abs(r - r0) <= 1e-12 * r0


def test_size_reduction_applied(rng):
    k, nt = 3, 5
    H = random_hss([20 * (k + nt), 12], [nt, 6], k, rng)
    F = urv_factor(H)
    f = F.nodes[1]
    assert f.omega is not None and f.m_tilde == k + nt
    assert 2 not in F.size_reduced()


def test_zero_rhs(rng):
    H = random_hss([10, 12, 11], [4, 5, 4], 2, rng)
    assert not np.any(urv_solve(urv_factor(H), np.zeros(33)))


def test_consistent_recovery(rng):
    H = random_hss([20, 18, 22, 16, 19, 21, 17, 23], [8] * 8, 3, rng)
    A = hss_to_dense(H)
    y0 = crandn(rng, 64)
    y = urv_solve(urv_factor(H), A @ y0)
    assert rel(y, y0) <= 1e-10 * np.linalg.cond(A)


def test_inconsistent_residual(rng):
    H = random_hss([16] * 8, [8] * 8, 3, rng)
    A = hss_to_dense(H)
    b = crandn(rng, 128)
    y = urv_solve(urv_factor(H), b)
    r, r0 = np.linalg.norm(A @ y - b), np.linalg.norm(A @ _lstsq(A, b) - b)
    assert abs(r - r0) <= 1e-12 * r0


def test_random_oracle_equivalence():
    rng = np.random.default_rng(7)
    for trial in range(100):
        L = int(rng.integers(1, 9))
        cs = rng.integers(3, 16, L)
        rs = cs * rng.integers(1, 4, L) + rng.integers(0, 5, L)
        if trial % 10 == 0:
            rs[0] = 40 * (cs[0] + 4)
        H = random_hss(rs, cs, int(rng.integers(1, 5)), rng)
        A = hss_to_dense(H)
        m, n = A.shape
        assert n <= 128 and m <= 1024
        b = crandn(rng, m, 2)
        y = urv_solve(urv_factor(H), b)
        y0 = _lstsq(A, b)
        r = np.linalg.norm(A @ y - b, axis=0)
        r0 = np.linalg.norm(A @ y0 - b, axis=0)
        assert np.all(np.abs(r - r0) <= 1e-11 * np.maximum(r0, 1e-300) + 1e-13 * np.linalg.norm(b, axis=0))
        kap = np.linalg.cond(A)
        assert np.all(np.linalg.norm(y - y0, axis=0) <= 1e-9 * kap * np.linalg.norm(y0, axis=0))


def test_multi_rhs_bitwise(rng):
    H = random_hss([30, 25, 28, 31], [10, 9, 11, 10], 3, rng)
    F = urv_factor(H)
    B = crandn(rng, 114, 13)
    Y = urv_solve(F, B)
    for j in range(13):
        assert np.array_equal(urv_solve(F, B[:, j]), Y[:, j])


def test_unitary_factors(rng):
    H = random_hss([200, 20, 25, 30], [6, 7, 8, 6], 3, rng)
    F = urv_factor(H)
    for f in F.nodes.values():
        for R in (f.omega, f.P, f.Q):
            if R is not None and R.m:
                Q = R.dense()
                assert np.allclose(Q.conj().T @ Q, np.eye(R.m), atol=1e-13)
        if f.Vbar is not None and f.Vbar.size:
            k = f.Vbar.shape[0]
            # antitriangular: zero above the antidiagonal
            for j in range(k):
                assert np.all(f.Vbar[j, :k - 1 - j] == 0)


def test_part1_norm_does_not_grow(rng):
    H = random_hss([40, 35, 38, 41], [8, 9, 8, 7], 3, rng)
    F = urv_factor(H)
    b = crandn(rng, 154)
    # the root solve sees only rotated pieces of b
    tree = F.tree
    c2, total = {}, 0.0
    for t in tree.postorder():
        node, f = tree.nodes[t], F.nodes[t]
        blk = b[node.rows[0]:node.rows[1], None] if node.is_leaf else np.vstack([c2.pop(node.left), c2.pop(node.right)])
        if f.omega is not None:
            blk = f.omega.apply_h(blk)[:f.m_tilde]
        c = f.Q.apply_h(blk)
        total += np.linalg.norm(c[:f.n1]) ** 2
        c2[t] = c[f.n1:]
    assert np.sqrt(total) <= np.linalg.norm(b) * (1 + 1e-14)


def test_breakdown_and_rank_errors(rng):
    H = random_hss([3, 3], [6, 6], 1, rng)
    with pytest.raises(UrvBreakdownError):
        urv_factor(H)
    H = random_hss([20], [4], 0, rng)
    H.D[0][:, 2] = 0
    with pytest.raises(RankDeficiencyError):
        urv_factor(H)


def test_dimension_mismatch(rng):
    F = urv_factor(random_hss([20, 20], [6, 6], 2, rng))
    with pytest.raises(ValueError):
        urv_solve(F, np.zeros(39))


def test_concurrent_solves(rng):
    H = random_hss([40, 35, 38, 41, 30, 33], [8, 9, 8, 7, 8, 9], 3, rng)
    F = urv_factor(H)
    B = crandn(rng, 217, 16)
    ref = [urv_solve(F, B[:, j]) for j in range(16)]
    out = [None] * 16

    def work(j):
        for _ in range(5):
            out[j] = urv_solve(F, B[:, j])

    threads = [threading.Thread(target=work, args=(j,)) for j in range(16)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(np.array_equal(out[j], ref[j]) for j in range(16))


def test_reflectors_empty():
    R, T = Reflectors.factor(np.zeros((0, 3)))
    assert T.shape == (0, 3) and R.nrefl == 0
    assert np.array_equal(R.apply_h(np.zeros((0, 2))), np.zeros((0, 2)))
