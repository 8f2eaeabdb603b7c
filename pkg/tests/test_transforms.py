import numpy as np
import pytest

from inudft.cauchy import dense_cauchy
from inudft.geometry import make_node_set
from inudft.transforms import (
    apply_F,
    dense_F,
    dense_toeplitz,
    fft_pow2,
    nudft_adjoint_apply,
    nudft_type1_sums,
    nudft_type2_apply,
    toeplitz_normal_apply,
    toeplitz_symbol,
)

from conftest import crandn, dense_V, rel


def test_fft_impulse_and_identity():
    assert np.allclose(fft_pow2(np.array([1, 0, 0, 0], complex)), np.ones(4))
    for d in ("forward", "inverse"):
        assert np.allclose(fft_pow2(np.array([2 + 3j]), d), [2 + 3j])


def test_fft_round_trip(rng):
    x = crandn(rng, 64)
    assert rel(fft_pow2(fft_pow2(x), "inverse"), x) < 1e-14
    assert np.allclose(fft_pow2(x), np.fft.fft(x))


def test_fft_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        fft_pow2(np.ones(6))


def test_F_small_cases():
    assert np.allclose(apply_F(np.array([2.0 + 1j])), [-(2.0 + 1j)])
    F2 = np.array([[1j, -1j], [-1, -1]]) / np.sqrt(2)
    assert np.allclose(dense_F(2), F2, atol=1e-15)
    assert np.allclose(F2 @ F2.conj().T, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12, 17, 32, 64])
def test_F_matches_dense_and_is_isometric(n, rng):
    y = crandn(rng, n, 3)
    F = dense_F(n)
    assert rel(apply_F(y), F @ y) < 1e-13
    assert rel(apply_F(y, "F_adjoint"), F.conj().T @ y) < 1e-13
    assert abs(np.linalg.norm(apply_F(y)) - np.linalg.norm(y)) < 1e-13 * np.linalg.norm(y)


def test_F_rejects_empty():
    with pytest.raises(ValueError):
        apply_F(np.zeros(0, complex))


def test_F_diagonalizes_shift():
    n = 16
    F = dense_F(n)
    Q = np.roll(np.eye(n), 1, axis=0)  # circular shift down
    lam = np.exp(2j * np.pi * np.arange(1, n + 1) / n)
    assert np.allclose(F @ Q @ F.conj().T, np.diag(lam), atol=1e-13)


def test_type2_trivial_cases(rng):
    x = crandn(rng, 7)
    assert np.isclose(nudft_type2_apply(np.array([0.0]), x)[0], x.sum())
    p = rng.random(5)
    assert np.allclose(nudft_type2_apply(p, np.array([3.0 + 0j])), 3.0)


def test_type2_equispaced_matches_fft(rng):
    m = n = 8
    p = (m - np.arange(1, m + 1)) / m
    x = crandn(rng, n)
    # gamma_j = exp(-2 pi i p_j) = exp(2 pi i j'/m) with j' = j - m
    ref = np.array([np.sum(x * np.exp(-2j * np.pi * pj * np.arange(n))) for pj in p])
    assert rel(nudft_type2_apply(p, x), ref) < 1e-13
    assert rel(nudft_type2_apply(p, x), np.fft.ifft(x)[(np.arange(1, m + 1)) % m] * n) < 1e-13


def test_adjoint_is_adjoint(rng):
    p = rng.random(30)
    X, B = crandn(rng, 12, 2), crandn(rng, 30, 2)
    lhs = np.vdot(nudft_type2_apply(p, X), B)
    rhs = np.vdot(X, nudft_adjoint_apply(p, B, 12))
    assert abs(lhs - rhs) < 1e-12 * abs(lhs)


def test_type1_sums(rng):
    g = rng.random()
    t = nudft_type1_sums(np.array([g]), np.ones(1), (-3, 3))
    assert np.allclose(t, np.exp(-2j * np.pi * g * np.arange(-3, 4)))
    n = 16
    t = toeplitz_symbol(np.arange(n) / n, n)
    assert np.isclose(t[n - 1], n) and np.max(np.abs(np.delete(t, n - 1))) < 1e-12
    p, c = rng.random(50), crandn(rng, 50)
    ref = [sum(c[j] * np.exp(-2j * np.pi * p[j] * q) for j in range(50)) for q in range(-10, 11)]
    assert rel(nudft_type1_sums(p, c, (-10, 10)), ref) < 1e-13


@pytest.mark.parametrize("n", [1, 2, 7, 32, 64])
def test_toeplitz_apply(n, rng):
    p = rng.random(2 * n + 3)
    t = toeplitz_symbol(p, n)
    assert np.allclose(t[:n - 1][::-1], t[n:].conj())
    V = dense_V(p, n)
    x = crandn(rng, n)
    assert rel(toeplitz_normal_apply(t, x), V.conj().T @ V @ x) < 1e-12
    assert rel(dense_toeplitz(t), V.conj().T @ V) < 1e-12


def test_toeplitz_equispaced():
    n = 8
    t = toeplitz_symbol(np.arange(n) / n, n)
    x = np.arange(n) + 1j
    assert np.allclose(toeplitz_normal_apply(t, x), n * x)


def test_vandermonde_to_cauchy(rng):
    n = 32
    p = rng.random(70)
    ns = make_node_set(p, n)
    y = crandn(rng, n)
    C = dense_cauchy(ns)
    assert rel(nudft_type2_apply(ns.p, apply_F(y, "F_adjoint")), C @ y) < 1e-12
