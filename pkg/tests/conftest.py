import numpy as np
import pytest


def dense_V(p, n):
    p = np.asarray(p, dtype=float)
    return np.exp(-2j * np.pi * np.mod(np.outer(p, np.arange(n)), 1.0))


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b))


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
