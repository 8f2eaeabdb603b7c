"""Sample-location generators and the piecewise test signal used in the experiments.

Randomness comes from numpy's ``PCG64`` bit generator seeded explicitly, so a
``(kind, m, n, seed)`` tuple always produces the same grid bit for bit.
"""

from dataclasses import dataclass
import os

import numpy as np

__all__ = [
    "GridKind",
    "GRID_KINDS",
    "GRID_ALIASES",
    "generate_grid",
    "test_function",
    "test_signal",
    "signal_filter",
    "prephase",
    "default_seed",
]

GRID_KINDS = ("jittered", "chebyshev", "uniform_random", "random_gap")
# numeric names used on the command line and in benchmark output
GRID_ALIASES = {"1": "jittered", "2": "chebyshev", "3": "uniform_random", "4": "random_gap"}

DEFAULT_SEED = 20240601


def default_seed():
    """Seed from ``INUDFT_SEED`` if set, else a fixed constant."""
    env = os.environ.get("INUDFT_SEED")
    return int(env) if env not in (None, "") else DEFAULT_SEED


@dataclass(frozen=True)
class GridKind:
    """Grid family and parameters.

    ``theta`` is the jitter amplitude of the jittered grid; the random-gap
    grid leaves ``[1 - gap_factor/n, 1)`` empty.
    """

    tag: str
    theta: float = 0.5
    gap_factor: float = 8.0
    seed: int = None

    def __post_init__(self):
        tag = GRID_ALIASES.get(str(self.tag), self.tag)
        if tag not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.tag!r}; choose from {GRID_KINDS}")
        object.__setattr__(self, "tag", tag)
        if self.theta < 0:
            raise ValueError("jitter theta must be nonnegative")


def generate_grid(kind, m, n):
    """Raw (unsorted) sample locations in ``[0, 1)``.

    * jittered: ``((m - j) + theta psi_j) / m`` mod 1, ``psi_j ~ U[-1, 1]``;
    * chebyshev: ``(1 + cos(pi j/(m-1))) / 2`` mod 1, so the first and last coincide at 0;
    * uniform_random: ``U[0, 1)``;
    * random_gap: ``U[0, 1 - 8/n]``.

    Here ``j = 0..m-1``.
    """
    if not isinstance(kind, GridKind):
        kind = GridKind(kind)
    m, n = int(m), int(n)
    if m < 2:
        raise ValueError("need at least two samples")
    seed = default_seed() if kind.seed is None else kind.seed
    rng = np.random.Generator(np.random.PCG64(seed))
    j = np.arange(m)
    if kind.tag == "jittered":
        psi = rng.uniform(-1.0, 1.0, m) if kind.theta else np.zeros(m)
        p = ((m - j) + kind.theta * psi) / m
    elif kind.tag == "chebyshev":
        p = (1.0 + np.cos(np.pi * j / (m - 1))) / 2.0
    elif kind.tag == "uniform_random":
        p = rng.random(m)
    else:
        p = rng.uniform(0.0, 1.0 - kind.gap_factor / n, m)
    p = np.mod(p, 1.0)
    # mod can return exactly 1.0 for tiny negative inputs
    p[p >= 1.0] = 0.0
    return p


def test_function(x):
    """Chirp on ``[0, 3)``, top hat on ``(3.5, 4.5)``, triangle around 5.5; ``x`` in ``[0, 2 pi)``."""
    x = np.asarray(x, dtype=float)
    chirp = np.where(x < 3.0, np.sin(8.0 * x ** 2), 0.0)
    hat = np.where((x > 3.5) & (x < 4.5), 1.0, 0.0)
    tri = np.where(x >= 3.0, np.maximum(0.0, 1.0 - 2.0 * np.abs(x - 5.5)), 0.0)
    return chirp + hat + tri


def signal_filter(n):
    """Gaussian taper ``exp(-0.5 (7k/n)^2)`` for ``k = -n/2..n/2-1``."""
    k = np.arange(-(n // 2), n // 2)
    return np.exp(-0.5 * (7.0 * k / n) ** 2)


def fourier_coefficients(n, oversample=10):
    """``c_k ~= int_0^1 f(2 pi p) e^{2 pi i k p} dp`` for ``k = -n/2..n/2-1`` by the rectangle rule.

    The sign convention matches samples ``b_j = sum_k x_k exp(-2 pi i k p_j)``.
    """
    N = oversample * n
    p = np.arange(N) / N
    # ifft gives (1/N) sum_q f_q e^{+2 pi i k q/N}
    c = np.fft.ifft(test_function(2 * np.pi * p))
    k = np.arange(-(n // 2), n // 2)
    return c[k % N]


def test_signal(n, oversample=10):
    """Filtered coefficients in symmetric order ``k = -n/2..n/2-1``.

    Shifting the index by ``n/2`` turns this into the ``0..n-1`` coefficient
    vector of the solver; samples must then be prephased (see :func:`prephase`).
    """
    if n % 2:
        raise ValueError("the test signal needs an even n")
    return signal_filter(n) * fourier_coefficients(n, oversample)


def prephase(p, b, n):
    """Map samples of a symmetric-index series to the ``0..n-1`` convention: ``gamma^(n/2) b``.

    With ``gamma = exp(-2 pi i p)``, ``sum_{k=-n/2}^{n/2-1} x_k gamma^k = gamma^(-n/2) sum_c x_{c-n/2} gamma^c``.
    """
    p = np.asarray(p, dtype=float)
    ph = np.exp(-2j * np.pi * np.mod(p * (n // 2), 1.0))
    b = np.asarray(b)
    return ph[:, None] * b if b.ndim == 2 else ph * b
