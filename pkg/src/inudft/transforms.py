"""Dense NUDFT transforms, the modulated DFT matrix F and FFT-based Toeplitz applies.

Conventions (0-based indices throughout the package):

* ``V[j, c] = gamma_j**c`` with ``gamma_j = exp(-2j*pi*p_j)`` and ``c = 0..n-1``.
* ``F[a, b] = exp(1j*pi*(a+1)*(2b+1)/n) / sqrt(n)``, a unitary matrix that
  diagonalizes the circular shift-down: ``F Q F^* = diag(omega**2, ..., omega**(2n))``.
* A Toeplitz symbol ``t`` of length ``2n-1`` stores ``t_q`` for ``q = -(n-1)..n-1``
  at position ``q + n - 1``, and represents the Hermitian matrix
  ``(V^*V)[k, k'] = t_{k'-k}``.
"""

import numpy as np

__all__ = [
    "fft_pow2",
    "apply_F",
    "dense_F",
    "nudft_type2_apply",
    "nudft_adjoint_apply",
    "nudft_type1_sums",
    "toeplitz_symbol",
    "toeplitz_normal_apply",
    "dense_toeplitz",
]

# rows of V materialized per chunk in the dense transforms
_CHUNK_ELEMS = 1 << 22


def _as_matrix(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        return x[:, None], True
    if x.ndim != 2:
        raise ValueError(f"expected a vector or matrix, got shape {x.shape}")
    return x, False


def fft_pow2(x, direction="forward"):
    """Unnormalized DFT of a power-of-two length vector.

    ``forward`` computes ``sum_k x_k exp(-2 pi i jk/N)``; ``inverse`` uses the
    opposite sign and divides by ``N``.  Backed by ``numpy.fft``.
    """
    x = np.asarray(x, dtype=complex)
    N = x.shape[0]
    if N < 1 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    if direction == "forward":
        return np.fft.fft(x, axis=0)
    if direction == "inverse":
        return np.fft.ifft(x, axis=0)
    raise ValueError(f"unknown direction {direction!r}")


def apply_F(y, mode="F"):
    """Apply ``F`` (``mode='F'``) or ``F^*`` (``mode='F_adjoint'``) to the rows of `y`.

    Works for any ``n >= 1`` in O(n log n) per column.
    """
    Y, was_vec = _as_matrix(y)
    n = Y.shape[0]
    if n == 0:
        raise ValueError("apply_F needs n >= 1")
    a = np.arange(n)
    if mode == "F":
        # (F y)_a = e^{i pi (a+1)/n} / sqrt(n) * sum_b e^{2 pi i (a+1) b / n} y_b
        s = np.roll(np.fft.ifft(Y, axis=0) * n, -1, axis=0)
        out = np.exp(1j * np.pi * (a + 1) / n)[:, None] * s / np.sqrt(n)
    elif mode == "F_adjoint":
        # (F^* y)_b = e^{-2 pi i b/n} / sqrt(n) * fft(e^{-i pi (a+1)/n} y_a)_b
        g = np.exp(-1j * np.pi * (a + 1) / n)[:, None] * Y
        out = np.exp(-2j * np.pi * a / n)[:, None] * np.fft.fft(g, axis=0) / np.sqrt(n)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out[:, 0] if was_vec else out


def dense_F(n):
    """Entrywise evaluation of ``F``; reference for tests."""
    if n < 1:
        raise ValueError("n must be positive")
    a = np.arange(1, n + 1)[:, None]
    b = np.arange(1, n + 1)[None, :]
    # reduce the exponent mod 2n before scaling to keep the phase exact
    e = (a * (2 * b - 1)) % (2 * n)
    return np.exp(1j * np.pi * e / n) / np.sqrt(n)


def _phases(p, freqs):
    # exp(-2 pi i p q) with the product reduced mod 1 first
    prod = np.multiply.outer(p, freqs)
    return np.exp(-2j * np.pi * (prod - np.round(prod)))


def _p_of(nodes):
    return np.asarray(getattr(nodes, "p", nodes), dtype=float)


def nudft_type2_apply(nodes, X):
    """Dense type-II transform ``b_j = sum_c gamma_j**c X[c]``.

    `nodes` is a NodeSet (its cluster order is used) or a raw array of p values.
    """
    p = _p_of(nodes)
    Xm, was_vec = _as_matrix(X)
    n = Xm.shape[0]
    m = p.shape[0]
    out = np.empty((m, Xm.shape[1]), dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(n, 1))
    freqs = np.arange(n)
    for lo in range(0, m, step):
        out[lo:lo + step] = _phases(p[lo:lo + step], freqs) @ Xm
    return out[:, 0] if was_vec else out


def nudft_adjoint_apply(nodes, B, n):
    """Dense adjoint ``V^* B`` (a type-I transform), shape ``n x r``."""
    p = _p_of(nodes)
    Bm, was_vec = _as_matrix(B)
    if Bm.shape[0] != p.shape[0]:
        raise ValueError("row count of B must equal the number of nodes")
    out = np.zeros((n, Bm.shape[1]), dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(n, 1))
    freqs = np.arange(n)
    for lo in range(0, p.shape[0], step):
        out += _phases(p[lo:lo + step], freqs).conj().T @ Bm[lo:lo + step]
    return out[:, 0] if was_vec else out


def nudft_type1_sums(nodes, c, q_range):
    """Return ``t_q = sum_j c_j gamma_j**q`` for ``q`` in the inclusive range ``q_range``."""
    p = _p_of(nodes)
    c = np.asarray(c, dtype=complex)
    if c.shape != p.shape:
        raise ValueError("strength vector must match the node count")
    qlo, qhi = q_range
    q = np.arange(qlo, qhi + 1)
    out = np.zeros(q.shape[0], dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(q.shape[0], 1))
    for lo in range(0, p.shape[0], step):
        out += c[lo:lo + step] @ _phases(p[lo:lo + step], q)
    return out


def toeplitz_symbol(nodes, n):
    """Symbol ``t_q = sum_j gamma_j**q``, ``|q| < n``, of the normal matrix ``V^*V``."""
    p = _p_of(nodes)
    return nudft_type1_sums(p, np.ones(p.shape[0]), (-(n - 1), n - 1))


def toeplitz_normal_apply(t, x):
    """Apply the Hermitian Toeplitz matrix with symbol `t` using a padded 2n FFT."""
    t = np.asarray(t, dtype=complex)
    X, was_vec = _as_matrix(x)
    n = X.shape[0]
    if t.shape[0] != 2 * n - 1:
        raise ValueError(f"symbol length {t.shape[0]} does not match n={n}")
    col = np.zeros(2 * n, dtype=complex)
    col[:n] = t[n - 1::-1]                 # T[i, 0] = t_{-i}
    col[n + 1:] = t[2 * n - 2:n - 1:-1]    # T[0, j] = t_j sits at row 2n-j
    pad = np.zeros((2 * n, X.shape[1]), dtype=complex)
    pad[:n] = X
    y = np.fft.ifft(np.fft.fft(col)[:, None] * np.fft.fft(pad, axis=0), axis=0)[:n]
    return y[:, 0] if was_vec else y


def dense_toeplitz(t):
    """Dense matrix ``T[k, k'] = t_{k'-k}``; reference for tests."""
    t = np.asarray(t, dtype=complex)
    n = (t.shape[0] + 1) // 2
    k = np.arange(n)
    return t[(k[None, :] - k[:, None]) + n - 1]
