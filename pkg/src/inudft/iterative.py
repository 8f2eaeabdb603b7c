"""Iterative baselines for the inverse NUDFT: CG on the normal and adjoint normal equations.

Normal-family methods work on ``V^*V x = V^*b`` with the Toeplitz matrix applied
by a padded FFT.  Adjoint-family methods work on ``V V^* z = b`` and return
``x = V^* z``; at desk scale ``V V^*`` is applied densely.
"""

from dataclasses import dataclass, field
import enum

import numpy as np

from .transforms import (
    nudft_adjoint_apply,
    nudft_type1_sums,
    nudft_type2_apply,
    toeplitz_normal_apply,
    toeplitz_symbol,
)

__all__ = [
    "IterativeMethod",
    "IterativeReport",
    "sinc2_weights",
    "strang_preconditioner",
    "apply_circulant_inverse",
    "iterative_solve",
    "default_maxit",
]

NORMAL_MAXIT = 10000
ADJOINT_MAXIT = 8000
EIG_FLOOR = 1e-12
# above this many entries V is not stored and every apply re-evaluates phases
DENSE_V_LIMIT = 1 << 23


class IterativeMethod(str, enum.Enum):
    CG_NOR = "cg_nor"
    PCG_NOR_STRANG = "pcg_nor_strang"
    FP_ADJ_SINC = "fp_adj_sinc"
    CG_ADJ = "cg_adj"
    PCG_ADJ_SINC = "pcg_adj_sinc"

    @property
    def normal_family(self):
        return self in (IterativeMethod.CG_NOR, IterativeMethod.PCG_NOR_STRANG)


def default_maxit(method):
    return NORMAL_MAXIT if IterativeMethod(method).normal_family else ADJOINT_MAXIT


@dataclass
class IterativeReport:
    """Result of an iterative solve.  ``residual_history[k]`` is the relative residual after iteration ``k+1``."""

    x: np.ndarray
    iterations: int
    residual_history: list = field(default_factory=list)
    converged: bool = False
    method: str = ""


def _p_of(nodes):
    return np.asarray(getattr(nodes, "p", nodes), dtype=float)


class _Ops:
    """``V`` and ``V^*`` applies, with ``V`` cached when it fits in memory."""

    def __init__(self, p, n):
        self.p, self.n = p, n
        self.V = None
        if p.shape[0] * n <= DENSE_V_LIMIT:
            self.V = np.exp(-2j * np.pi * np.mod(np.outer(p, np.arange(n)), 1.0))

    def V_apply(self, x):
        return self.V @ x if self.V is not None else nudft_type2_apply(self.p, x)

    def Vh_apply(self, b):
        return self.V.conj().T @ b if self.V is not None else nudft_adjoint_apply(self.p, b, self.n)


def sinc2_weights(nodes, n):
    """Diagonal ``w`` minimizing ``||I - diag(w) V V^*||_F``: ``w_j = n / sum_j' |(V V^*)_jj'|^2``.

    The denominator is ``sum_{|q|<n} gamma_j^q (n-|q|) conj(t_q)`` with
    ``t_q = sum_j' gamma_j'^q``: one type-I sum with unit strengths followed by
    a type-II evaluation over the frequencies ``-(n-1)..n-1``.
    """
    p = _p_of(nodes)
    n = int(n)
    q = np.arange(-(n - 1), n)
    # sum_j' conj(gamma_j')^q = sum_j' gamma_j'^(-q)
    s = nudft_type1_sums(p, np.ones(p.shape[0]), (-(n - 1), n - 1))[::-1]
    coeff = (n - np.abs(q)) * s
    # shift frequencies to 0..2n-2 and undo with gamma^-(n-1)
    den = nudft_type2_apply(p, coeff) * np.exp(2j * np.pi * np.mod(p * (n - 1), 1.0))
    return n / den.real


def strang_preconditioner(t):
    """Eigenvalues of the Strang circulant for the Hermitian Toeplitz symbol `t` (length ``2n-1``).

    The circulant copies the central ``n`` diagonals.  For even ``n`` the
    wrapped entry ``l = n/2`` takes ``t_{n/2}``, so the circulant is not exactly
    Hermitian and its eigenvalues are kept complex.  Eigenvalues smaller in
    magnitude than ``1e-12`` times the largest are pushed out to that floor,
    keeping their phase.
    """
    t = np.asarray(t, dtype=complex)
    n = (t.shape[0] + 1) // 2
    half = -(-n // 2)
    l = np.arange(n)
    # first column of T is T[l, 0] = t_{-l}; wrap the lower half around
    q = np.where(l < half, -l, n - l)
    col = t[q + n - 1]
    lam = np.fft.fft(col)
    mag = np.abs(lam)
    floor = EIG_FLOOR * np.max(mag) if lam.size else 0.0
    small = mag < floor
    phase = np.where(mag[small] > 0, lam[small] / np.where(mag[small] > 0, mag[small], 1.0), 1.0)
    lam[small] = floor * phase
    return lam


def apply_circulant_inverse(lam, x):
    """``C^{-1} x`` for the circulant with eigenvalues `lam`."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 2:
        return np.fft.ifft(np.fft.fft(x, axis=0) / lam[:, None], axis=0)
    return np.fft.ifft(np.fft.fft(x) / lam)


def _cg(apply_A, rhs, x0, precond, monitor, tol, maxit):
    """Preconditioned CG for a Hermitian positive semidefinite operator; stops on ``monitor(x, r) <= tol``."""
    x = x0.copy()
    r = rhs - apply_A(x)
    zr = precond(r)
    d = zr.copy()
    rz = np.vdot(r, zr)
    hist = []
    for _ in range(maxit):
        Ad = apply_A(d)
        dAd = np.vdot(d, Ad).real
        if dAd <= 0.0 or not np.isfinite(dAd):
            break
        a = rz / dAd
        x = x + a * d
        r = r - a * Ad
        res = monitor(x, r)
        hist.append(res)
        if res <= tol:
            return x, hist, True
        zr = precond(r)
        rz_new = np.vdot(r, zr)
        d = zr + (rz_new / rz) * d
        rz = rz_new
    return x, hist, False


def iterative_solve(method, nodes, n, b, tol=1e-7, maxit=None):
    """Solve ``V x ~= b`` with one of the five baselines.

    Termination is on ``||V x - b|| / ||b||`` for the normal family and on
    ``||V V^* z - b|| / ||b||`` for the adjoint family; running out of
    iterations is reported through ``converged=False``.
    """
    method = IterativeMethod(method)
    if tol <= 0:
        raise ValueError("tol must be positive")
    maxit = default_maxit(method) if maxit is None else int(maxit)
    if maxit < 1:
        raise ValueError("maxit must be at least 1")
    p = _p_of(nodes)
    n = int(n)
    b = np.asarray(b, dtype=complex)
    if b.shape != p.shape:
        raise ValueError(f"b must have {p.shape[0]} entries")
    ops = _Ops(p, n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return IterativeReport(np.zeros(n, complex), 0, [], True, method.value)

    if method.normal_family:
        t = toeplitz_symbol(p, n)

        def apply_A(x):
            return toeplitz_normal_apply(t, x)

        if method is IterativeMethod.PCG_NOR_STRANG:
            lam = strang_preconditioner(t)

            def precond(r):
                return apply_circulant_inverse(lam, r)
        else:
            def precond(r):
                return r

        def monitor(x, r):
            return np.linalg.norm(ops.V_apply(x) - b) / bnorm

        x, hist, ok = _cg(apply_A, ops.Vh_apply(b), np.zeros(n, complex), precond, monitor, tol, maxit)
        return IterativeReport(x, len(hist), hist, ok, method.value)

    def apply_A(z):
        return ops.V_apply(ops.Vh_apply(z))

    if method is IterativeMethod.FP_ADJ_SINC:
        w = sinc2_weights(p, n)
        z = b.copy()
        hist = []
        ok = False
        r = apply_A(z) - b
        for _ in range(maxit):
            if np.linalg.norm(r) <= tol * bnorm:
                ok = True
                break
            z = z - w * r
            r = apply_A(z) - b
            hist.append(np.linalg.norm(r) / bnorm)
        else:
            ok = bool(hist) and hist[-1] <= tol
        return IterativeReport(ops.Vh_apply(z), len(hist), hist, ok, method.value)

    if method is IterativeMethod.PCG_ADJ_SINC:
        w = sinc2_weights(p, n)

        def precond(r):
            return w * r
    else:
        def precond(r):
            return r

    # the CG recursion already carries r = b - V V^* z
    def monitor(z, r):
        return np.linalg.norm(r) / bnorm

    z, hist, ok = _cg(apply_A, b, np.zeros_like(b), precond, monitor, tol, maxit)
    return IterativeReport(ops.Vh_apply(z), len(hist), hist, ok, method.value)
