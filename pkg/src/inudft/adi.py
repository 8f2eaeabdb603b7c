"""Factored ADI for Cauchy-like blocks and the one-sided interpolative decomposition."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

__all__ = [
    "CauchyBlockSpec",
    "LowRankFactor",
    "InterpolativeFactor",
    "ShiftCollisionError",
    "fadi",
    "fadi_left_only",
    "fadi_right_only",
    "one_sided_id",
    "one_sided_col_id",
]

# shifted diagonals closer than this to zero are treated as collisions
COLLISION_TOL = 1e-14


class ShiftCollisionError(ArithmeticError):
    """A shift coincides with an eigenvalue of the opposing diagonal."""


@dataclass(frozen=True, eq=False)
class CauchyBlockSpec:
    """Block ``A[j, k] = u_j conj(w_k) / (gamma_j - lam_k)`` solving ``Gamma A - A Lambda = u w^*``."""

    gamma_diag: np.ndarray
    lambda_diag: np.ndarray
    u_sub: np.ndarray
    w_sub: np.ndarray

    @property
    def shape(self):
        return (self.gamma_diag.shape[0], self.lambda_diag.shape[0])

    def dense(self):
        g = self.gamma_diag[:, None]
        lam = self.lambda_diag[None, :]
        return self.u_sub[:, None] * self.w_sub.conj()[None, :] / (g - lam)

    @classmethod
    def from_source(cls, src, rows, cols):
        """Restrict the displacement data of a :class:`CauchySource` to a block."""
        return cls(gamma_diag=src.gamma(rows), lambda_diag=src.lam(cols),
                   u_sub=src.u(rows), w_sub=src.w(cols))


@dataclass(frozen=True, eq=False)
class LowRankFactor:
    """``A ~= Z W^*``; one-sided runs leave the other factor as ``None``."""

    Z: np.ndarray = None
    W: np.ndarray = None

    @property
    def rank(self):
        return (self.Z if self.Z is not None else self.W).shape[1]


@dataclass(frozen=True, eq=False)
class InterpolativeFactor:
    """``A ~= U @ A[S, :]`` with ``U[S] = I``."""

    U: np.ndarray
    S: np.ndarray

    @property
    def rank(self):
        return self.S.shape[0]


def _safe_inv(diff, what, j):
    if diff.size and np.min(np.abs(diff)) < COLLISION_TOL:
        raise ShiftCollisionError(f"shift {j} ({what}) collides with a diagonal entry")
    return 1.0 / diff


def _left_columns(spec, shifts):
    g = spec.gamma_diag
    a, b = shifts.alpha, shifts.beta
    k = shifts.k
    Z = np.empty((g.shape[0], k), dtype=complex)
    if k == 0:
        return Z
    # z_j = (G - a_{j-1}) (G - b_j)^{-1} z_{j-1}; column j carries the scalar (b_j - a_j)
    z = _safe_inv(g - b[0], "beta", 0) * spec.u_sub
    Z[:, 0] = (b[0] - a[0]) * z
    for j in range(1, k):
        z = (g - a[j - 1]) * _safe_inv(g - b[j], "beta", j) * z
        Z[:, j] = (b[j] - a[j]) * z
    return Z


def _right_columns(spec, shifts):
    lc = spec.lambda_diag.conj()
    a, b = shifts.alpha.conj(), shifts.beta.conj()
    k = shifts.k
    W = np.empty((lc.shape[0], k), dtype=complex)
    if k == 0:
        return W
    v = _safe_inv(lc - a[0], "alpha", 0) * spec.w_sub
    W[:, 0] = v
    for j in range(1, k):
        v = (lc - b[j - 1]) * _safe_inv(lc - a[j], "alpha", j) * v
        W[:, j] = v
    return W


def fadi(spec, shifts):
    """Rank-``k`` factors ``Z W^*`` of the block after ``k`` fADI steps.

    Every step solves a shifted diagonal system, so the cost is ``O((p+q)k)``.
    """
    return LowRankFactor(Z=_left_columns(spec, shifts), W=_right_columns(spec, shifts))


def fadi_left_only(spec, shifts):
    """The ``Z`` factor alone; the column data of `spec` is never touched."""
    return LowRankFactor(Z=_left_columns(spec, shifts))


def fadi_right_only(spec, shifts):
    """The ``W`` factor alone; the row data of `spec` is never touched."""
    return LowRankFactor(W=_right_columns(spec, shifts))


def one_sided_id(Z, eps_id=1e-12):
    """Row interpolative decomposition ``Z ~= U Z[S]`` from pivoted QR of ``Z^T``.

    Columns of ``Z^T`` are pivoted; the rank is the number of diagonal entries
    of ``R`` at least ``eps_id`` times the first.  ``U[S]`` is exactly the
    identity.
    """
    Z = np.asarray(Z)
    p = Z.shape[0]
    if p == 0 or Z.shape[1] == 0 or not np.any(Z):
        return InterpolativeFactor(U=np.zeros((p, 0), dtype=complex), S=np.zeros(0, dtype=np.int64))
    _, R, P = sla.qr(Z.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    r = int(np.count_nonzero(diag >= eps_id * diag[0]))
    # the pivot magnitudes of column-pivoted QR are nonincreasing
    Ra, Rb = R[:r, :r], R[:r, r:]
    T = sla.solve_triangular(Ra, Rb)
    U = np.zeros((p, r), dtype=np.result_type(Z.dtype, complex))
    U[P[:r]] = np.eye(r)
    U[P[r:]] = T.T
    return InterpolativeFactor(U=U, S=P[:r].astype(np.int64))


def one_sided_col_id(W, eps_id=1e-12):
    """Column ID: for ``A = Z W^*``, ``A ~= A[:, S] V^*`` with ``V = U`` of ``one_sided_id(W)``."""
    return one_sided_id(W, eps_id)
