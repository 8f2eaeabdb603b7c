"""URV factorization of a rectangular HSS matrix and the hierarchical least-squares solve.

All unitary factors (size reduction ``Omega``, reversed-QR ``P``, partial
triangularization ``Q``) are kept as LAPACK Householder reflectors and applied
with ``zunmqr``; nothing of size ``m x m`` is ever formed.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

__all__ = [
    "Reflectors",
    "UrvFactorization",
    "UrvBreakdownError",
    "RankDeficiencyError",
    "urv_factor",
    "urv_solve",
]

DEFAULT_SRF = 6.0
# Right-hand sides are solved in zero-padded chunks of exactly this width.
# BLAS picks kernels (and summation orders) by operand shape, so a fixed
# chunk width is what makes a column's result independent of how many
# right-hand sides share the call.
RHS_PAD = 8


class UrvBreakdownError(ArithmeticError):
    """A node has fewer active rows than columns left to triangularize."""


class RankDeficiencyError(ArithmeticError):
    """A triangular factor has an exactly zero (or non-finite) diagonal entry."""


@dataclass(frozen=True, eq=False)
class Reflectors:
    """Unitary ``Q`` of order ``m`` stored as the output of ``zgeqrf``."""

    qr: np.ndarray
    tau: np.ndarray
    m: int

    @classmethod
    def factor(cls, A):
        """QR of `A`; returns ``(Reflectors, R)`` with ``R`` of shape ``min(m, n) x n``."""
        A = np.asarray(A, dtype=complex)
        m, n = A.shape
        if m == 0 or n == 0:
            return cls(np.zeros((m, 0), complex), np.zeros(0, complex), m), np.zeros((min(m, n), n), complex)
        qr, tau, _, info = lapack.zgeqrf(np.asfortranarray(A))
        if info != 0:
            raise np.linalg.LinAlgError(f"zgeqrf failed with info={info}")
        kk = min(m, n)
        return cls(qr[:, :kk].copy(order="F"), tau[:kk].copy(), m), np.triu(qr[:kk, :])

    @property
    def nrefl(self):
        return self.tau.shape[0]

    def _apply(self, C, side, trans):
        C = np.asarray(C, dtype=complex)
        if self.nrefl == 0 or C.size == 0:
            return C.copy()
        rows, cols = C.shape
        lwork = max(1, 64 * (cols if side == "L" else rows))
        out, _, info = lapack.zunmqr(side, trans, self.qr, self.tau, np.asfortranarray(C), lwork)
        if info != 0:
            raise np.linalg.LinAlgError(f"zunmqr failed with info={info}")
        return out

    def apply_h(self, C):
        """``Q^* C``."""
        return self._apply(C, "L", "C")

    def apply(self, C):
        """``Q C``."""
        return self._apply(C, "L", "N")

    def apply_right(self, C):
        """``C Q``."""
        return self._apply(C, "R", "N")

    def dense(self):
        return self.apply(np.eye(self.m, dtype=complex))


@dataclass(eq=False)
class NodeFactor:
    """URV blocks of one tree node.  ``rows_in`` is the row count entering the node."""

    rows_in: int
    omega: Reflectors = None
    m_tilde: int = 0
    P: Reflectors = None
    kv_bar: int = 0
    Q: Reflectors = None
    D11: np.ndarray = None
    D12: np.ndarray = None
    D22: np.ndarray = None
    U1: np.ndarray = None
    U2: np.ndarray = None
    Vbar: np.ndarray = None
    # non-leaf only: B_lr Vbar_r^*, B_rl Vbar_l^* and the child translations R
    G_lr: np.ndarray = None
    G_rl: np.ndarray = None
    R_l: np.ndarray = None
    R_r: np.ndarray = None

    @property
    def n1(self):
        return self.D11.shape[0]


@dataclass(eq=False)
class UrvFactorization:
    tree: object
    nodes: dict = field(default_factory=dict)
    shape: tuple = (0, 0)
    srf: float = DEFAULT_SRF

    def size_reduced(self):
        return [t for t, f in self.nodes.items() if f.omega is not None]


def _check_triangular(D11, t):
    d = np.diag(D11)
    if d.size and (not np.all(np.isfinite(d)) or np.any(d == 0.0)):
        raise RankDeficiencyError(f"node {t}: triangular block has a zero or non-finite diagonal")


def _factor_node(t, D, U, V, srf):
    mt, nt = D.shape
    ku = U.shape[1]
    f = NodeFactor(rows_in=mt)
    # size reduction when the block row is much taller than wide
    if mt >= srf * (ku + nt) and mt > ku + nt:
        f.omega, Rfull = Reflectors.factor(np.hstack([U, D]))
        f.m_tilde = ku + nt
        Ut, Dt = Rfull[:, :ku], Rfull[:, ku:]
    else:
        f.m_tilde = mt
        Ut, Dt = U, D
    # reversed QR: V = P [0; Vbar], P = Q_V with columns reversed
    f.P, RV = Reflectors.factor(V)
    if f.P.m == 0:
        f.P = Reflectors(np.zeros((nt, 0), complex), np.zeros(0, complex), nt)
    f.kv_bar = min(V.shape[1], nt)
    f.Vbar = RV[:f.kv_bar][::-1]
    Dhat = f.P.apply_right(Dt)[:, ::-1]
    n1 = nt - f.kv_bar
    if f.m_tilde < n1:
        raise UrvBreakdownError(
            f"node {t}: {f.m_tilde} active rows cannot triangularize {n1} columns")
    f.Q, R11 = Reflectors.factor(Dhat[:, :n1])
    f.D11 = R11[:n1, :n1]
    _check_triangular(f.D11, t)
    rest = f.Q.apply_h(np.hstack([Dhat[:, n1:], Ut]))
    kb = f.kv_bar
    f.D12, f.D22 = rest[:n1, :kb], rest[n1:, :kb]
    f.U1, f.U2 = rest[:n1, kb:], rest[n1:, kb:]
    return f


def urv_factor(H, srf=DEFAULT_SRF):
    """Bottom-up URV factorization of the HSS matrix `H`.

    Raises
    ------
    UrvBreakdownError
        A node (or the root) has fewer rows than the columns it must eliminate.
    RankDeficiencyError
        A triangular block has an exactly zero diagonal entry.
    """
    tree = H.tree
    F = UrvFactorization(tree=tree, shape=H.shape, srf=float(srf))
    for t in tree.postorder():
        node = tree.nodes[t]
        if node.is_leaf:
            D = np.asarray(H.D[t], dtype=complex)
            U = np.asarray(H.U.get(t, np.zeros((node.m, 0))), dtype=complex)
            V = np.asarray(H.V.get(t, np.zeros((node.n, 0))), dtype=complex)
            G = None
        else:
            l, r = node.left, node.right
            fl, fr = F.nodes[l], F.nodes[r]
            Blr, Brl = H.sibling(t)
            G_lr = np.asarray(Blr, dtype=complex) @ fr.Vbar.conj().T
            G_rl = np.asarray(Brl, dtype=complex) @ fl.Vbar.conj().T
            D = np.block([[fl.D22, fl.U2 @ G_lr], [fr.U2 @ G_rl, fr.D22]])
            if t == 0:
                U = np.zeros((D.shape[0], 0), complex)
                V = np.zeros((D.shape[1], 0), complex)
                Rl = Rr = None
            else:
                Rl, Rr = H.R[l], H.R[r]
                U = np.vstack([fl.U2 @ Rl, fr.U2 @ Rr])
                V = np.vstack([fl.Vbar @ H.W[l], fr.Vbar @ H.W[r]])
            G = (G_lr, G_rl, Rl, Rr)
        if t == 0:
            mt, nt = D.shape
            if mt < nt:
                raise UrvBreakdownError(f"root block is {mt}x{nt}; the system is underdetermined")
            f = NodeFactor(rows_in=mt, m_tilde=mt)
            f.Q, R = Reflectors.factor(D)
            f.D11 = R[:nt, :nt]
            _check_triangular(f.D11, t)
            f.kv_bar = 0
        else:
            f = _factor_node(t, D, U, V, srf)
        if G is not None:
            f.G_lr, f.G_rl, f.R_l, f.R_r = G
        F.nodes[t] = f
    return F


def urv_solve(F, B):
    """Least-squares solution of ``H y = B`` (column by column) from the URV factors.

    Every call allocates its own work arrays, so concurrent solves against one
    factorization are safe.
    """
    Bm = np.asarray(B)
    was_vec = Bm.ndim == 1
    if was_vec:
        Bm = Bm[:, None]
    m, n = F.shape
    if Bm.shape[0] != m:
        raise ValueError(f"B has {Bm.shape[0]} rows, expected {m}")
    r = Bm.shape[1]
    Y = np.empty((n, r), dtype=complex)
    for lo in range(0, r, RHS_PAD):
        chunk = np.zeros((m, RHS_PAD), dtype=complex)
        hi = min(lo + RHS_PAD, r)
        chunk[:, :hi - lo] = Bm[:, lo:hi]
        Y[:, lo:hi] = _solve_chunk(F, chunk)[:, :hi - lo]
    return Y[:, 0] if was_vec else Y


def _solve_chunk(F, Bm):
    n = F.shape[1]
    tree = F.tree
    order = tree.postorder()

    # part 1: push the right-hand side through Omega^* and Q^*
    c1, c2 = {}, {}
    for t in order:
        node = tree.nodes[t]
        f = F.nodes[t]
        if node.is_leaf:
            b = Bm[node.rows[0]:node.rows[1]]
        else:
            b = np.vstack([c2.pop(node.left), c2.pop(node.right)])
        if t != 0 and f.omega is not None:
            b = f.omega.apply_h(b)[:f.m_tilde]
        c = f.Q.apply_h(b)
        c1[t], c2[t] = c[:f.n1], c[f.n1:]
    c2.clear()

    # part 2: hierarchical back substitution from the root down
    Y = np.empty((n, Bm.shape[1]), dtype=complex)
    w2 = {}
    z = {0: None}
    for t in reversed(order):
        node = tree.nodes[t]
        f = F.nodes[t]
        rhs = c1.pop(t)
        if t != 0:
            rhs = rhs - f.D12 @ w2[t]
            if z[t] is not None:
                rhs = rhs - f.U1 @ z[t]
        w1 = sla.solve_triangular(f.D11, rhs) if f.n1 else rhs
        if t == 0:
            y = w1
        else:
            y = f.P.apply(np.vstack([w1, w2.pop(t)])[::-1])
        if node.is_leaf:
            Y[node.cols[0]:node.cols[1]] = y
            continue
        lc, rc = node.left, node.right
        kl = F.nodes[lc].kv_bar
        w2[lc], w2[rc] = y[:kl], y[kl:]
        zl = f.G_lr @ w2[rc]
        zr = f.G_rl @ w2[lc]
        if z[t] is not None:
            zl = zl + f.R_l @ z[t]
            zr = zr + f.R_r @ z[t]
        z[lc], z[rc] = zl, zr
    return Y
