"""Rectangular HSS matrices: tree, fADI-based construction for ``C``, matvec, assembly.

Tree labels follow the heap convention: the root is 0 and the children of
``t`` are ``2t+1`` and ``2t+2``.  Generators are keyed by label:

* leaves: ``D[t]`` (dense diagonal block), ``U[t]``, ``V[t]``;
* non-root, non-leaf children of a non-root parent: ``R[t]``, ``W[t]`` map the
  child basis into the parent basis;
* every non-leaf ``t`` has sibling generators ``B_lr``, ``B_rl``, stored either
  explicitly or as basis-row/column index lists into a :class:`CauchySource`.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .adi import CauchyBlockSpec, fadi_left_only, fadi_right_only, one_sided_id
from .cauchy import CauchySource
from .geometry import (
    adaptive_rank,
    adi_shifts,
    cluster_nodes,
    hss_block_arcs,
    hss_row_arcs,
    rank_bound,
    zolotarev_eta_mu,
)

__all__ = [
    "HssTree",
    "HssMatrix",
    "build_tree",
    "build_hss",
    "hss_matvec",
    "hss_to_dense",
    "random_hss",
    "default_leaf_cols",
]

log = logging.getLogger(__name__)

# hss_to_dense refuses to materialize more entries than this
DENSE_GUARD = 1 << 26


@dataclass
class TreeNode:
    label: int
    rows: tuple
    cols: tuple
    parent: int = None
    left: int = None
    right: int = None

    @property
    def is_leaf(self):
        return self.left is None

    @property
    def m(self):
        return self.rows[1] - self.rows[0]

    @property
    def n(self):
        return self.cols[1] - self.cols[0]


@dataclass
class HssTree:
    nodes: dict
    shape: tuple

    @property
    def root(self):
        return self.nodes[0]

    def postorder(self):
        out = []

        def visit(t):
            node = self.nodes[t]
            if not node.is_leaf:
                visit(node.left)
                visit(node.right)
            out.append(t)

        visit(0)
        return out

    def leaves(self):
        return [t for t in self.postorder() if self.nodes[t].is_leaf]

    def depth(self):
        def d(t):
            node = self.nodes[t]
            return 0 if node.is_leaf else 1 + max(d(node.left), d(node.right))

        return d(0)

    def children_under_root(self, t):
        return self.nodes[t].parent == 0


def _grow(nodes, label, parent, lo, hi, is_leaf, split, row_of, col_of):
    node = TreeNode(label=label, rows=(row_of(lo), row_of(hi)), cols=(col_of(lo), col_of(hi)), parent=parent)
    nodes[label] = node
    if not is_leaf(lo, hi):
        mid = split(lo, hi)
        node.left, node.right = 2 * label + 1, 2 * label + 2
        _grow(nodes, node.left, label, lo, mid, is_leaf, split, row_of, col_of)
        _grow(nodes, node.right, label, mid, hi, is_leaf, split, row_of, col_of)


def build_tree(partition, leaf_cols):
    """Split the cluster (column) range evenly until leaves hold at most `leaf_cols` clusters.

    Row ranges follow from the cluster slabs and may be empty or very tall.
    """
    n = partition.n
    if n < 1:
        raise ValueError("need at least one cluster")
    if leaf_cols < 2:
        raise ValueError("leaf_cols must be at least 2")
    bounds = partition.boundaries
    nodes = {}
    _grow(nodes, 0, None, 0, n,
          is_leaf=lambda lo, hi: hi - lo <= leaf_cols,
          split=lambda lo, hi: lo + (hi - lo + 1) // 2,
          row_of=lambda c: int(bounds[c]),
          col_of=lambda c: int(c))
    return HssTree(nodes=nodes, shape=(int(bounds[-1]), n))


def tree_from_leaf_sizes(row_sizes, col_sizes):
    """Balanced tree whose leaves have the given row and column counts (in order)."""
    row_sizes = np.asarray(row_sizes, dtype=np.int64)
    col_sizes = np.asarray(col_sizes, dtype=np.int64)
    if row_sizes.shape != col_sizes.shape or row_sizes.size == 0:
        raise ValueError("need matching, nonempty leaf size lists")
    rb = np.concatenate([[0], np.cumsum(row_sizes)])
    cb = np.concatenate([[0], np.cumsum(col_sizes)])
    nodes = {}
    _grow(nodes, 0, None, 0, len(row_sizes),
          is_leaf=lambda lo, hi: hi - lo == 1,
          split=lambda lo, hi: lo + (hi - lo + 1) // 2,
          row_of=lambda i: int(rb[i]),
          col_of=lambda i: int(cb[i]))
    return HssTree(nodes=nodes, shape=(int(rb[-1]), int(cb[-1])))


@dataclass(eq=False)
class HssMatrix:
    """Generators of a rectangular HSS matrix (see module docstring for the layout)."""

    tree: HssTree
    D: dict = field(default_factory=dict)
    U: dict = field(default_factory=dict)
    V: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)
    W: dict = field(default_factory=dict)
    B: dict = field(default_factory=dict)
    S_row: dict = field(default_factory=dict)
    S_col: dict = field(default_factory=dict)
    source: CauchySource = None
    epsilon: float = None

    @property
    def shape(self):
        return self.tree.shape

    def ku(self, t):
        if t == 0:
            return 0
        node = self.tree.nodes[t]
        if node.is_leaf:
            return self.U[t].shape[1]
        return self.R[node.left].shape[1]

    def kv(self, t):
        if t == 0:
            return 0
        node = self.tree.nodes[t]
        if node.is_leaf:
            return self.V[t].shape[1]
        return self.W[node.left].shape[1]

    def sibling(self, t):
        """``(B_lr, B_rl)`` for the non-leaf node `t`."""
        if t in self.B:
            return self.B[t]
        node = self.tree.nodes[t]
        l, r = node.left, node.right
        Blr = self.source.block(self.S_row[l], self.S_col[r])
        Brl = self.source.block(self.S_row[r], self.S_col[l])
        return Blr, Brl

    def max_rank(self):
        ks = [max(self.ku(t), self.kv(t)) for t in self.tree.nodes if t != 0]
        return max(ks, default=0)

    def generator_ranks(self):
        """``{label: (ku, kv)}`` for every non-root node."""
        return {t: (self.ku(t), self.kv(t)) for t in self.tree.nodes if t != 0}


def default_leaf_cols(epsilon, n):
    return max(2 * rank_bound(epsilon, n), 32)


def _complement(lo, hi, total):
    return np.concatenate([np.arange(0, lo), np.arange(hi, total)])


def build_hss(nodes, epsilon, leaf_cols=None, eps_id=None, adi_tol=None):
    """Compress ``C = V F^*`` for `nodes` into an HSS matrix.

    Each HSS row (column) is compressed by a one-sided fADI run on the row
    (column) side only, followed by a pivoted-QR interpolative decomposition.
    Ranks are chosen per block from the Zolotarev bound of that block's arcs.

    Parameters
    ----------
    nodes : NodeSet
    epsilon : float
        Target relative accuracy in ``(0, 1)``.
    leaf_cols : int, optional
        Maximum clusters per leaf; defaults to ``max(2 rank_bound, 32)``.
    eps_id : float, optional
        Pivot-ratio truncation of the interpolative decompositions
        (default ``epsilon``).
    adi_tol : float, optional
        Accuracy used to pick the fADI step count (default ``epsilon``).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    n = nodes.n
    part = cluster_nodes(nodes)
    if leaf_cols is None:
        leaf_cols = default_leaf_cols(epsilon, n)
    tree = build_tree(part, max(int(leaf_cols), 2))
    src = CauchySource.from_nodes(nodes)
    H = HssMatrix(tree=tree, source=src, epsilon=float(epsilon))
    eps_id = epsilon if eps_id is None else eps_id
    adi_tol = epsilon if adi_tol is None else adi_tol
    m = src.m

    for t in tree.postorder():
        node = tree.nodes[t]
        if node.is_leaf:
            H.D[t] = src.block(slice(*node.rows), slice(*node.cols))
        if t == 0:
            continue
        (r0, r1), (c0, c1) = node.rows, node.cols
        if node.is_leaf:
            row_cand = np.arange(r0, r1)
            col_cand = np.arange(c0, c1)
        else:
            row_cand = np.concatenate([H.S_row[node.left], H.S_row[node.right]])
            col_cand = np.concatenate([H.S_col[node.left], H.S_col[node.right]])

        # HSS row: rows of this node against every column outside it
        ncomp = n - (c1 - c0)
        if row_cand.size == 0 or ncomp == 0:
            Urow = np.zeros((row_cand.size, 0), dtype=complex)
            S = np.zeros(0, dtype=np.int64)
        else:
            arcJ, arcK = hss_row_arcs(c0, c1 - 1, n)
            eta, _ = zolotarev_eta_mu(arcJ, arcK)
            k = min(adaptive_rank(eta, adi_tol), row_cand.size, ncomp)
            spec = CauchyBlockSpec(gamma_diag=src.gamma(row_cand), lambda_diag=np.empty(0, complex),
                                   u_sub=src.u(row_cand), w_sub=np.empty(0, complex))
            idf = one_sided_id(fadi_left_only(spec, adi_shifts(arcJ, arcK, k)).Z, eps_id)
            Urow, S = idf.U, idf.S
        H.S_row[t] = row_cand[S]

        # HSS column: every row outside this node against its columns
        mcomp = m - (r1 - r0)
        if col_cand.size == 0 or mcomp == 0:
            Vcol = np.zeros((col_cand.size, 0), dtype=complex)
            S = np.zeros(0, dtype=np.int64)
        else:
            arcJ, arcK = hss_block_arcs(c0, c1 - 1, n)
            eta, _ = zolotarev_eta_mu(arcJ, arcK)
            k = min(adaptive_rank(eta, adi_tol), col_cand.size, mcomp)
            spec = CauchyBlockSpec(gamma_diag=np.empty(0, complex), lambda_diag=src.lam(col_cand),
                                   u_sub=np.empty(0, complex), w_sub=src.w(col_cand))
            idf = one_sided_id(fadi_right_only(spec, adi_shifts(arcJ, arcK, k)).W, eps_id)
            Vcol, S = idf.U, idf.S
        H.S_col[t] = col_cand[S]

        if node.is_leaf:
            H.U[t], H.V[t] = Urow, Vcol
        else:
            kl_u = H.S_row[node.left].size
            kl_v = H.S_col[node.left].size
            H.R[node.left], H.R[node.right] = Urow[:kl_u], Urow[kl_u:]
            H.W[node.left], H.W[node.right] = Vcol[:kl_v], Vcol[kl_v:]
    log.debug("built HSS: %d nodes, depth %d, max rank %d", len(tree.nodes), tree.depth(), H.max_rank())
    return H


def _as_matrix(x):
    x = np.asarray(x)
    return (x[:, None], True) if x.ndim == 1 else (x, False)


def hss_matvec(H, x):
    """``H @ x`` by an up-sweep over the column bases and a down-sweep over the row bases."""
    X, was_vec = _as_matrix(x)
    m, n = H.shape
    if X.shape[0] != n:
        raise ValueError(f"x has {X.shape[0]} rows, expected {n}")
    tree = H.tree
    r = X.shape[1]
    dtype = np.result_type(X.dtype, complex)
    order = tree.postorder()
    xhat = {}
    for t in order:
        node = tree.nodes[t]
        if t == 0:
            break
        if node.is_leaf:
            xhat[t] = H.V[t].conj().T @ X[node.cols[0]:node.cols[1]]
        else:
            xhat[t] = H.W[node.left].conj().T @ xhat[node.left] + H.W[node.right].conj().T @ xhat[node.right]
    Y = np.zeros((m, r), dtype=dtype)
    yhat = {0: None}
    for t in reversed(order):
        node = tree.nodes[t]
        if node.is_leaf:
            r0, r1 = node.rows
            Y[r0:r1] = H.D[t] @ X[node.cols[0]:node.cols[1]]
            if yhat[t] is not None:
                Y[r0:r1] += H.U[t] @ yhat[t]
            continue
        l, rr = node.left, node.right
        Blr, Brl = H.sibling(t)
        yl = Blr @ xhat[rr]
        yr = Brl @ xhat[l]
        if yhat[t] is not None:
            yl = yl + H.R[l] @ yhat[t]
            yr = yr + H.R[rr] @ yhat[t]
        yhat[l], yhat[rr] = yl, yr
    return Y[:, 0] if was_vec else Y


def hss_to_dense(H):
    """Assemble the dense matrix from the nested-basis recursions (small problems only)."""
    m, n = H.shape
    if m * n > DENSE_GUARD:
        raise MemoryError(f"refusing to assemble a {m}x{n} dense matrix")
    tree = H.tree

    def assemble(t):
        node = tree.nodes[t]
        if node.is_leaf:
            Uf = H.U.get(t, np.zeros((node.m, 0)))
            Vf = H.V.get(t, np.zeros((node.n, 0)))
            return H.D[t], Uf, Vf
        l, r = node.left, node.right
        Dl, Ul, Vl = assemble(l)
        Dr, Ur, Vr = assemble(r)
        Blr, Brl = H.sibling(t)
        A = np.block([[Dl, Ul @ Blr @ Vr.conj().T], [Ur @ Brl @ Vl.conj().T, Dr]])
        if t == 0:
            return A, None, None
        Uf = np.vstack([Ul @ H.R[l], Ur @ H.R[r]])
        Vf = np.vstack([Vl @ H.W[l], Vr @ H.W[r]])
        return A, Uf, Vf

    return assemble(0)[0]


def random_hss(row_sizes, col_sizes, rank, rng=None, dtype=complex):
    """HSS matrix with random generators on a balanced tree over the given leaves.

    `rank` is an int or a callable ``rank(label) -> (ku, kv)``; ranks are
    clipped to the available rows and columns so the matrix is well defined.
    """
    rng = np.random.default_rng(rng)
    tree = tree_from_leaf_sizes(row_sizes, col_sizes)
    H = HssMatrix(tree=tree)

    def draw(*shape):
        a = rng.standard_normal(shape)
        if np.issubdtype(np.dtype(dtype), np.complexfloating):
            a = a + 1j * rng.standard_normal(shape)
        return a.astype(dtype)

    rk = rank if callable(rank) else (lambda t: (int(rank), int(rank)))
    ku, kv = {}, {}
    for t in tree.postorder():
        node = tree.nodes[t]
        if node.is_leaf:
            H.D[t] = draw(node.m, node.n)
        if t == 0:
            break
        a, b = rk(t)
        if node.is_leaf:
            ku[t], kv[t] = min(a, node.m), min(b, node.n)
            H.U[t] = draw(node.m, ku[t])
            H.V[t] = draw(node.n, kv[t])
        else:
            l, r = node.left, node.right
            ku[t] = min(a, ku[l] + ku[r])
            kv[t] = min(b, kv[l] + kv[r])
            H.R[l], H.R[r] = draw(ku[l], ku[t]), draw(ku[r], ku[t])
            H.W[l], H.W[r] = draw(kv[l], kv[t]), draw(kv[r], kv[t])
    for t, node in tree.nodes.items():
        if not node.is_leaf:
            l, r = node.left, node.right
            H.B[t] = (draw(ku[l], kv[r]), draw(ku[r], kv[l]))
    return H
