"""End-to-end inverse NUDFT: transform to Cauchy-like form, compress, factor once, solve many."""

from dataclasses import dataclass
import logging
import time

import numpy as np

from .geometry import make_node_set
from .hss import build_hss
from .transforms import apply_F
from .urv import DEFAULT_SRF, urv_factor, urv_solve

__all__ = ["InudftFactorization", "inudft_factor", "inudft_solve", "inudft_one_shot", "DEFAULT_EPSILON"]

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-10
RHS_BLOCK = 128


@dataclass(eq=False)
class InudftFactorization:
    """Reusable factorization of the least-squares problem ``V x = b``."""

    nodes: object
    hss: object
    urv: object
    epsilon: float
    w: np.ndarray
    timings: dict

    @property
    def m(self):
        return self.nodes.m

    @property
    def n(self):
        return self.nodes.n


def inudft_factor(p_raw, n, epsilon=DEFAULT_EPSILON, leaf_cols=None, srf=DEFAULT_SRF, eps_id=None):
    """Factor the ``m x n`` NUDFT matrix at locations `p_raw` (input order, values in [0, 1)).

    `eps_id` overrides the interpolative-decomposition truncation (default
    `epsilon`); for very ill-conditioned grids a value below `epsilon` buys
    accuracy in the 2-norm at little extra rank.

    Raises ``ValueError`` for ``m < n`` or ``epsilon`` outside ``(0, 1)``;
    breakdown and rank-deficiency errors from the URV step propagate.
    """
    p_raw = np.asarray(p_raw, dtype=float)
    n = int(n)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if p_raw.ndim != 1 or p_raw.shape[0] < n:
        raise ValueError(f"need at least n={n} samples, got {p_raw.shape[0] if p_raw.ndim == 1 else p_raw.shape}")
    t0 = time.perf_counter()
    nodes = make_node_set(p_raw, n)
    e_last = np.zeros(n, dtype=complex)
    e_last[-1] = 1.0
    w = apply_F(e_last)
    t1 = time.perf_counter()
    H = build_hss(nodes, epsilon, leaf_cols=leaf_cols, eps_id=eps_id)
    t2 = time.perf_counter()
    F = urv_factor(H, srf=srf)
    t3 = time.perf_counter()
    timings = {"setup": t1 - t0, "hss": t2 - t1, "urv": t3 - t2}
    log.info("factored m=%d n=%d eps=%g: hss %.3fs, urv %.3fs, max rank %d",
             nodes.m, n, epsilon, timings["hss"], timings["urv"], H.max_rank())
    return InudftFactorization(nodes=nodes, hss=H, urv=F, epsilon=float(epsilon), w=w, timings=timings)


def inudft_solve(fact, B_raw, block=RHS_BLOCK):
    """Least-squares coefficients ``x`` for samples `B_raw` (rows in input order)."""
    B = np.asarray(B_raw)
    was_vec = B.ndim == 1
    if was_vec:
        B = B[:, None]
    if B.shape[0] != fact.m:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {fact.m}")
    Bp = fact.nodes.permute_rows(B).astype(complex, copy=False)
    X = np.empty((fact.n, B.shape[1]), dtype=complex)
    for lo in range(0, B.shape[1], block):
        Y = urv_solve(fact.urv, Bp[:, lo:lo + block])
        X[:, lo:lo + block] = apply_F(Y, "F_adjoint")
    return X[:, 0] if was_vec else X


def inudft_one_shot(p_raw, n, B, epsilon=DEFAULT_EPSILON, **kw):
    """Factor and solve in one call."""
    return inudft_solve(inudft_factor(p_raw, n, epsilon, **kw), B)
