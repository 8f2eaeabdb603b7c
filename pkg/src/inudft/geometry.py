"""Node sets, clusters, arc geometry and Zolotarev/ADI quantities.

Cluster indices are 0-based: cluster ``c`` collects the nodes nearest to the
root of unity ``lambda_c = exp(2j*pi*(c+1)/n)``, which is also the diagonal
entry of column ``c`` of the transformed (Cauchy-like) matrix.
"""

from dataclasses import dataclass
import math

import numpy as np

from .elliptic import ellipk_comp, dn_comp

__all__ = [
    "NodeSet",
    "ClusterPartition",
    "Arc",
    "ShiftSet",
    "make_node_set",
    "cluster_nodes",
    "hss_block_arcs",
    "hss_row_arcs",
    "zolotarev_eta_mu",
    "adaptive_rank",
    "rank_bound",
    "adi_shifts",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Sample locations in cluster-contiguous order.

    Attributes
    ----------
    p : ndarray
        Locations in ``[0, 1)``, ``p = p_raw[perm]``.
    perm : ndarray of int
        Row permutation from input order to cluster order.
    n : int
        Number of Fourier coefficients.
    t : ndarray
        Cluster coordinate, ``gamma = exp(2j*pi*t/n)`` with ``t`` in ``(1/2, n+1/2]``.
    cluster : ndarray of int
        0-based cluster of each node (``kappa - 1``).
    d : ndarray
        Offset ``t - (cluster + 1)`` in ``(-1/2, 1/2]``.
    """

    p: np.ndarray
    perm: np.ndarray
    n: int
    t: np.ndarray
    cluster: np.ndarray
    d: np.ndarray

    @property
    def m(self):
        return self.p.shape[0]

    @property
    def gamma(self):
        return np.exp(2j * np.pi * self.t / self.n)

    def permute_rows(self, B):
        """Reorder rows of `B` (input order) into cluster order."""
        return np.asarray(B)[self.perm]

    def unpermute_rows(self, B):
        out = np.empty_like(B)
        out[self.perm] = B
        return out


@dataclass(frozen=True, eq=False)
class ClusterPartition:
    """Row slabs: cluster ``c`` owns rows ``boundaries[c]:boundaries[c+1]``."""

    boundaries: np.ndarray
    cluster_of: np.ndarray

    @property
    def n(self):
        return self.boundaries.shape[0] - 1

    @property
    def m(self):
        return int(self.boundaries[-1])

    def slab(self, c):
        return slice(int(self.boundaries[c]), int(self.boundaries[c + 1]))

    def sizes(self):
        return np.diff(self.boundaries)


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc ``{exp(i theta): theta_lo <= theta <= theta_hi}``."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        w = self.theta_hi - self.theta_lo
        if not (0.0 <= w < TWO_PI) or not np.isfinite(w):
            raise ValueError(f"arc width must lie in [0, 2pi), got {w}")

    @property
    def width(self):
        return self.theta_hi - self.theta_lo

    @property
    def mid(self):
        return 0.5 * (self.theta_lo + self.theta_hi)

    def contains(self, z, tol=1e-12):
        """Whether the unit-modulus points `z` lie on the arc (angle tolerance `tol`)."""
        ang = np.mod(np.angle(z) - self.theta_lo + tol, TWO_PI) - tol
        return ang <= self.width + tol


@dataclass(frozen=True, eq=False)
class ShiftSet:
    """ADI shift pairs; ``alpha`` sits on the row (Gamma) side, ``beta`` on the column side."""

    alpha: np.ndarray
    beta: np.ndarray

    @property
    def k(self):
        return self.alpha.shape[0]


def make_node_set(p_raw, n):
    """Sort nodes into cluster-contiguous order and record the permutation.

    Nodes with ``t = n(1-p) <= 1/2`` (``p`` just below one) belong to the last
    cluster, which straddles angle zero; they are moved to the end so every
    cluster occupies a contiguous slab.
    """
    p_raw = np.asarray(p_raw, dtype=float)
    if p_raw.ndim != 1:
        raise ValueError("p_raw must be a vector")
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if p_raw.size and (not np.all(np.isfinite(p_raw)) or p_raw.min() < 0.0 or p_raw.max() >= 1.0):
        raise ValueError("all sample locations must lie in [0, 1); reduce them mod 1 first")
    t_raw = n * (1.0 - p_raw)
    t_raw = np.where(t_raw <= 0.5, t_raw + n, t_raw)
    perm = np.argsort(t_raw, kind="stable")
    t = t_raw[perm]
    kappa = np.ceil(t - 0.5).astype(np.int64)
    # guard the half-open boundary against rounding in the ceil
    kappa = np.clip(kappa, 1, n)
    return NodeSet(p=p_raw[perm], perm=perm, n=n, t=t, cluster=kappa - 1, d=t - kappa)


def cluster_nodes(nodes):
    """Partition the rows of `nodes` into the ``n`` cluster slabs (some may be empty)."""
    counts = np.bincount(nodes.cluster, minlength=nodes.n)
    boundaries = np.zeros(nodes.n + 1, dtype=np.int64)
    np.cumsum(counts, out=boundaries[1:])
    return ClusterPartition(boundaries=boundaries, cluster_of=nodes.cluster.copy())


def hss_block_arcs(c1, c2, n):
    """Arcs ``(A_J, A_K)`` for the HSS column of the cluster range ``c1..c2`` (0-based, inclusive).

    ``A_K`` holds the column eigenvalues ``lambda_c`` of the range and ``A_J``
    every row node outside the range's clusters.
    """
    k1, k2 = c1 + 1, c2 + 1
    if not (1 <= k1 <= k2 <= n):
        raise ValueError(f"invalid cluster range {c1}..{c2} for n={n}")
    if k2 - k1 + 1 >= n:
        raise ValueError("cluster range covers every cluster; the block has no complement")
    arcJ = Arc(np.pi * (2 * k2 + 1) / n, np.pi * (2 * n + 2 * k1 - 1) / n)
    arcK = Arc(2 * np.pi * k1 / n, 2 * np.pi * k2 / n)
    return arcJ, arcK


def hss_row_arcs(c1, c2, n):
    """Arcs ``(A_J, A_K)`` for the HSS row of the cluster range ``c1..c2``.

    ``A_J`` holds the row nodes of the range's clusters and ``A_K`` the column
    eigenvalues outside the range.
    """
    k1, k2 = c1 + 1, c2 + 1
    if not (1 <= k1 <= k2 <= n):
        raise ValueError(f"invalid cluster range {c1}..{c2} for n={n}")
    if k2 - k1 + 1 >= n:
        raise ValueError("cluster range covers every cluster; the block has no complement")
    arcJ = Arc(np.pi * (2 * k1 - 1) / n, np.pi * (2 * k2 + 1) / n)
    arcK = Arc(2 * np.pi * (k2 + 1) / n, 2 * np.pi * (n + k1 - 1) / n)
    return arcJ, arcK


def _endpoints(arcJ, arcK):
    """Return (tau1, tau2, rho1, rho2) with K rotated to start after J; error if they meet."""
    tau1, tau2 = arcJ.theta_lo, arcJ.theta_hi
    rho1 = tau1 + np.mod(arcK.theta_lo - tau1, TWO_PI)
    rho2 = rho1 + arcK.width
    if not (tau2 < rho1 and rho2 < tau1 + TWO_PI):
        raise ValueError("arcs overlap")
    return tau1, tau2, rho1, rho2


def zolotarev_eta_mu(arcJ, arcK):
    """Cross-ratio parameter ``eta >= 1`` and ``mu = exp(pi^2 / (2 log(16 eta)))``."""
    tau1, tau2, rho1, rho2 = _endpoints(arcJ, arcK)
    num = abs(math.sin(0.5 * (rho1 - tau1)) * math.sin(0.5 * (rho2 - tau2)))
    den = abs(math.sin(0.5 * (rho2 - tau1)) * math.sin(0.5 * (rho1 - tau2)))
    eta = max(num / den, 1.0)
    mu = math.exp(np.pi ** 2 / (2.0 * math.log(16.0 * eta)))
    return eta, mu


def adaptive_rank(eta, epsilon):
    """Smallest ``k`` with ``4 mu^(-2k) <= epsilon`` for the given ``eta``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return max(1, math.ceil(math.log(4.0 / epsilon) * math.log(16.0 * eta) / np.pi ** 2))


def rank_bound(epsilon, n):
    """Worst-case off-diagonal rank ``ceil(2 log(4/eps) log(4n) / pi^2)``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 1:
        raise ValueError("n must be positive")
    return math.ceil(2.0 * math.log(4.0 / epsilon) * math.log(4.0 * n) / np.pi ** 2)


def _mobius_to_zero_one_inf(z1, z2, z3):
    # matrix of z -> (z - z1)(z2 - z3) / ((z - z3)(z2 - z1))
    return np.array([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]], dtype=complex)


def _apply_mobius(M, x):
    return (M[0, 0] * x + M[0, 1]) / (M[1, 0] * x + M[1, 1])


def _zolotarev_real(ell, k):
    """Zeros ``p_j`` in ``[ell, 1]`` of the optimal rational for ``[-1,-ell] U [ell,1]``."""
    K = ellipk_comp(ell)
    j = np.arange(1, k + 1)
    u = (2 * j - 1) * K / (2 * k)
    pj = np.empty(k)
    half = (k + 1) // 2
    pj[:half] = dn_comp(u[:half], ell)
    # dn(u) dn(K - u) = ell keeps the small values accurate
    upper = np.arange(half + 1, k + 1)
    pj[upper - 1] = ell / pj[k - upper]
    return pj


def adi_shifts(arcJ, arcK, k):
    """Zolotarev shift pairs for fADI between arcs `arcJ` (rows) and `arcK` (columns).

    The arcs are mapped by a Mobius transformation onto ``[ell, 1]`` and
    ``[-1, -ell]``, the real Zolotarev shifts ``+-dn((2j-1)K/(2k), k')`` are
    formed there and mapped back: ``alpha_j`` lands on `arcJ`, ``beta_j`` on
    `arcK`.
    """
    k = int(k)
    if k < 1:
        raise ValueError("need at least one shift")
    tau1, tau2, rho1, rho2 = _endpoints(arcJ, arcK)
    eta, _ = zolotarev_eta_mu(arcJ, arcK)
    if arcJ.width == 0.0 or arcK.width == 0.0 or eta - 1.0 <= 1e-14:
        # a point arc: a single pole (or zero) at the point is exact
        a = np.exp(1j * arcJ.mid)
        b = np.exp(1j * arcK.mid)
        return ShiftSet(alpha=np.full(k, a), beta=np.full(k, b))
    ell = 1.0 / (2.0 * eta - 1.0 + 2.0 * math.sqrt(eta * (eta - 1.0)))
    pj = _zolotarev_real(ell, k)
    e = np.exp(1j * np.array([tau1, tau2, rho1]))
    M1 = _mobius_to_zero_one_inf(*e)
    M2 = _mobius_to_zero_one_inf(ell, 1.0, -1.0)
    S = np.linalg.solve(M1, M2)  # M1^{-1} M2: real line -> circle
    alpha = _apply_mobius(S, pj)
    beta = _apply_mobius(S, -pj)
    # project the rounding back onto the unit circle
    return ShiftSet(alpha=alpha / np.abs(alpha), beta=beta / np.abs(beta))
