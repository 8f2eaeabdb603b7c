"""Entries of the Cauchy-like matrix ``C = V F^*`` and its displacement data.

``C`` satisfies ``Gamma C - C Lambda = u w^*`` with ``Gamma = diag(gamma)``,
``Lambda = diag(lambda_c)``, ``u_j = gamma_j**n - 1`` and ``w = F e_{n-1}``.
Entries are evaluated through the cluster coordinate ``t = kappa + d``:

    C[j, c] = sin(pi d_j) / sin(pi (t_j - c - 1)/n) * exp(i pi (d_j - t_j/n)) / sqrt(n)

which has no cancellation for nodes near a root of unity and takes the limit
value ``n`` when ``d_j = 0`` and ``c`` is the node's own cluster.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["CauchySource", "dense_cauchy"]


@dataclass(frozen=True, eq=False)
class CauchySource:
    """Evaluates blocks of ``C`` for a NodeSet (rows in cluster order)."""

    t: np.ndarray
    d: np.ndarray
    n: int

    @classmethod
    def from_nodes(cls, nodes):
        return cls(t=np.asarray(nodes.t, dtype=float), d=np.asarray(nodes.d, dtype=float), n=int(nodes.n))

    @property
    def m(self):
        return self.t.shape[0]

    @property
    def shape(self):
        return (self.m, self.n)

    def gamma(self, rows=slice(None)):
        return np.exp(2j * np.pi * self.t[rows] / self.n)

    def lam(self, cols):
        return np.exp(2j * np.pi * (np.asarray(cols) + 1) / self.n)

    def u(self, rows=slice(None)):
        """``gamma**n - 1 = 2i sin(pi d) exp(i pi d)``, exact zero at cluster centers."""
        d = self.d[rows]
        return 2j * np.sin(np.pi * d) * np.exp(1j * np.pi * d)

    def w(self, cols):
        """Entries of ``w = F e_{n-1}``: ``exp(-i pi (c+1)/n) / sqrt(n)``."""
        return np.exp(-1j * np.pi * (np.asarray(cols) + 1) / self.n) / np.sqrt(self.n)

    def block(self, rows, cols):
        """Dense ``C[rows][:, cols]`` for index arrays (or slices) `rows`, `cols`."""
        t = self.t[rows]
        d = self.d[rows]
        c = np.arange(self.n)[cols] if isinstance(cols, slice) else np.asarray(cols, dtype=np.int64)
        num = np.sin(np.pi * d)[:, None]
        den = np.sin(np.pi * (t[:, None] - (c[None, :] + 1)) / self.n)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        # 0/0 only at d = 0 in the node's own column
        ratio = np.where(den == 0.0, float(self.n), ratio)
        phase = np.exp(1j * np.pi * (d - t / self.n)) / np.sqrt(self.n)
        return ratio * phase[:, None]


def dense_cauchy(nodes):
    """The full ``m x n`` matrix ``C`` (test and small-problem helper)."""
    src = CauchySource.from_nodes(nodes)
    return src.block(slice(None), slice(None))
