"""Superfast direct least-squares inversion of the type-II nonuniform DFT.

The samples ``b_j = sum_c x_c exp(-2 pi i c p_j)`` are inverted by turning the
Vandermonde system into a Cauchy-like one, compressing it into an HSS matrix
with factored ADI, and solving with a hierarchical URV factorization.
"""

from .geometry import NodeSet, make_node_set, rank_bound
from .grids import GridKind, generate_grid, prephase, test_signal
from .hss import HssMatrix, build_hss, hss_matvec, hss_to_dense
from .iterative import IterativeMethod, IterativeReport, iterative_solve, sinc2_weights
from .pipeline import DEFAULT_EPSILON, InudftFactorization, inudft_factor, inudft_one_shot, inudft_solve
from .serialize import load_factorization, save_factorization
from .transforms import nudft_adjoint_apply, nudft_type2_apply
from .urv import RankDeficiencyError, UrvBreakdownError, urv_factor, urv_solve

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EPSILON",
    "GridKind",
    "HssMatrix",
    "InudftFactorization",
    "IterativeMethod",
    "IterativeReport",
    "NodeSet",
    "RankDeficiencyError",
    "UrvBreakdownError",
    "build_hss",
    "generate_grid",
    "hss_matvec",
    "hss_to_dense",
    "inudft_factor",
    "inudft_one_shot",
    "inudft_solve",
    "iterative_solve",
    "load_factorization",
    "make_node_set",
    "nudft_adjoint_apply",
    "nudft_type2_apply",
    "prephase",
    "rank_bound",
    "save_factorization",
    "sinc2_weights",
    "test_signal",
    "urv_factor",
    "urv_solve",
]
