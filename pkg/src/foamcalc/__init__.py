"""Exact-arithmetic calculator for ring-decorated one-dimensional foams.

Builds decorated trivalent graphs and their planar slice diagrams, computes
their unit-group and rank invariants exactly, and rewrites planar diagrams
through registered elementary cobordism moves with certified traces.
"""

from .rings import RingSpec, Scalar, RingError, NotInvertible, RING_Q, RING_Z, ring_fp, ring_zmod
from .matrix import Matrix, block_direct_sum, block_swap
from .kgroups import (
    K0Class,
    K1Class,
    K1QuotClass,
    k1_eq,
    k1_identity,
    k1_inv,
    k1_mul,
    k1_of,
    k1_project_quotient,
    tau,
    tau_matrix,
)

__version__ = "0.1.0"
