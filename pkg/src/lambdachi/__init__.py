"""Exact Euler characteristics of cyclic p-group lattices and the
lambda-invariant identities of synthetic Z_p-towers built from them."""

from .cohomology import (
    CohomologyOrders,
    DualStabilizationError,
    cyclotomic_chi_closed_form,
    dual_euler_char,
    norm_matrix,
    tate_orders,
)
from .exact_linalg import IntMatrix, Rational, kernel_basis, saturate, snf, solve_in_basis
from .invariants import RankSequence, iterated_filtration_multiplicities, prime_filtration, rank_sequence, rep_multiplicities
from .kernels import BACKEND
from .modules import (
    BlockSpec,
    CyclicPGroup,
    FiniteBlock,
    FiniteSpec,
    FreePart,
    GModule,
    build_module,
    cyclotomic_block,
    direct_sum,
    fixed_submodule,
)
from .towers import IdentityReport, TowerInvariants, analyze_tower, verify_all

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockSpec",
    "CohomologyOrders",
    "CyclicPGroup",
    "DualStabilizationError",
    "FiniteBlock",
    "FiniteSpec",
    "FreePart",
    "GModule",
    "IdentityReport",
    "IntMatrix",
    "RankSequence",
    "Rational",
    "TowerInvariants",
    "analyze_tower",
    "build_module",
    "cyclotomic_block",
    "cyclotomic_chi_closed_form",
    "direct_sum",
    "dual_euler_char",
    "fixed_submodule",
    "iterated_filtration_multiplicities",
    "kernel_basis",
    "norm_matrix",
    "prime_filtration",
    "rank_sequence",
    "rep_multiplicities",
    "saturate",
    "snf",
    "solve_in_basis",
    "tate_orders",
    "verify_all",
]
