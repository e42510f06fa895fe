"""Additive-combinatorics toolkit: doubling-parameterized solvers built on
exact GAP covers, with reductions between subset sum and ILP feasibility."""

from gapsolve.core import (
    BitWidthError,
    DuplicateColumnError,
    EnumerationCapError,
    Gap,
    IntegerSet,
    InvariantError,
    Matrix,
    PipelineFailureError,
    SolveWitness,
    TableCapError,
    VectorSet,
    doubling_constant,
    gap_enumerate,
    gap_membership,
    iterated_sumset,
    sumset,
)
from gapsolve.freiman import (
    BohrSpec,
    FreimanGapResult,
    FreimanModel,
    bogolyubov,
    freiman_gap,
    gap_in_bohr,
    modeling_lemma,
    next_prime,
    ruzsa_cover,
    split_coords,
    split_dimensions,
)
from gapsolve.ilp import (
    BilpInstance,
    HbilpInstance,
    bilp_feasibility_dp,
    bilp_nonnegative,
    bilp_reachable_table,
    bilp_to_hbilp,
    bounded_ilp_feasibility,
    hbilp_feasibility,
    hbilp_nonnegative,
    hbilp_to_ss,
    small_support_candidates,
    ss_to_hbilp,
)
from gapsolve.ksum import KsumResult, foursum, ksum, sparse_sumset, splitter_family
from gapsolve.subset_sum import (
    SubsetSumInstance,
    solve_subset_sum,
    subset_sum_doubling,
    unbounded_subset_sum,
)

__version__ = "0.1.0"

__all__ = [
    "BilpInstance",
    "BitWidthError",
    "BohrSpec",
    "DuplicateColumnError",
    "EnumerationCapError",
    "FreimanGapResult",
    "FreimanModel",
    "Gap",
    "HbilpInstance",
    "IntegerSet",
    "InvariantError",
    "KsumResult",
    "Matrix",
    "PipelineFailureError",
    "SolveWitness",
    "SubsetSumInstance",
    "TableCapError",
    "VectorSet",
    "bilp_feasibility_dp",
    "bilp_nonnegative",
    "bilp_reachable_table",
    "bilp_to_hbilp",
    "bogolyubov",
    "bounded_ilp_feasibility",
    "doubling_constant",
    "foursum",
    "freiman_gap",
    "gap_enumerate",
    "gap_in_bohr",
    "gap_membership",
    "hbilp_feasibility",
    "hbilp_nonnegative",
    "hbilp_to_ss",
    "iterated_sumset",
    "ksum",
    "modeling_lemma",
    "next_prime",
    "ruzsa_cover",
    "small_support_candidates",
    "solve_subset_sum",
    "sparse_sumset",
    "split_coords",
    "split_dimensions",
    "splitter_family",
    "ss_to_hbilp",
    "subset_sum_doubling",
    "sumset",
    "unbounded_subset_sum",
]
