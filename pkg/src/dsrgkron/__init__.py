"""Kronecker-recurrence families of directed strongly regular graphs."""

__version__ = "0.1.0"

from .dsrg import (
    DsrgParams,
    VerifyReport,
    precheck_family_feasibility,
    verify_algebraic,
    verify_combinatorial,
    verify_sampled,
)
from .family import (
    FamilySpec,
    FamilyTerm,
    build_A,
    build_B,
    build_C,
    build_P,
    build_P_recursive,
    check_block_system,
    check_structure,
    family_params,
    iter_family,
)
from .matcore import (
    BinaryMatrix,
    BlockLayout,
    IntMatrix,
    alpha,
    assemble,
    exchange,
    identity,
    kron,
    mul,
    ones,
    transpose_column_slice,
    zeros,
)
from .search import (
    PairSearchProblem,
    PairSolution,
    SearchBudget,
    assemble_seed,
    search_pair,
    search_seed,
)
