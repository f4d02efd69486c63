"""Exact verification of DFS arc-class identities on random digraphs.

The geometric-outdegree model assigns each vertex an independent Ge(1-p)
number of arcs with uniform targets; depth-first search classifies every
arc as loop, tree, back, forward, or cross.  This package computes the
joint generating functions of those counts by exact recursion, extracts
distributions and moments with zero rounding, and cross-validates the
whole pipeline with a brute-force enumerator and a Monte Carlo simulator.
"""

from .algebra import (
    LinearForm,
    NotDivisibleError,
    Poly,
    PoleAtPointError,
    RationalFunction,
    ShiftSubstitution,
    ratfun_sum,
)
from .enumeration import (
    BoundTooSmallError,
    InstanceCounter,
    compare_series,
    enumerate_forest_instances,
    enumerate_tree_instances,
)
from .forest import (
    DistributionTable,
    ForestTable,
    PgfResult,
    compose_forest,
    dist_coeffs,
    mean_arc_count,
    pgf_arc_count,
    total_probability,
    verify_joint_symmetry,
    verify_pgf_identity,
)
from .model import ArcTally, ModelParams
from .recursions import Family, FamilyTable, verify_extended, verify_knuth
from .simulator import (
    Digraph,
    DfsResult,
    InsufficientDataError,
    compare_empirical,
    dfs_classify,
    gen_digraph,
    run_trials,
)
from .univariate import UniRat

__version__ = "0.1.0"

__all__ = [
    "ArcTally",
    "BoundTooSmallError",
    "Digraph",
    "DfsResult",
    "DistributionTable",
    "Family",
    "FamilyTable",
    "ForestTable",
    "InstanceCounter",
    "InsufficientDataError",
    "LinearForm",
    "ModelParams",
    "NotDivisibleError",
    "PgfResult",
    "Poly",
    "PoleAtPointError",
    "RationalFunction",
    "ShiftSubstitution",
    "UniRat",
    "compare_empirical",
    "compare_series",
    "compose_forest",
    "dfs_classify",
    "dist_coeffs",
    "enumerate_forest_instances",
    "enumerate_tree_instances",
    "gen_digraph",
    "mean_arc_count",
    "pgf_arc_count",
    "ratfun_sum",
    "run_trials",
    "total_probability",
    "verify_extended",
    "verify_joint_symmetry",
    "verify_knuth",
    "verify_pgf_identity",
    "__version__",
]
