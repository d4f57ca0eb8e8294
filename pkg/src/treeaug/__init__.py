"""Exact-arithmetic solvers and LP-rounding pipeline for tree augmentation.

Given a tree and a set of candidate links with rational costs, the package
computes cheap link sets making the tree 2-edge-connected: exact solvers for
desk-scale instances, the classical factor-2 rounding, an edge-cover based
4/3 rounding for star-shaped instances, and a bundle-LP pipeline with
certified per-part guarantees.  All arithmetic is exact.
"""

from .errors import (
    InfeasibleInstanceError,
    InputError,
    InternalInvariantError,
    ParseError,
    SizeLimitError,
    StateError,
    TreeAugError,
)
from .graph import (
    CompoundInfo,
    Instance,
    Link,
    Tree,
    contract,
    cov,
    is_feasible,
    is_feasible_bridges,
    nca,
    remap_solution,
    shadow_complete,
    tree_path,
)
from .lp import (
    Bundle,
    Constraint,
    LinearProgram,
    LpSolution,
    build_bundle_lp,
    build_cut_lp,
    dump_lp,
    enumerate_bundles,
    solve_lp,
)
from .exact import (
    ExactSolution,
    brute_force_opt,
    bundle_opt,
    few_leaf_opt,
    interval_cover_dp,
    make_bundle_oracle,
)
from .rounding import (
    EdgeCoverGraph,
    classify_uplinks,
    min_cost_edge_cover,
    round_star_shaped,
    round_uplinks,
    star_cover,
    star_to_edge_cover,
    two_approx_round,
)
from .decompose import (
    DecompositionResult,
    Pair,
    contract_heavy,
    decompose,
    find_beta_center,
    find_thin_edge,
    split_solution,
)
from .pipeline import (
    Config,
    RunReport,
    Solution,
    classify_links,
    round_nearly_decomposable,
    round_nearly_star,
    round_tap_pair,
    solve_tap,
    solve_wtap,
)
from .instance_io import parse_instance, write_instance
from .generate import GenParams, XorShift64Star, generate_instance
from .bench import BenchmarkSuite, run_benchmark, summarize, verify_solution

__version__ = "0.1.0"
