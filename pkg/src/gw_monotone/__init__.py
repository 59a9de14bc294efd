"""Exact analysis of conditioned Galton-Watson trees.

Conditioned distributions and expected profiles in exact rational
arithmetic, leaf-insertion coupling feasibility decided by exact max
flow with Hall-violation witnesses, threshold location for the
counterexample offspring family, and Monte Carlo cross-validation via
the size-biased infinite tree.
"""

from .coupling import (
    FlowResult,
    GapResult,
    bound_scan,
    check_p1,
    check_pa,
    check_pb,
    hall_brute_force,
    threshold_bisect,
    threshold_scan,
)
from .model import (
    ConditionedDist,
    NotCriticalError,
    NotNormalizedError,
    OffspringModel,
    ZeroMassError,
    binomial,
    conditioned_dist,
    custom,
    epsilon,
    expected_profile,
    format_rational,
    geometric_half,
    limit_profile,
    parse_rational,
    poisson_one,
    size_biased,
    tilt,
    tree_weight,
)
from .sampling import (
    EXHAUSTED,
    OVERFLOW,
    RngSpec,
    SpineConfig,
    SpineEstimate,
    exact_table_sampler,
    sample_conditioned,
    sample_gw,
    sample_spine,
    sample_uniform_plane,
)
from .trees import (
    InvalidTreeError,
    PlaneTree,
    deletions,
    enumerate_trees,
    extensions,
    insertion_relation,
    profile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
