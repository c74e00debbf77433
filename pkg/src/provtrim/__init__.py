"""provtrim: size-bounded compression of provenance polynomials.

Provenance polynomials record how input values combine into query
results; valuating their variables replays the computation under
hypothetical scenarios.  This package shrinks such polynomials below a
size bound by grouping variables along user-defined abstraction trees,
trading monomial count against the number of distinct variables left
for hypothetical reasoning.
"""

from .abstraction import (
    AbstractionForest,
    AbstractionTree,
    LeafIndex,
    TreeNode,
    abstract,
    build_leaf_index,
    check_compatibility,
    clean_forest,
    clean_tree,
    count_vvs,
    enumerate_vvs,
    is_vvs,
    lift_valuation,
    monomial_loss,
    node_ml,
    node_ml_table,
    parse_forest,
    parse_vvs,
    serialize_forest,
    serialize_vvs,
    validate_forest,
    variable_loss,
    vvs_leaf_map,
)
from .errors import (
    BoundError,
    CompatibilityError,
    EmptyTreeError,
    InvalidCoefficientError,
    InvalidForestError,
    InvalidGraphError,
    InvalidPairError,
    InvalidVvsError,
    ParseError,
    ProvtrimError,
    TooManyCutsError,
    UnboundVariableError,
    UnknownLabelError,
)
from .optimizer import (
    CompressionResult,
    RunStats,
    brute_force_vvs,
    compute_array,
    decide_precise,
    greedy_vvs,
    loss_tables,
    optimal_vvs_single_tree,
)
from .polynomial import (
    Monomial,
    Polynomial,
    PolySet,
    Valuation,
    evaluate,
    normalize,
    num_m,
    num_v,
    parse_polyset,
    parse_valuation,
    serialize_polyset,
    serialize_valuation,
)

__version__ = "0.1.0"


def __getattr__(name: str):
    # The estimator pulls in scikit-learn; load it on first use so the
    # CLI does not pay the import for every invocation.
    if name == "VvsCompressor":
        from .compressor import VvsCompressor

        return VvsCompressor
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "AbstractionForest",
    "AbstractionTree",
    "BoundError",
    "CompatibilityError",
    "CompressionResult",
    "EmptyTreeError",
    "InvalidCoefficientError",
    "InvalidForestError",
    "InvalidGraphError",
    "InvalidPairError",
    "InvalidVvsError",
    "LeafIndex",
    "Monomial",
    "ParseError",
    "PolySet",
    "Polynomial",
    "ProvtrimError",
    "RunStats",
    "TooManyCutsError",
    "TreeNode",
    "UnboundVariableError",
    "UnknownLabelError",
    "Valuation",
    "VvsCompressor",
    "abstract",
    "brute_force_vvs",
    "build_leaf_index",
    "check_compatibility",
    "clean_forest",
    "clean_tree",
    "compute_array",
    "count_vvs",
    "decide_precise",
    "enumerate_vvs",
    "evaluate",
    "greedy_vvs",
    "is_vvs",
    "lift_valuation",
    "loss_tables",
    "monomial_loss",
    "node_ml",
    "node_ml_table",
    "normalize",
    "num_m",
    "num_v",
    "optimal_vvs_single_tree",
    "parse_forest",
    "parse_polyset",
    "parse_valuation",
    "parse_vvs",
    "serialize_forest",
    "serialize_polyset",
    "serialize_valuation",
    "serialize_vvs",
    "validate_forest",
    "variable_loss",
    "vvs_leaf_map",
]
