"""Estimator-style front end: learn a cut on fit, substitute on transform."""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .abstraction import (
    AbstractionForest,
    AbstractionTree,
    clean_forest,
    require_compatible,
    require_valid_forest,
    vvs_leaf_map,
)
from .optimizer import (
    DEFAULT_CUT_CAP,
    CompressionResult,
    brute_force_vvs,
    greedy_vvs,
    optimal_vvs_single_tree,
)
from .polynomial import PolySet

_ALGORITHMS = ("optimal", "greedy", "brute")


class VvsCompressor(BaseEstimator, TransformerMixin):
    """Compress polynomial multisets below a size bound via an abstraction forest.

    ``fit`` selects a valid variable set for the training polynomials;
    ``transform`` substitutes it into any compatible polynomial multiset.

    Parameters
    ----------
    forest : AbstractionForest or AbstractionTree
        The permissible variable groupings.
    bound : int
        Target maximum number of monomials after compression.
    algorithm : {"optimal", "greedy", "brute"}
        "optimal" is exact and requires a single-tree forest; "greedy"
        handles arbitrary forests heuristically; "brute" enumerates every
        cut up to ``cut_cap``.
    cut_cap : int
        Refusal threshold for brute-force enumeration.

    Attributes
    ----------
    result_ : CompressionResult
        Full outcome of the selection, including status and counters.
    vvs_ : frozenset[str]
        The selected cut.  When the bound is unreachable this is the
        coarsest cut (``result_.status`` tells the two apart).
    forest_ : AbstractionForest
        The forest cleaned against the training polynomials; ``vvs_`` is
        a cut of this forest.
    """

    def __init__(
        self,
        forest: AbstractionForest | AbstractionTree | None = None,
        bound: int | None = None,
        algorithm: str = "optimal",
        cut_cap: int = DEFAULT_CUT_CAP,
    ):
        self.forest = forest
        self.bound = bound
        self.algorithm = algorithm
        self.cut_cap = cut_cap

    def _as_forest(self) -> AbstractionForest:
        if isinstance(self.forest, AbstractionTree):
            return AbstractionForest([self.forest])
        if isinstance(self.forest, AbstractionForest):
            return self.forest
        raise ValueError("forest must be an AbstractionForest or AbstractionTree")

    def fit(self, X: PolySet, y=None) -> "VvsCompressor":
        """Select a cut for the polynomials in X."""
        if not isinstance(X, PolySet):
            raise TypeError("X must be a PolySet")
        if self.bound is None:
            raise ValueError("bound must be set before fitting")
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"algorithm must be one of {_ALGORITHMS}")
        forest = self._as_forest()
        require_valid_forest(forest)

        if self.algorithm == "optimal":
            if len(forest.trees) != 1:
                raise ValueError(
                    "the optimal algorithm supports exactly one abstraction tree; "
                    "use 'greedy' or 'brute' for multi-tree forests"
                )
            result = optimal_vvs_single_tree(X, forest.trees[0], self.bound)
        elif self.algorithm == "greedy":
            result = greedy_vvs(X, forest, self.bound)
        else:
            result = brute_force_vvs(X, forest, self.bound, cut_cap=self.cut_cap)

        self.result_: CompressionResult = result
        self.vvs_: frozenset[str] = result.vvs
        self.forest_: AbstractionForest = clean_forest(forest, X)
        return self

    def transform(self, X: PolySet) -> PolySet:
        """Apply the fitted cut to X, re-normalizing each polynomial."""
        if not hasattr(self, "vvs_"):
            raise NotFittedError("this VvsCompressor is not fitted yet; call fit first")
        if not isinstance(X, PolySet):
            raise TypeError("X must be a PolySet")
        require_compatible(X, self.forest_)
        mapping = vvs_leaf_map(self.forest_, self.vvs_)
        return PolySet(poly.substitute(mapping) for poly in X.polys)
