"""Cut selection: optimal single-tree DP, greedy multi-tree heuristic, brute force.

All three compressors answer the same question: given a polynomial
multiset, an abstraction forest and a size bound B, find a cut whose
abstraction has at most B monomials while keeping as many distinct
variables as possible.  Equivalently, with k = numM - B, minimize the
variable loss among cuts whose monomial loss is at least k.

The dynamic program keeps one sparse table per tree node mapping each
achievable monomial loss i < k to the minimal variable loss realizing it
exactly; the entry at k holds the minimal variable loss over cuts whose
monomial loss is at least k (sums overshooting k are clamped into that
entry).  Backpointers reconstruct a witness cut.

Merging is counted on variable multisets; optimality statements assume
all-positive coefficients, where substitution can never cancel a
monomial away.  Reported result metrics always come from an actual
coefficient-aware substitution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

from .abstraction import (
    AbstractionForest,
    AbstractionTree,
    clean_forest,
    clean_tree,
    count_vvs,
    enumerate_vvs,
    node_ml_table,
    require_compatible,
    require_valid_forest,
    vvs_leaf_map,
)
from .errors import BoundError, TooManyCutsError
from .polynomial import PolySet

DEFAULT_CUT_CAP = 10_000_000

STATUS_OPTIMAL = "optimal"
STATUS_HEURISTIC = "heuristic-adequate"
STATUS_INFEASIBLE = "infeasible"


@dataclass
class RunStats:
    """Operation counters; acceptance checks are counter- not wall-clock-based."""

    node_visits: int = 0
    table_entries: int = 0
    combine_ops: int = 0
    promotions: int = 0
    cuts_enumerated: int = 0
    elapsed_ms: float = 0.0
    promotion_order: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "node_visits": self.node_visits,
            "table_entries": self.table_entries,
            "combine_ops": self.combine_ops,
            "promotions": self.promotions,
            "cuts_enumerated": self.cuts_enumerated,
            "elapsed_ms": self.elapsed_ms,
            "promotion_order": list(self.promotion_order),
        }


@dataclass(frozen=True)
class CompressionResult:
    status: str
    vvs: frozenset[str]
    ml: int
    vl: int
    out_num_m: int
    out_num_v: int
    max_achievable_ml: int
    stats: RunStats

    @property
    def adequate(self) -> bool:
        return self.status != STATUS_INFEASIBLE

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "vvs": sorted(self.vvs),
            "ml": self.ml,
            "vl": self.vl,
            "out_num_m": self.out_num_m,
            "out_num_v": self.out_num_v,
            "max_achievable_ml": self.max_achievable_ml,
            "stats": self.stats.to_dict(),
        }


def _check_bound(polyset: PolySet, bound: int) -> int:
    if not isinstance(bound, int) or isinstance(bound, bool):
        raise BoundError(f"bound must be an integer, got {bound!r}")
    if not 1 <= bound <= polyset.num_m:
        raise BoundError(f"bound {bound} outside 1..{polyset.num_m}")
    return polyset.num_m - bound


def _cut_metrics(
    polyset: PolySet,
    forest: AbstractionForest,
    members,
    items: Sequence[list] | None = None,
) -> tuple[int, int]:
    """(numM, numV) after abstracting by the cut, with coefficient-aware merging."""
    mapping = vvs_leaf_map(forest, members)
    if items is None:
        items = [list(p.terms.items()) for p in polyset.polys]
    count = 0
    names: set[str] = set()
    for poly_items in items:
        acc: dict = {}
        for key, coef in poly_items:
            mapped = tuple(sorted((mapping.get(n, n), e) for n, e in key))
            acc[mapped] = acc.get(mapped, 0.0) + coef
        for mkey, coef in acc.items():
            if coef != 0.0:
                count += 1
                names.update(n for n, _ in mkey)
    return count, len(names)


# ---------------------------------------------------------------------------
# Optimal single-tree selection
# ---------------------------------------------------------------------------

# Sparse per-node table: monomial loss -> (variable loss, backpointer).
# Backpointers: ("leaf",) and ("self",) stand for the cut {node};
# ("children",) for the cut made of the node's (all-leaf) children;
# ("combo", ((child, key), ...)) recurses into child tables.
_Table = dict[int, tuple[int, tuple]]


def _combine_tables(children: Sequence[tuple[str, _Table]], k: int, stats: RunStats) -> _Table:
    label0, table0 = children[0]
    acc: _Table = {ml: (vl, ("combo", ((label0, ml),))) for ml, (vl, _) in table0.items()}
    for label, table in children[1:]:
        nxt: _Table = {}
        for ml1 in sorted(acc):
            vl1, bp1 = acc[ml1]
            pairs = bp1[1]
            for ml2 in sorted(table):
                vl2 = table[ml2][0]
                stats.combine_ops += 1
                ml = ml1 + ml2
                if ml > k:
                    ml = k
                vl = vl1 + vl2
                cur = nxt.get(ml)
                if cur is None or vl < cur[0]:
                    nxt[ml] = (vl, ("combo", pairs + ((label, ml2),)))
        acc = nxt
    return acc


def compute_array(child_tables: Sequence[Mapping[int, int]], k: int) -> dict[int, int]:
    """Combine children tables: entry j holds the minimal summed variable loss
    over decompositions of j across the children, with sums above k clamped
    into entry k."""
    if not child_tables:
        raise ValueError("compute_array needs at least one child table")
    stats = RunStats()
    wrapped = [
        (str(i), {ml: (vl, ("leaf",)) for ml, vl in table.items()})
        for i, table in enumerate(child_tables)
    ]
    combined = _combine_tables(wrapped, k, stats)
    return {ml: vl for ml, (vl, _) in sorted(combined.items())}


def _dp_tables(polyset: PolySet, tree: AbstractionTree, k: int, stats: RunStats) -> dict[str, _Table]:
    ml_of = node_ml_table(polyset, tree)
    tables: dict[str, _Table] = {}
    for label in tree.postorder():
        stats.node_visits += 1
        if tree.is_leaf(label):
            tables[label] = {0: (0, ("leaf",))}
            continue
        children = tree.children(label)
        if all(tree.is_leaf(c) for c in children):
            # Height 1: the only cuts are the children themselves or the node.
            table: _Table = {0: (0, ("children",))}
        else:
            table = _combine_tables([(c, tables[c]) for c in children], k, stats)
        ml_v = ml_of[label]
        vl_v = tree.leaf_count(label) - 1
        idx = ml_v if ml_v < k else k
        cur = table.get(idx)
        if cur is None or vl_v < cur[0]:
            table[idx] = (vl_v, ("self",))
        tables[label] = table
    stats.table_entries = sum(len(t) for t in tables.values())
    return tables


def _reconstruct(tree: AbstractionTree, tables: dict[str, _Table], label: str, key: int) -> set[str]:
    _, bp = tables[label][key]
    kind = bp[0]
    if kind in ("leaf", "self"):
        return {label}
    if kind == "children":
        return set(tree.children(label))
    members: set[str] = set()
    for child, child_key in bp[1]:
        members |= _reconstruct(tree, tables, child, child_key)
    return members


def _prepare_single_tree(polyset: PolySet, tree: AbstractionTree, bound: int):
    k = _check_bound(polyset, bound)
    original = AbstractionForest([tree])
    require_valid_forest(original)
    require_compatible(polyset, original)
    cleaned = clean_tree(tree, polyset)
    return k, cleaned


def optimal_vvs_single_tree(polyset: PolySet, tree: AbstractionTree, bound: int) -> CompressionResult:
    """Exact optimum for one abstraction tree.

    The tree is cleaned against the polynomials first (absent leaves and
    the renames they induce never change the reachable sizes).  Returns
    an infeasible result carrying the maximal achievable monomial loss
    when even the coarsest cut stays above the bound.
    """
    start = time.perf_counter()
    k, cleaned = _prepare_single_tree(polyset, tree, bound)
    stats = RunStats()
    tables = _dp_tables(polyset, cleaned, k, stats)
    forest = AbstractionForest([cleaned])
    root = cleaned.root_label
    items = [list(p.terms.items()) for p in polyset.polys]

    root_cut = frozenset({root})
    m_root, v_root = _cut_metrics(polyset, forest, root_cut, items)
    max_ml = polyset.num_m - m_root

    entry = tables[root].get(k)
    if entry is None:
        m_after, v_after = m_root, v_root
        stats.elapsed_ms = (time.perf_counter() - start) * 1000.0
        return CompressionResult(
            status=STATUS_INFEASIBLE,
            vvs=root_cut,
            ml=polyset.num_m - m_after,
            vl=polyset.num_v - v_after,
            out_num_m=m_after,
            out_num_v=v_after,
            max_achievable_ml=max_ml,
            stats=stats,
        )

    members = frozenset(_reconstruct(cleaned, tables, root, k))
    m_after, v_after = _cut_metrics(polyset, forest, members, items)
    stats.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return CompressionResult(
        status=STATUS_OPTIMAL,
        vvs=members,
        ml=polyset.num_m - m_after,
        vl=polyset.num_v - v_after,
        out_num_m=m_after,
        out_num_v=v_after,
        max_achievable_ml=max_ml,
        stats=stats,
    )


def loss_tables(polyset: PolySet, tree: AbstractionTree, bound: int) -> dict[str, dict[int, int]]:
    """Numeric view of the per-node tables, keyed by cleaned-tree labels."""
    k, cleaned = _prepare_single_tree(polyset, tree, bound)
    tables = _dp_tables(polyset, cleaned, k, RunStats())
    return {label: {ml: vl for ml, (vl, _) in sorted(t.items())} for label, t in tables.items()}


def loss_table_cuts(
    polyset: PolySet, tree: AbstractionTree, bound: int
) -> dict[str, dict[int, tuple[int, frozenset[str]]]]:
    """Per-node tables with the witness cut behind every entry.

    Each entry's cut lives inside that node's subtree; extending it with
    the leaves outside the subtree gives a full cut realizing the entry.
    """
    k, cleaned = _prepare_single_tree(polyset, tree, bound)
    tables = _dp_tables(polyset, cleaned, k, RunStats())
    return {
        label: {
            ml: (vl, frozenset(_reconstruct(cleaned, tables, label, ml)))
            for ml, (vl, _) in sorted(t.items())
        }
        for label, t in tables.items()
    }


# ---------------------------------------------------------------------------
# Greedy multi-tree selection
# ---------------------------------------------------------------------------


def greedy_vvs(polyset: PolySet, forest: AbstractionForest, bound: int) -> CompressionResult:
    """Leaf-to-root promotion heuristic for arbitrary forests.

    Starting from the all-leaves cut, repeatedly replaces the sibling set
    whose promotion costs the least variable loss, until the bound is met
    or no candidate remains.  Variable-loss ties break on the casefolded
    label, then the raw label, so runs are reproducible.
    """
    start = time.perf_counter()
    k = _check_bound(polyset, bound)
    require_valid_forest(forest)
    require_compatible(polyset, forest)
    cleaned = clean_forest(forest, polyset)

    tree_of = {label: tree for tree in cleaned.trees for label in tree.labels()}
    selection: set[str] = set(cleaned.leaf_labels())
    total_leaves = len(selection)
    candidates = {
        label
        for tree in cleaned.trees
        for label in tree.internal_labels()
        if set(tree.children(label)) <= selection
    }

    items = [list(p.terms.items()) for p in polyset.polys]
    mapping: dict[str, str] = {}

    def current_ml() -> int:
        count = 0
        for poly_items in items:
            acc: dict = {}
            for key, coef in poly_items:
                mapped = tuple(sorted((mapping.get(n, n), e) for n, e in key))
                acc[mapped] = acc.get(mapped, 0.0) + coef
            count += sum(1 for coef in acc.values() if coef != 0.0)
        return polyset.num_m - count

    def promotion_vl(label: str) -> int:
        # Variable loss of (selection \ children) + {label}: every member of a
        # cleaned-forest cut survives substitution, so it is leaves minus size.
        return total_leaves - (len(selection) - len(tree_of[label].children(label)) + 1)

    stats = RunStats()
    order: list[str] = []
    ml_s = 0
    while ml_s < k and candidates:
        chosen = min(candidates, key=lambda c: (promotion_vl(c), c.casefold(), c))
        candidates.remove(chosen)
        tree = tree_of[chosen]
        selection.difference_update(tree.children(chosen))
        selection.add(chosen)
        for leaf in tree.descendant_leaves(chosen):
            mapping[leaf] = chosen
        parent = tree.parent(chosen)
        if parent is not None and set(tree.children(parent)) <= selection:
            candidates.add(parent)
        order.append(chosen)
        stats.promotions += 1
        ml_s = current_ml()

    stats.promotion_order = tuple(order)
    members = frozenset(selection)
    m_after, v_after = _cut_metrics(polyset, cleaned, members, items)
    m_roots, _ = _cut_metrics(polyset, cleaned, cleaned.all_roots_vvs(), items)
    stats.elapsed_ms = (time.perf_counter() - start) * 1000.0
    status = STATUS_HEURISTIC if polyset.num_m - m_after >= k else STATUS_INFEASIBLE
    return CompressionResult(
        status=status,
        vvs=members,
        ml=polyset.num_m - m_after,
        vl=polyset.num_v - v_after,
        out_num_m=m_after,
        out_num_v=v_after,
        max_achievable_ml=polyset.num_m - m_roots,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# Brute force and the decision problem
# ---------------------------------------------------------------------------


def _forest_cut_count(forest: AbstractionForest) -> int:
    total = 1
    for tree in forest.trees:
        total *= count_vvs(tree)
    return total


def _enumerate_forest_cuts(forest: AbstractionForest):
    def rec(index: int, prefix: tuple[str, ...]):
        if index == len(forest.trees):
            yield frozenset(prefix)
            return
        for cut in enumerate_vvs(forest.trees[index]):
            yield from rec(index + 1, prefix + cut)

    yield from rec(0, ())


def brute_force_vvs(
    polyset: PolySet,
    forest: AbstractionForest,
    bound: int,
    cut_cap: int = DEFAULT_CUT_CAP,
) -> CompressionResult:
    """Loop over every cut of the forest and keep the best adequate one.

    Metrics for every cut come from actual substitution, so this is the
    independent oracle for the other two compressors.
    """
    start = time.perf_counter()
    k = _check_bound(polyset, bound)
    require_valid_forest(forest)
    require_compatible(polyset, forest)
    cleaned = clean_forest(forest, polyset)

    total = _forest_cut_count(cleaned)
    if total > cut_cap:
        raise TooManyCutsError(total, cut_cap)

    items = [list(p.terms.items()) for p in polyset.polys]
    stats = RunStats()
    best: tuple[int, frozenset[str], int] | None = None  # (num_v_after, cut, num_m_after)
    coarsest: tuple[int, frozenset[str], int] | None = None
    for cut in _enumerate_forest_cuts(cleaned):
        stats.cuts_enumerated += 1
        m_after, v_after = _cut_metrics(polyset, cleaned, cut, items)
        if coarsest is None or m_after < coarsest[2]:
            coarsest = (v_after, cut, m_after)
        if m_after <= bound and (best is None or v_after > best[0]):
            best = (v_after, cut, m_after)

    assert coarsest is not None
    max_ml = polyset.num_m - coarsest[2]
    stats.elapsed_ms = (time.perf_counter() - start) * 1000.0
    if best is None:
        v_after, cut, m_after = coarsest
        status = STATUS_INFEASIBLE
    else:
        v_after, cut, m_after = best
        status = STATUS_OPTIMAL
    return CompressionResult(
        status=status,
        vvs=cut,
        ml=polyset.num_m - m_after,
        vl=polyset.num_v - v_after,
        out_num_m=m_after,
        out_num_v=v_after,
        max_achievable_ml=max_ml,
        stats=stats,
    )


def decide_precise(
    polyset: PolySet,
    forest: AbstractionForest,
    bound: int,
    granularity: int,
    cut_cap: int = DEFAULT_CUT_CAP,
) -> bool:
    """True iff some cut hits numM == bound and numV == granularity exactly.

    Exponential by design: answers come only from exhaustive enumeration,
    never from a heuristic.
    """
    _check_bound(polyset, bound)
    if not isinstance(granularity, int) or isinstance(granularity, bool):
        raise BoundError(f"granularity must be an integer, got {granularity!r}")
    if not 1 <= granularity <= polyset.num_v:
        raise BoundError(f"granularity {granularity} outside 1..{polyset.num_v}")
    require_valid_forest(forest)
    require_compatible(polyset, forest)
    cleaned = clean_forest(forest, polyset)

    total = _forest_cut_count(cleaned)
    if total > cut_cap:
        raise TooManyCutsError(total, cut_cap)

    items = [list(p.terms.items()) for p in polyset.polys]
    for cut in _enumerate_forest_cuts(cleaned):
        m_after, v_after = _cut_metrics(polyset, cleaned, cut, items)
        if m_after == bound and v_after == granularity:
            return True
    return False
