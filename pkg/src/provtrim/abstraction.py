"""Abstraction trees and forests: controlled grouping of polynomial variables.

An abstraction tree is a rooted labeled tree whose leaves are polynomial
variables and whose internal nodes are metavariables.  A choice of
abstraction is a *valid variable set* (VVS): an antichain cut separating
every tree's root from its leaves.  Applying a cut substitutes each leaf
by its chosen ancestor-or-self and re-normalizes, which shrinks the
polynomials by merging monomials that become identical.

Trees, forests and leaf indexes are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    CompatibilityError,
    EmptyTreeError,
    InvalidForestError,
    InvalidVvsError,
    ParseError,
    UnknownLabelError,
)
from .polynomial import PolySet, Valuation, VarsKey, _as_array, _as_object, _loads


@dataclass(frozen=True)
class TreeNode:
    label: str
    children: tuple[TreeNode, ...] = ()


class AbstractionTree:
    """A rooted labeled tree; labels are unique (enforced by forest validation)."""

    __slots__ = ("root", "_nodes", "_parents", "_postorder", "_desc_leaves")

    def __init__(self, root: TreeNode):
        self.root = root
        nodes: dict[str, TreeNode] = {}
        parents: dict[str, str] = {}
        postorder: list[str] = []
        desc_leaves: dict[str, tuple[str, ...]] = {}

        def visit(node: TreeNode) -> tuple[str, ...]:
            nodes.setdefault(node.label, node)
            if not node.children:
                leaves: tuple[str, ...] = (node.label,)
            else:
                collected: list[str] = []
                for child in node.children:
                    parents.setdefault(child.label, node.label)
                    collected.extend(visit(child))
                leaves = tuple(collected)
            desc_leaves[node.label] = leaves
            postorder.append(node.label)
            return leaves

        visit(root)
        self._nodes = nodes
        self._parents = parents
        self._postorder = tuple(postorder)
        self._desc_leaves = desc_leaves

    # -- construction helpers ------------------------------------------------

    @classmethod
    def build(cls, spec) -> AbstractionTree:
        """Build from nested ``(label, [child specs])`` tuples; a bare string is a leaf."""

        def make(node_spec) -> TreeNode:
            if isinstance(node_spec, str):
                return TreeNode(node_spec)
            label, children = node_spec
            return TreeNode(label, tuple(make(c) for c in children))

        return cls(make(spec))

    @classmethod
    def from_dict(cls, doc, location: str = "$") -> AbstractionTree:
        def make(node, loc: str) -> TreeNode:
            obj = _as_object(node, loc)
            label = obj.get("label")
            if not isinstance(label, str):
                raise ParseError("node label must be a string", loc)
            children = obj.get("children", [])
            kids = tuple(
                make(c, f"{loc}.children[{i}]") for i, c in enumerate(_as_array(children, f"{loc}.children"))
            )
            return TreeNode(label, kids)

        return cls(make(doc, location))

    def to_dict(self) -> dict:
        def render(node: TreeNode) -> dict:
            return {"label": node.label, "children": [render(c) for c in node.children]}

        return render(self.root)

    # -- structural queries ----------------------------------------------------

    @property
    def root_label(self) -> str:
        return self.root.label

    def labels(self) -> tuple[str, ...]:
        return self._postorder

    def postorder(self) -> tuple[str, ...]:
        return self._postorder

    def contains(self, label: str) -> bool:
        return label in self._nodes

    def is_leaf(self, label: str) -> bool:
        return not self._nodes[label].children

    def leaf_labels(self) -> tuple[str, ...]:
        return self._desc_leaves[self.root.label]

    def internal_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self._postorder if self._nodes[l].children)

    def children(self, label: str) -> tuple[str, ...]:
        return tuple(c.label for c in self._nodes[label].children)

    def parent(self, label: str) -> str | None:
        return self._parents.get(label)

    def descendant_leaves(self, label: str) -> tuple[str, ...]:
        return self._desc_leaves[label]

    def leaf_count(self, label: str) -> int:
        return len(self._desc_leaves[label])

    def is_ancestor_or_self(self, descendant: str, ancestor: str) -> bool:
        current: str | None = descendant
        while current is not None:
            if current == ancestor:
                return True
            current = self._parents.get(current)
        return False

    def node_count(self) -> int:
        return len(self._postorder)

    def __repr__(self) -> str:
        return f"AbstractionTree(root={self.root.label!r}, nodes={len(self._postorder)})"


class AbstractionForest:
    """A set of pairwise node-disjoint abstraction trees."""

    __slots__ = ("trees", "_tree_of")

    def __init__(self, trees: Iterable[AbstractionTree]):
        self.trees = tuple(trees)
        tree_of: dict[str, AbstractionTree] = {}
        for tree in self.trees:
            for label in tree.labels():
                tree_of.setdefault(label, tree)
        self._tree_of = tree_of

    @classmethod
    def from_dict(cls, doc) -> AbstractionForest:
        obj = _as_object(doc, "$")
        trees = _as_array(obj.get("trees"), "$.trees")
        return cls(AbstractionTree.from_dict(t, f"$.trees[{i}]") for i, t in enumerate(trees))

    def to_dict(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    def contains(self, label: str) -> bool:
        return label in self._tree_of

    def tree_of(self, label: str) -> AbstractionTree:
        try:
            return self._tree_of[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def labels(self) -> frozenset[str]:
        return frozenset(self._tree_of)

    def leaf_labels(self) -> tuple[str, ...]:
        return tuple(l for t in self.trees for l in t.leaf_labels())

    def all_leaves_vvs(self) -> frozenset[str]:
        return frozenset(self.leaf_labels())

    def all_roots_vvs(self) -> frozenset[str]:
        return frozenset(t.root_label for t in self.trees)

    def __repr__(self) -> str:
        return f"AbstractionForest({len(self.trees)} trees)"


def parse_forest(data: bytes | str) -> AbstractionForest:
    """Parse a forest document: ``{"trees": [{"label": ..., "children": [...]}, ...]}``."""
    return AbstractionForest.from_dict(_loads(data))


def serialize_forest(forest: AbstractionForest) -> bytes:
    return (json.dumps(forest.to_dict(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_vvs(data: bytes | str) -> frozenset[str]:
    """Parse a cut document: ``{"members": ["label", ...]}``."""
    obj = _as_object(_loads(data), "$")
    members = _as_array(obj.get("members"), "$.members")
    out = []
    for i, member in enumerate(members):
        if not isinstance(member, str):
            raise ParseError("members must be strings", f"$.members[{i}]")
        out.append(member)
    return frozenset(out)


def serialize_vvs(members: Iterable[str]) -> bytes:
    return (json.dumps({"members": sorted(members)}, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_forest(forest: AbstractionForest) -> list[str]:
    """Collect structural violations; an empty list means the forest is valid.

    Checks label uniqueness within each tree and node-disjointness across
    trees.  Multiple roots and cycles cannot be expressed by the nested
    node representation, so they are excluded by construction.
    """
    violations: list[str] = []
    seen: dict[str, str] = {}
    for tree in forest.trees:
        in_tree: set[str] = set()

        def visit(node: TreeNode) -> None:
            if node.label in in_tree:
                violations.append(f"duplicate label {node.label!r} in tree {tree.root.label!r}")
            elif node.label in seen:
                violations.append(
                    f"label {node.label!r} shared by trees {seen[node.label]!r} and {tree.root.label!r}"
                )
            in_tree.add(node.label)
            for child in node.children:
                visit(child)

        visit(tree.root)
        for label in in_tree:
            seen.setdefault(label, tree.root.label)
    return violations


def require_valid_forest(forest: AbstractionForest) -> None:
    violations = validate_forest(forest)
    if violations:
        raise InvalidForestError(violations)


@dataclass(frozen=True)
class CompatibilityViolation:
    poly_index: int
    monomial: VarsKey
    tree_root: str
    reason: str

    def __str__(self) -> str:
        factors = "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.monomial)
        return f"polynomial {self.poly_index}, monomial {factors}: {self.reason}"


def check_compatibility(polyset: PolySet, forest: AbstractionForest) -> list[CompatibilityViolation]:
    """Collect all monomials that clash with the forest.

    A monomial clashes with a tree when it contains two or more distinct
    nodes of the tree, or any internal (metavariable) node at all.
    """
    internal = {l for t in forest.trees for l in t.internal_labels()}
    violations: list[CompatibilityViolation] = []
    for pi, poly in enumerate(polyset.polys):
        for key in poly.terms:
            per_tree: dict[str, list[str]] = {}
            for name, _ in key:
                if forest.contains(name):
                    per_tree.setdefault(forest.tree_of(name).root_label, []).append(name)
            for root, names in per_tree.items():
                bad_internal = [n for n in names if n in internal]
                if bad_internal:
                    violations.append(
                        CompatibilityViolation(pi, key, root, f"contains metavariable {bad_internal[0]!r}")
                    )
                elif len(names) > 1:
                    violations.append(
                        CompatibilityViolation(pi, key, root, f"contains {len(names)} leaves of one tree")
                    )
    return violations


def require_compatible(polyset: PolySet, forest: AbstractionForest) -> None:
    violations = check_compatibility(polyset, forest)
    if violations:
        raise CompatibilityError(violations)


# ---------------------------------------------------------------------------
# Cleaning
# ---------------------------------------------------------------------------


def clean_tree(tree: AbstractionTree, polyset: PolySet) -> AbstractionTree:
    """Restrict a tree to the leaves that occur in the polynomials.

    Absent leaves are removed, internal nodes left childless disappear,
    and unary chains are spliced out (a node with a single surviving
    child is replaced by that child, the root included) because cutting
    at such a node is a pure rename.  Raises EmptyTreeError when no leaf
    survives.
    """
    occurring = polyset.vars()

    def rebuild(node: TreeNode) -> TreeNode | None:
        if not node.children:
            return node if node.label in occurring else None
        kept = [c for c in (rebuild(child) for child in node.children) if c is not None]
        if not kept:
            return None
        if len(kept) == 1:
            return kept[0]
        return TreeNode(node.label, tuple(kept))

    root = rebuild(tree.root)
    if root is None:
        raise EmptyTreeError(f"no leaf of tree {tree.root.label!r} occurs in the polynomials")
    return AbstractionTree(root)


def clean_forest(forest: AbstractionForest, polyset: PolySet) -> AbstractionForest:
    """Clean every tree, dropping trees with no occurring leaf at all."""
    cleaned = []
    for tree in forest.trees:
        try:
            cleaned.append(clean_tree(tree, polyset))
        except EmptyTreeError:
            continue
    if not cleaned:
        raise EmptyTreeError("no tree of the forest touches the polynomials")
    return AbstractionForest(cleaned)


# ---------------------------------------------------------------------------
# Valid variable sets
# ---------------------------------------------------------------------------


def is_vvs(forest: AbstractionForest, labels: Iterable[str]) -> bool:
    """True iff ``labels`` is a cut: every leaf has exactly one ancestor-or-self in it."""
    members = frozenset(labels)
    for label in members:
        if not forest.contains(label):
            raise UnknownLabelError(label)
    for tree in forest.trees:
        for leaf in tree.leaf_labels():
            covering = [m for m in members if tree.contains(m) and tree.is_ancestor_or_self(leaf, m)]
            if len(covering) != 1:
                return False
    # Antichain check: a member below another would double-cover its leaves,
    # which the loop above already rejects, except for members covering no
    # leaf at all -- impossible, every node has at least one descendant leaf.
    return True


def require_vvs(forest: AbstractionForest, labels: Iterable[str]) -> frozenset[str]:
    members = frozenset(labels)
    if not is_vvs(forest, members):
        raise InvalidVvsError(f"{sorted(members)} is not a valid cut of the forest")
    return members


def vvs_leaf_map(forest: AbstractionForest, vvs: Iterable[str]) -> dict[str, str]:
    """Map every forest leaf to the cut member that replaces it."""
    members = frozenset(vvs)
    mapping: dict[str, str] = {}
    for member in members:
        tree = forest.tree_of(member)
        for leaf in tree.descendant_leaves(member):
            mapping[leaf] = member
    return mapping


def enumerate_vvs(tree: AbstractionTree):
    """Yield every cut of one tree, each as a tuple of labels.

    A cut of a subtree either takes the subtree's root or combines cuts
    of all its children; enumeration order is deterministic.
    """

    def cuts(node: TreeNode):
        yield (node.label,)
        if node.children:
            partials = [()]
            for child in node.children:
                partials = [p + c for p in partials for c in cuts(child)]
            yield from partials

    yield from cuts(tree.root)


def count_vvs(tree: AbstractionTree) -> int:
    """Exact number of cuts: 1 for a leaf, 1 + product over children otherwise."""

    def count(node: TreeNode) -> int:
        if not node.children:
            return 1
        product = 1
        for child in node.children:
            product *= count(child)
        return 1 + product

    return count(tree.root)


# ---------------------------------------------------------------------------
# Substitution and losses
# ---------------------------------------------------------------------------


def abstract(polyset: PolySet, forest: AbstractionForest, vvs: Iterable[str]) -> PolySet:
    """Substitute every leaf by its cut member and re-normalize each polynomial."""
    members = require_vvs(forest, vvs)
    require_compatible(polyset, forest)
    mapping = vvs_leaf_map(forest, members)
    return PolySet(poly.substitute(mapping) for poly in polyset.polys)


def monomial_loss(polyset: PolySet, forest: AbstractionForest, vvs: Iterable[str]) -> int:
    """numM lost by abstracting: always computed by actual substitution."""
    return polyset.num_m - abstract(polyset, forest, vvs).num_m


def variable_loss(polyset: PolySet, forest: AbstractionForest, vvs: Iterable[str]) -> int:
    """numV lost by abstracting: always computed by actual substitution."""
    return polyset.num_v - abstract(polyset, forest, vvs).num_v


def lift_valuation(
    forest: AbstractionForest, vvs: Iterable[str], valuation: Valuation
) -> dict[str, float]:
    """Expand a valuation over cut members to one over the original leaves.

    Each leaf inherits the value assigned to its covering member;
    assignments to variables outside the forest pass through unchanged.
    The result evaluates the original polynomials to the same value the
    input gives their abstraction.
    """
    members = require_vvs(forest, vvs)
    mapping = vvs_leaf_map(forest, members)
    lifted = {name: value for name, value in valuation.items() if not forest.contains(name)}
    for leaf, member in mapping.items():
        if member in valuation:
            lifted[leaf] = valuation[member]
    return lifted


# ---------------------------------------------------------------------------
# Single-pass leaf index
# ---------------------------------------------------------------------------


class LeafIndex:
    """Per-polynomial map from tree leaf to the residues of monomials containing it.

    The residue of a monomial is the monomial with one occurrence of the
    leaf removed.  Residues are stored per polynomial because merging
    never crosses polynomial boundaries.
    """

    __slots__ = ("tree", "per_poly")

    def __init__(self, tree: AbstractionTree, per_poly: tuple[dict[str, frozenset[VarsKey]], ...]):
        self.tree = tree
        self.per_poly = per_poly

    def residues(self, poly_index: int, leaf: str) -> frozenset[VarsKey]:
        return self.per_poly[poly_index].get(leaf, frozenset())


def _split_on_tree_leaf(key: VarsKey, tree: AbstractionTree):
    """Return (leaf, exponent, rest) for the unique tree leaf in the monomial, if any."""
    for i, (name, exp) in enumerate(key):
        if tree.contains(name):
            return name, exp, key[:i] + key[i + 1 :]
    return None


def _residue_key(leaf: str, exp: int, rest: VarsKey) -> VarsKey:
    if exp > 1:
        return tuple(sorted(rest + ((leaf, exp - 1),)))
    return rest


def _merge_key(exp: int, rest: VarsKey):
    # Two monomials collapse under a common ancestor iff their non-leaf
    # parts and leaf exponents agree; the leaf's own name must not matter.
    return (exp, rest) if exp > 1 else rest


def build_leaf_index(polyset: PolySet, tree: AbstractionTree) -> LeafIndex:
    """One pass over all monomials, grouping residues by the leaf they contain.

    Requires compatibility: no monomial may contain two distinct nodes of
    the tree or any internal node.
    """
    per_poly = []
    for poly in polyset.polys:
        table: dict[str, set[VarsKey]] = {}
        for key in poly.terms:
            hit = _split_on_tree_leaf(key, tree)
            if hit is None:
                continue
            leaf, exp, rest = hit
            table.setdefault(leaf, set()).add(_residue_key(leaf, exp, rest))
        per_poly.append({leaf: frozenset(res) for leaf, res in table.items()})
    return LeafIndex(tree, tuple(per_poly))


def node_ml(index: LeafIndex, label: str) -> int:
    """Monomial loss of the cut that replaces exactly this node's leaves.

    Computed per polynomial as (number of monomials containing a
    descendant leaf) minus (number of distinct merged monomials they
    leave behind).
    """
    tree = index.tree
    leaves = tree.descendant_leaves(label)
    total = 0
    for table in index.per_poly:
        count = 0
        merged = set()
        for leaf in leaves:
            residues = table.get(leaf)
            if not residues:
                continue
            count += len(residues)
            for res in residues:
                exp = 1 + dict(res).get(leaf, 0)
                rest = tuple(p for p in res if p[0] != leaf)
                merged.add(_merge_key(exp, rest))
        total += count - len(merged)
    return total


def node_ml_table(polyset: PolySet, tree: AbstractionTree) -> dict[str, int]:
    """Monomial loss of every node's singleton cut, in one sweep.

    Equivalent to calling :func:`node_ml` for each node, but each
    monomial only walks its leaf-to-root ancestor chain once.
    """
    losses: dict[str, int] = {label: 0 for label in tree.postorder()}
    for poly in polyset.polys:
        seen: dict[str, set] = {}
        hits: dict[str, int] = {}
        for key in poly.terms:
            hit = _split_on_tree_leaf(key, tree)
            if hit is None:
                continue
            leaf, exp, rest = hit
            merge = _merge_key(exp, rest)
            node: str | None = leaf
            while node is not None:
                hits[node] = hits.get(node, 0) + 1
                seen.setdefault(node, set()).add(merge)
                node = tree.parent(node)
        for label, count in hits.items():
            losses[label] += count - len(seen[label])
    return losses
