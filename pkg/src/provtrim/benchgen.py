"""Deterministic benchmark instance generators.

Every generator is a pure function of its spec: randomness comes from a
Philox counter-based generator keyed by the spec's seed, values are drawn
as whole arrays in a documented order, so repeated calls are
byte-identical across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abstraction import AbstractionForest, AbstractionTree, TreeNode, count_vvs
from .errors import InvalidGraphError, InvalidPairError
from .polynomial import PolySet, normalize

# Re-export under the generator-facing name.
count_cuts = count_vvs

# Fixed price-per-minute table: a permutation of 128 evenly spaced values
# in [0.05, 0.50] (53 is coprime to 128, so i*53 mod 128 cycles them all).
PLAN_PRICES: tuple[float, ...] = tuple(
    round(0.05 + 0.45 * ((i * 53) % 128) / 127, 4) for i in range(128)
)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _chunked_tree(root_label: str, group_prefix: str, leaves: list[str], chunk: int = 16) -> AbstractionTree:
    """Two-level tree grouping consecutive leaves; flat when they fit one chunk."""
    leaf_nodes = [TreeNode(name) for name in leaves]
    if len(leaf_nodes) <= chunk:
        return AbstractionTree(TreeNode(root_label, tuple(leaf_nodes)))
    groups = [
        TreeNode(f"{group_prefix}{gi}", tuple(leaf_nodes[start : start + chunk]))
        for gi, start in enumerate(range(0, len(leaf_nodes), chunk))
    ]
    return AbstractionTree(TreeNode(root_label, tuple(groups)))


# ---------------------------------------------------------------------------
# Telephony revenue-per-zip scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TelephonySpec:
    num_customers: int
    num_plans: int = 128
    num_months: int = 12
    seed: int = 0


def months_tree(num_months: int) -> AbstractionTree:
    """Quarter groupings over m1..m12-style month variables."""
    quarters = []
    for q in range(4):
        months = [m for m in range(3 * q + 1, 3 * q + 4) if m <= num_months]
        if months:
            quarters.append(TreeNode(f"q{q + 1}", tuple(TreeNode(f"m{m}") for m in months)))
    return AbstractionTree(TreeNode("year", tuple(quarters)))


def plans_tree(num_plans: int) -> AbstractionTree:
    return _chunked_tree("plans", "pg", [f"p{i}" for i in range(num_plans)])


def gen_telephony(spec: TelephonySpec) -> tuple[PolySet, AbstractionForest]:
    """Per-zip revenue polynomials parameterized by plan and month variables.

    Each customer draws a plan and a 5-digit zip code, then a call
    duration for every month; the monomial for (customer, month) is
    duration times the plan's price, tagged with the plan and month
    variables.  Polynomials are grouped by zip code, ascending.

    Draw order: plans[num_customers], zips[num_customers], then
    durations[num_customers x num_months], row-major.
    """
    if spec.num_customers < 1:
        raise ValueError("num_customers must be at least 1")
    if spec.num_plans < 1:
        raise ValueError("num_plans must be at least 1")
    if not 1 <= spec.num_months <= 12:
        raise ValueError("num_months must be in 1..12")

    rng = _rng(spec.seed)
    plans = rng.integers(0, spec.num_plans, size=spec.num_customers)
    zips = rng.integers(10000, 100000, size=spec.num_customers)
    durations = rng.integers(50, 1201, size=(spec.num_customers, spec.num_months))

    by_zip: dict[int, list] = {}
    for c in range(spec.num_customers):
        plan = int(plans[c])
        price = PLAN_PRICES[plan % 128]
        pvar = f"p{plan}"
        terms = by_zip.setdefault(int(zips[c]), [])
        for month in range(spec.num_months):
            coef = float(durations[c, month]) * price
            terms.append((coef, {pvar: 1, f"m{month + 1}": 1}))

    polys = [normalize(by_zip[z]) for z in sorted(by_zip)]
    forest = AbstractionForest([plans_tree(spec.num_plans), months_tree(spec.num_months)])
    return PolySet(polys), forest


# ---------------------------------------------------------------------------
# TPC-H-style line items with modular parameterization
# ---------------------------------------------------------------------------


def gen_tpch_like(
    num_keys: int, modulus: int = 128, seed: int = 0
) -> tuple[PolySet, AbstractionTree, AbstractionTree]:
    """Synthetic line items carrying one supplier and one part variable each.

    A line item with supplier key s and part key p contributes a monomial
    over s_(s mod modulus) and p_(p mod modulus); items are grouped into
    polynomials by a synthetic group-by key (about 64 items per group).

    Draw order: groups[num_keys], suppkeys[num_keys], partkeys[num_keys],
    amounts[num_keys].
    """
    if num_keys < 1:
        raise ValueError("num_keys must be at least 1")
    if modulus < 1:
        raise ValueError("modulus must be at least 1")

    rng = _rng(seed)
    num_groups = max(1, num_keys // 64)
    groups = rng.integers(0, num_groups, size=num_keys)
    suppkeys = rng.integers(0, 1_000_000, size=num_keys)
    partkeys = rng.integers(0, 1_000_000, size=num_keys)
    amounts = rng.integers(100, 100_001, size=num_keys)

    by_group: dict[int, list] = {}
    for i in range(num_keys):
        svar = f"s{int(suppkeys[i]) % modulus}"
        pvar = f"p{int(partkeys[i]) % modulus}"
        coef = float(amounts[i]) / 100.0
        by_group.setdefault(int(groups[i]), []).append((coef, {svar: 1, pvar: 1}))

    polys = [normalize(by_group[g]) for g in sorted(by_group)]
    suppliers = _chunked_tree("suppliers", "sg", [f"s{i}" for i in range(modulus)])
    parts = _chunked_tree("parts", "pg", [f"p{i}" for i in range(modulus)])
    return PolySet(polys), suppliers, parts


# ---------------------------------------------------------------------------
# The seven uniform tree families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeSpec:
    """One of the seven uniform tree shapes: a fan-out per level, root first."""

    type: int
    fanouts: tuple[int, ...]
    leaf_labels: tuple[str, ...] | None = None
    prefix: str = "n"


# Shape constraints: type 1 is a 2-level tree; types 2-4 are 3-level trees
# with root fan-out 2/4/8; types 5-7 are 4-level trees whose first two
# fan-outs are (2,2)/(2,4)/(4,2).
_TYPE_DEPTH = {1: 2, 2: 3, 3: 3, 4: 3, 5: 4, 6: 4, 7: 4}
_TYPE_PREFIX = {2: (2,), 3: (4,), 4: (8,), 5: (2, 2), 6: (2, 4), 7: (4, 2)}

# The 128-leaf tree catalogue, smallest to largest cut count within each
# type.  Two catalogue rows as published carry fan-out columns that
# contradict their own node and cut counts; the fan-outs here are the
# ones consistent with both.
TREE_CATALOG: tuple[TreeSpec, ...] = tuple(
    TreeSpec(type=t, fanouts=f)
    for t, f in [
        (1, (2, 64)), (1, (4, 32)), (1, (8, 16)), (1, (16, 8)), (1, (32, 4)), (1, (64, 2)),
        (2, (2, 2, 32)), (2, (2, 4, 16)), (2, (2, 8, 8)), (2, (2, 16, 4)), (2, (2, 32, 2)),
        (3, (4, 2, 16)), (3, (4, 4, 8)), (3, (4, 8, 4)), (3, (4, 16, 2)),
        (4, (8, 2, 8)), (4, (8, 4, 4)), (4, (8, 8, 2)),
        (5, (2, 2, 2, 16)), (5, (2, 2, 4, 8)), (5, (2, 2, 8, 4)), (5, (2, 2, 16, 2)),
        (6, (2, 4, 2, 8)), (6, (2, 4, 4, 4)), (6, (2, 4, 8, 2)),
        (7, (4, 2, 2, 8)), (7, (4, 2, 4, 4)), (7, (4, 2, 8, 2)),
    ]
)


def gen_tree(spec: TreeSpec) -> AbstractionTree:
    """Build the uniform tree of the given type over the given leaves."""
    if spec.type not in _TYPE_DEPTH:
        raise ValueError(f"unknown tree type {spec.type}")
    if len(spec.fanouts) != _TYPE_DEPTH[spec.type]:
        raise ValueError(
            f"type {spec.type} trees have {_TYPE_DEPTH[spec.type]} levels, "
            f"got fan-outs {spec.fanouts}"
        )
    prefix_constraint = _TYPE_PREFIX.get(spec.type, ())
    if tuple(spec.fanouts[: len(prefix_constraint)]) != prefix_constraint:
        raise ValueError(f"type {spec.type} trees start with fan-outs {prefix_constraint}")
    if any(f < 1 for f in spec.fanouts):
        raise ValueError("fan-outs must be positive")

    num_leaves = 1
    for f in spec.fanouts:
        num_leaves *= f
    if spec.leaf_labels is None:
        leaves = [f"v{i}" for i in range(num_leaves)]
    else:
        leaves = list(spec.leaf_labels)
        if len(leaves) != num_leaves:
            raise ValueError(f"expected {num_leaves} leaf labels, got {len(leaves)}")
        if len(set(leaves)) != len(leaves):
            raise ValueError("leaf labels must be unique")

    depth = len(spec.fanouts)
    spans = [1] * (depth + 1)
    for level in range(depth - 1, -1, -1):
        spans[level] = spans[level + 1] * spec.fanouts[level]
    counters = [0] * depth

    def build(level: int, offset: int) -> TreeNode:
        if level == depth:
            return TreeNode(leaves[offset])
        children = tuple(
            build(level + 1, offset + i * spans[level + 1]) for i in range(spec.fanouts[level])
        )
        if level == 0:
            label = spec.prefix
        else:
            label = f"{spec.prefix}{level}_{counters[level]}"
            counters[level] += 1
        return TreeNode(label, children)

    tree = AbstractionTree(build(0, 0))
    leaf_set = set(leaves)
    for label in tree.internal_labels():
        if label in leaf_set:
            raise ValueError(f"internal label {label!r} collides with a leaf label")
    return tree


# ---------------------------------------------------------------------------
# Uniformly partitioned polynomials and the vertex-cover reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UppSpec:
    """All-pairs products between indexed families of blown-up variables."""

    metavars: tuple[str, ...]
    blowup: int
    pairs: tuple[tuple[int, int], ...]


def gen_upp(spec: UppSpec) -> tuple[PolySet, AbstractionForest]:
    """One polynomial summing x^(a)_i * x^(b)_j over each pair and all i, j.

    The companion forest is flat: one depth-1 tree per metavariable over
    its blowup copies.
    """
    if len(set(spec.metavars)) != len(spec.metavars):
        raise ValueError("metavariable labels must be distinct")
    if spec.blowup < 1:
        raise ValueError("blowup must be at least 1")
    seen: set[tuple[int, int]] = set()
    for a, b in spec.pairs:
        if not (1 <= a < b <= len(spec.metavars)):
            raise InvalidPairError(f"pair ({a}, {b}) must satisfy 1 <= a < b <= {len(spec.metavars)}")
        if (a, b) in seen:
            raise InvalidPairError(f"duplicate pair ({a}, {b})")
        seen.add((a, b))

    n = spec.blowup
    terms = []
    for a, b in spec.pairs:
        fam_a, fam_b = spec.metavars[a - 1], spec.metavars[b - 1]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                terms.append((1.0, {f"{fam_a}_{i}": 1, f"{fam_b}_{j}": 1}))
    poly = normalize(terms)
    forest = AbstractionForest(
        AbstractionTree(TreeNode(mv, tuple(TreeNode(f"{mv}_{i}") for i in range(1, n + 1))))
        for mv in spec.metavars
    )
    return PolySet([poly]), forest


@dataclass(frozen=True)
class GraphInstance:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    cover_size: int


@dataclass(frozen=True)
class VcReduction:
    upp: UppSpec
    granularity: int
    size_range: tuple[int, int]


def vc_reduce(graph: GraphInstance, max_vertices: int = 6) -> VcReduction:
    """Encode a vertex-cover question as a precise-abstraction question.

    The graph becomes a uniformly partitioned polynomial with blowup
    |V|^3: G has a cover of the requested size k iff the flat forest
    admits a cut of granularity exactly (|V|-k)*|V|^3 + k whose size
    lands in 2..|V|^5.

    Every vertex must touch an edge: a vertex with no incident edge
    contributes variables that never occur in the polynomial, and the
    size/granularity correspondence breaks down for it.
    """
    n = graph.num_vertices
    if n < 2:
        raise InvalidGraphError("need at least two vertices")
    if n > max_vertices:
        raise InvalidGraphError(
            f"{n} vertices would blow up to {len(graph.edges)} * {n}**6 monomials; "
            f"raise max_vertices to override"
        )
    if not graph.edges:
        raise InvalidGraphError("edge set must be non-empty")
    normalized: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    touched: set[int] = set()
    for a, b in graph.edges:
        if a == b:
            raise InvalidGraphError(f"self loop at vertex {a}")
        if not (1 <= a <= n and 1 <= b <= n):
            raise InvalidGraphError(f"edge ({a}, {b}) outside 1..{n}")
        edge = (min(a, b), max(a, b))
        if edge in seen:
            raise InvalidGraphError(f"duplicate edge {edge}")
        seen.add(edge)
        normalized.append(edge)
        touched.update(edge)
    if touched != set(range(1, n + 1)):
        isolated = sorted(set(range(1, n + 1)) - touched)
        raise InvalidGraphError(f"vertices {isolated} have no incident edge")
    if not 2 <= graph.cover_size <= n - 1:
        raise InvalidGraphError(f"cover size {graph.cover_size} outside 2..{n - 1}")

    upp = UppSpec(
        metavars=tuple(f"x{i}" for i in range(1, n + 1)),
        blowup=n**3,
        pairs=tuple(sorted(normalized)),
    )
    granularity = (n - graph.cover_size) * n**3 + graph.cover_size
    return VcReduction(upp=upp, granularity=granularity, size_range=(2, n**5))
