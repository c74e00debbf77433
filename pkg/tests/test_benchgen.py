"""Instance generators: determinism, structure, catalogue counts, reductions."""

from __future__ import annotations

import random
from itertools import combinations
from pathlib import Path

import pytest

from provtrim import (
    AbstractionForest,
    InvalidGraphError,
    InvalidPairError,
    PolySet,
    abstract,
    clean_forest,
    count_vvs,
    decide_precise,
    serialize_polyset,
    validate_forest,
)
from provtrim.benchgen import (
    PLAN_PRICES,
    TREE_CATALOG,
    GraphInstance,
    TelephonySpec,
    TreeSpec,
    UppSpec,
    count_cuts,
    gen_telephony,
    gen_tpch_like,
    gen_tree,
    gen_upp,
    vc_reduce,
)

import oracle

DATA = Path(__file__).parent / "data"


class TestTelephony:
    def test_monomial_shape(self):
        polyset, forest = gen_telephony(TelephonySpec(num_customers=50, seed=3))
        plan_vars = set(forest.trees[0].leaf_labels())
        month_vars = set(forest.trees[1].leaf_labels())
        for poly in polyset.polys:
            for monomial in poly.monomials():
                assert monomial.coef > 0
                names = {n for n, _ in monomial.vars}
                assert len(names & plan_vars) == 1
                assert len(names & month_vars) == 1

    def test_forest_is_valid_and_compatible(self):
        polyset, forest = gen_telephony(TelephonySpec(num_customers=30, seed=1))
        assert validate_forest(forest) == []
        from provtrim import check_compatibility

        assert check_compatibility(polyset, forest) == []

    def test_single_customer_single_month(self):
        polyset, _ = gen_telephony(TelephonySpec(num_customers=1, num_months=1, seed=0))
        assert len(polyset) == 1
        assert polyset.num_m == 1

    def test_golden_file(self):
        polyset, _ = gen_telephony(TelephonySpec(num_customers=100, seed=42))
        assert serialize_polyset(polyset) == (DATA / "telephony_seed42_c100.json").read_bytes()

    def test_different_seeds_differ(self):
        a, _ = gen_telephony(TelephonySpec(num_customers=40, seed=1))
        b, _ = gen_telephony(TelephonySpec(num_customers=40, seed=2))
        assert serialize_polyset(a) != serialize_polyset(b)

    def test_price_table(self):
        assert len(PLAN_PRICES) == 128
        assert len(set(PLAN_PRICES)) == 128
        assert all(0.05 <= p <= 0.50 for p in PLAN_PRICES)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            gen_telephony(TelephonySpec(num_customers=0))
        with pytest.raises(ValueError):
            gen_telephony(TelephonySpec(num_customers=1, num_months=13))


class TestTpchLike:
    def test_variable_families_respect_modulus(self):
        polyset, suppliers, parts = gen_tpch_like(400, modulus=128, seed=9)
        svars = {n for n in polyset.vars() if n.startswith("s")}
        pvars = {n for n in polyset.vars() if n.startswith("p")}
        assert svars <= {f"s{i}" for i in range(128)}
        assert pvars <= {f"p{i}" for i in range(128)}
        assert len(svars) <= 128 and len(pvars) <= 128

    def test_small_modulus_pigeonholes(self):
        polyset, suppliers, _ = gen_tpch_like(300, modulus=7, seed=0)
        assert {n for n in polyset.vars() if n.startswith("s")} <= {f"s{i}" for i in range(7)}
        assert set(suppliers.leaf_labels()) == {f"s{i}" for i in range(7)}

    def test_monomials_pair_one_supplier_one_part(self):
        polyset, suppliers, parts = gen_tpch_like(200, seed=4)
        forest = AbstractionForest([suppliers, parts])
        from provtrim import check_compatibility

        assert check_compatibility(polyset, forest) == []

    def test_deterministic(self):
        a, _, _ = gen_tpch_like(150, seed=11)
        b, _, _ = gen_tpch_like(150, seed=11)
        assert serialize_polyset(a) == serialize_polyset(b)


class TestTreeCatalog:
    # (type, fanouts) -> published cut count, for the rows small enough
    # to check against exhaustive enumeration elsewhere.
    PINNED = {
        (1, (2, 64)): 5,
        (1, (4, 32)): 17,
        (1, (8, 16)): 257,
        (1, (16, 8)): 65537,
        (2, (2, 2, 32)): 26,
        (2, (2, 4, 16)): 290,
        (2, (2, 8, 8)): 66050,
        (3, (4, 2, 16)): 626,
        (3, (4, 4, 8)): 83522,
        (4, (8, 2, 8)): 390626,
        (5, (2, 2, 2, 16)): 677,
        (5, (2, 2, 4, 8)): 84101,
        (6, (2, 4, 2, 8)): 391877,
        (7, (4, 2, 2, 8)): 456977,
    }

    def test_pinned_cut_counts(self):
        for (tree_type, fanouts), want in self.PINNED.items():
            tree = gen_tree(TreeSpec(type=tree_type, fanouts=fanouts))
            assert count_cuts(tree) == want, (tree_type, fanouts)

    def test_catalog_covers_all_seven_types(self):
        assert {spec.type for spec in TREE_CATALOG} == set(range(1, 8))
        for spec in TREE_CATALOG:
            product = 1
            for f in spec.fanouts:
                product *= f
            assert product == 128

    def test_count_matches_exhaustive_enumeration(self):
        for spec in TREE_CATALOG:
            tree = gen_tree(spec)
            if count_cuts(tree) > 100_000:
                continue
            assert count_cuts(tree) == len(oracle.all_cuts(tree))

    def test_count_matches_enumeration_on_random_trees(self):
        from instances import random_tree

        rng = random.Random(7)
        for i in range(15):
            tree = random_tree(rng, prefix=f"r{i}")
            assert count_cuts(tree) == len(oracle.all_cuts(tree))

    def test_custom_leaf_labels(self):
        labels = tuple(f"s{i}" for i in range(128))
        tree = gen_tree(TreeSpec(type=1, fanouts=(8, 16), leaf_labels=labels, prefix="g"))
        assert tree.leaf_labels() == labels
        assert tree.node_count() == 137

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            gen_tree(TreeSpec(type=1, fanouts=(2, 2, 2)))
        with pytest.raises(ValueError):
            gen_tree(TreeSpec(type=2, fanouts=(4, 2, 16)))
        with pytest.raises(ValueError):
            gen_tree(TreeSpec(type=8, fanouts=(2, 2)))
        with pytest.raises(ValueError):
            gen_tree(TreeSpec(type=1, fanouts=(2, 2), leaf_labels=("a", "b", "c")))


class TestUpp:
    CANONICAL = UppSpec(
        metavars=("x1", "x2", "x3", "x4"),
        blowup=3,
        pairs=((1, 2), (1, 3), (2, 3), (2, 4)),
    )

    def test_size_identities(self):
        polyset, _ = gen_upp(self.CANONICAL)
        assert polyset.num_m == 4 * 3 * 3 == 36
        assert polyset.num_v == 4 * 3 == 12
        assert all(m.coef == 1.0 for m in polyset.polys[0].monomials())

    def test_partial_grouping(self):
        polyset, forest = gen_upp(self.CANONICAL)
        cut = {"x1", "x3"} | {f"x2_{i}" for i in (1, 2, 3)} | {f"x4_{i}" for i in (1, 2, 3)}
        out = abstract(polyset, forest, cut)
        assert out.num_m == 16
        assert out.num_v == 8
        merged = {m.vars: m.coef for m in out.polys[0].monomials()}
        assert merged[(("x1", 1), ("x3", 1))] == 9.0

    def test_minimal_instance(self):
        polyset, _ = gen_upp(UppSpec(metavars=("a", "b"), blowup=1, pairs=((1, 2),)))
        assert polyset.num_m == 1
        assert polyset.polys[0].monomials()[0].vars == (("a_1", 1), ("b_1", 1))

    def test_invalid_pairs(self):
        with pytest.raises(InvalidPairError):
            gen_upp(UppSpec(metavars=("a", "b"), blowup=2, pairs=((2, 1),)))
        with pytest.raises(InvalidPairError):
            gen_upp(UppSpec(metavars=("a", "b"), blowup=2, pairs=((1, 1),)))
        with pytest.raises(InvalidPairError):
            gen_upp(UppSpec(metavars=("a", "b"), blowup=2, pairs=((1, 2), (1, 2))))

    @pytest.mark.parametrize("seed", range(8))
    def test_identities_and_piecewise_sizes_on_random_specs(self, seed):
        rng = random.Random(40 + seed)
        num_meta = rng.randint(2, 6)
        blowup = rng.randint(1, 5)
        metavars = tuple(f"g{i}" for i in range(1, num_meta + 1))
        possible = list(combinations(range(1, num_meta + 1), 2))
        rng.shuffle(possible)
        pairs = []
        covered: set[int] = set()
        for pair in possible:
            if len(pairs) >= 10:
                break
            if pair[0] not in covered or pair[1] not in covered or rng.random() < 0.4:
                pairs.append(pair)
                covered.update(pair)
        if covered != set(range(1, num_meta + 1)):
            return  # some family never occurs; the identities do not apply
        spec = UppSpec(metavars=metavars, blowup=blowup, pairs=tuple(sorted(pairs)))
        polyset, forest = gen_upp(spec)

        assert polyset.num_m == len(spec.pairs) * blowup**2
        assert polyset.num_v == num_meta * blowup

        grouped = rng.sample(range(1, num_meta + 1), rng.randint(0, num_meta))
        cut = {metavars[i - 1] for i in grouped} | {
            f"{metavars[i - 1]}_{j}"
            for i in range(1, num_meta + 1)
            if i not in grouped
            for j in range(1, blowup + 1)
        }
        out = abstract(polyset, forest, cut)
        expected_m = 0
        for a, b in spec.pairs:
            in_a, in_b = a in grouped, b in grouped
            expected_m += 1 if (in_a and in_b) else blowup**2 if not (in_a or in_b) else blowup
        assert out.num_m == expected_m
        assert out.num_v == len(grouped) + (num_meta - len(grouped)) * blowup


class TestVcReduce:
    def test_triangle_parameters(self):
        reduction = vc_reduce(GraphInstance(3, ((1, 2), (1, 3), (2, 3)), cover_size=2))
        assert reduction.upp.blowup == 27
        assert reduction.granularity == 1 * 27 + 2 == 29
        assert reduction.size_range == (2, 243)

    def test_triangle_decides_positively_for_cover_two(self):
        reduction = vc_reduce(GraphInstance(3, ((1, 2), (1, 3), (2, 3)), cover_size=2))
        polyset, forest = gen_upp(reduction.upp)
        lo, hi = reduction.size_range
        achieved = {
            (polyset.num_m - ml, polyset.num_v - vl)
            for ml, vl, _ in oracle.loss_profile(polyset, clean_forest(forest, polyset))
        }
        assert any(lo <= m <= hi and v == reduction.granularity for m, v in achieved)
        witness_m = next(m for m, v in achieved if lo <= m <= hi and v == reduction.granularity)
        assert decide_precise(polyset, forest, witness_m, reduction.granularity)

    def test_four_cycle_cover_two_exists_but_not_one(self):
        square = GraphInstance(4, ((1, 2), (2, 3), (3, 4), (1, 4)), cover_size=2)
        reduction = vc_reduce(square)
        polyset, forest = gen_upp(reduction.upp)
        lo, hi = reduction.size_range
        profile = oracle.loss_profile(polyset, clean_forest(forest, polyset))
        achieved = {(polyset.num_m - ml, polyset.num_v - vl) for ml, vl, _ in profile}
        assert any(lo <= m <= hi and v == reduction.granularity for m, v in achieved)
        # Granularity for an (illegal) cover size of 1: no cut hits it in range.
        k1_granularity = (4 - 1) * 64 + 1
        assert not any(lo <= m <= hi and v == k1_granularity for m, v in achieved)

    def test_precondition_violations(self):
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(2, ((1, 2),), cover_size=2))  # k range empty
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, ((1, 2), (1, 3), (2, 3)), cover_size=1))
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, (), cover_size=2))
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, ((1, 1), (1, 2), (2, 3)), cover_size=2))
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, ((1, 2), (2, 1), (1, 3)), cover_size=2))
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, ((1, 4),), cover_size=2))
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(7, tuple((i, i + 1) for i in range(1, 7)), cover_size=2))
        vc_reduce(
            GraphInstance(7, tuple((i, i + 1) for i in range(1, 7)), cover_size=2),
            max_vertices=7,
        )

    def test_isolated_vertex_breaks_the_correspondence(self):
        # v3 has no incident edge, so its variables never occur in the
        # polynomial.  {v1, v3} covers the single edge, yet no cut can
        # reach the granularity the reduction would assign to k=2, which
        # is why such graphs are rejected.
        with pytest.raises(InvalidGraphError):
            vc_reduce(GraphInstance(3, ((1, 2),), cover_size=2))

        assert oracle.has_vertex_cover(3, ((1, 2),), 2)
        spec = UppSpec(metavars=("x1", "x2", "x3"), blowup=27, pairs=((1, 2),))
        polyset, forest = gen_upp(spec)
        granularity = (3 - 2) * 27 + 2
        achieved = {
            (polyset.num_m - ml, polyset.num_v - vl)
            for ml, vl, _ in oracle.loss_profile(polyset, clean_forest(forest, polyset))
        }
        assert not any(2 <= m <= 243 and v == granularity for m, v in achieved)
