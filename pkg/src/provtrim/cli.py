"""Command-line front end.

Subcommands: generate {telephony,tpch,tree,upp,vcreduce}, verify
{forest,compat,vvs}, compress, evaluate, decide, bench.  Diagnostics go
to stderr; data goes to files or stdout, so pipelines compose.

Exit codes: 0 success or positive verdict, 1 negative verdict,
2 validation failure, 3 infeasible bound, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import benchgen
from .abstraction import (
    AbstractionForest,
    abstract,
    check_compatibility,
    clean_forest,
    count_vvs,
    is_vvs,
    lift_valuation,
    parse_forest,
    parse_vvs,
    serialize_forest,
    serialize_vvs,
    validate_forest,
)
from .errors import ProvtrimError, TooManyCutsError
from .optimizer import (
    DEFAULT_CUT_CAP,
    brute_force_vvs,
    decide_precise,
    greedy_vvs,
    optimal_vvs_single_tree,
)
from .polynomial import parse_polyset, parse_valuation, serialize_polyset

EXIT_OK = 0
EXIT_NO = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_CAP = 4

_ALGO_NAMES = {"opt": "optimal", "greedy": "greedy", "brute": "brute"}

BENCH_COLUMNS = [
    "generator",
    "tree_type",
    "tree_nodes",
    "num_cuts",
    "algo",
    "bound",
    "status",
    "ml",
    "vl",
    "out_num_m",
    "out_num_v",
    "node_visits",
    "table_entries",
    "promotions",
    "elapsed_ms",
]


def _err(message: str) -> None:
    print(f"provtrim: {message}", file=sys.stderr)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _emit_manifest(outdir: Path, spec: dict, seed, polyset=None, extra: dict | None = None) -> None:
    manifest = {
        "spec": spec,
        "seed": seed,
        "num_m": polyset.num_m if polyset is not None else None,
        "num_v": polyset.num_v if polyset is not None else None,
    }
    if extra:
        manifest.update(extra)
    _write_json(outdir / "manifest.json", manifest)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _pair_list(text: str) -> list[tuple[int, int]]:
    pairs = []
    for part in text.split(","):
        if not part:
            continue
        a, _, b = part.partition("-")
        pairs.append((int(a), int(b)))
    return pairs


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)

    if args.generator == "telephony":
        spec = benchgen.TelephonySpec(
            num_customers=args.customers,
            num_plans=args.plans,
            num_months=args.months,
            seed=args.seed,
        )
        polyset, forest = benchgen.gen_telephony(spec)
        (outdir / "polyset.json").write_bytes(serialize_polyset(polyset))
        (outdir / "forest.json").write_bytes(serialize_forest(forest))
        _emit_manifest(
            outdir,
            {"generator": "telephony", "customers": spec.num_customers,
             "plans": spec.num_plans, "months": spec.num_months},
            spec.seed,
            polyset,
        )
    elif args.generator == "tpch":
        polyset, suppliers, parts = benchgen.gen_tpch_like(args.keys, args.modulus, args.seed)
        forest = AbstractionForest([suppliers, parts])
        (outdir / "polyset.json").write_bytes(serialize_polyset(polyset))
        (outdir / "forest.json").write_bytes(serialize_forest(forest))
        _emit_manifest(
            outdir,
            {"generator": "tpch", "keys": args.keys, "modulus": args.modulus},
            args.seed,
            polyset,
        )
    elif args.generator == "tree":
        spec = benchgen.TreeSpec(type=args.type, fanouts=tuple(_int_list(args.fanouts)))
        tree = benchgen.gen_tree(spec)
        (outdir / "forest.json").write_bytes(serialize_forest(AbstractionForest([tree])))
        _emit_manifest(
            outdir,
            {"generator": "tree", "type": spec.type, "fanouts": list(spec.fanouts)},
            None,
            extra={"num_cuts": benchgen.count_cuts(tree)},
        )
    elif args.generator == "upp":
        spec = benchgen.UppSpec(
            metavars=tuple(f"x{i}" for i in range(1, args.metavars + 1)),
            blowup=args.blowup,
            pairs=tuple(_pair_list(args.pairs)),
        )
        polyset, forest = benchgen.gen_upp(spec)
        (outdir / "polyset.json").write_bytes(serialize_polyset(polyset))
        (outdir / "forest.json").write_bytes(serialize_forest(forest))
        _emit_manifest(
            outdir,
            {"generator": "upp", "metavars": list(spec.metavars),
             "blowup": spec.blowup, "pairs": [list(p) for p in spec.pairs]},
            None,
            polyset,
        )
    else:  # vcreduce
        graph = benchgen.GraphInstance(
            num_vertices=args.vertices,
            edges=tuple(_pair_list(args.edges)),
            cover_size=args.cover_size,
        )
        reduction = benchgen.vc_reduce(graph, max_vertices=args.max_vertices)
        polyset, forest = benchgen.gen_upp(reduction.upp)
        (outdir / "polyset.json").write_bytes(serialize_polyset(polyset))
        (outdir / "forest.json").write_bytes(serialize_forest(forest))
        _emit_manifest(
            outdir,
            {"generator": "vcreduce", "vertices": graph.num_vertices,
             "edges": [list(e) for e in graph.edges], "cover_size": graph.cover_size},
            None,
            polyset,
            extra={"granularity": reduction.granularity,
                   "size_range": list(reduction.size_range)},
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    forest = parse_forest(_read(args.forest))
    if args.check == "forest":
        violations = validate_forest(forest)
        for violation in violations:
            _err(violation)
        return EXIT_VALIDATION if violations else EXIT_OK
    if args.check == "compat":
        polyset = parse_polyset(_read(args.input))
        violations = validate_forest(forest)
        clashes = check_compatibility(polyset, forest)
        for violation in violations:
            _err(violation)
        for clash in clashes:
            _err(str(clash))
        return EXIT_VALIDATION if violations or clashes else EXIT_OK
    # vvs
    members = parse_vvs(_read(args.vvs))
    if is_vvs(forest, members):
        return EXIT_OK
    _err(f"{sorted(members)} is not a valid cut of the forest")
    return EXIT_VALIDATION


# ---------------------------------------------------------------------------
# compress / evaluate / decide
# ---------------------------------------------------------------------------


def _cmd_compress(args) -> int:
    polyset = parse_polyset(_read(args.input))
    forest = parse_forest(_read(args.forest))
    algo = _ALGO_NAMES[args.algo]

    if algo == "optimal":
        if len(forest.trees) != 1:
            _err(
                "the optimal algorithm supports exactly one abstraction tree; "
                "use --algo greedy or --algo brute for multi-tree forests"
            )
            return EXIT_VALIDATION
        result = optimal_vvs_single_tree(polyset, forest.trees[0], args.bound)
    elif algo == "greedy":
        result = greedy_vvs(polyset, forest, args.bound)
    else:
        result = brute_force_vvs(polyset, forest, args.bound, cut_cap=args.cap)

    doc = json.dumps(result.to_dict(), indent=2) + "\n"
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "result.json").write_text(doc, encoding="utf-8")
        cleaned = clean_forest(forest, polyset)
        (outdir / "compressed.json").write_bytes(
            serialize_polyset(abstract(polyset, cleaned, result.vvs))
        )
        (outdir / "vvs.json").write_bytes(serialize_vvs(result.vvs))
    else:
        sys.stdout.write(doc)
    if args.stats:
        s = result.stats
        _err(
            f"status={result.status} node_visits={s.node_visits} "
            f"table_entries={s.table_entries} combine_ops={s.combine_ops} "
            f"promotions={s.promotions} cuts={s.cuts_enumerated} "
            f"elapsed_ms={s.elapsed_ms:.2f}"
        )
    return EXIT_OK if result.adequate else EXIT_INFEASIBLE


def _cmd_evaluate(args) -> int:
    polyset = parse_polyset(_read(args.input))
    valuation = parse_valuation(_read(args.valuation))
    if args.lift:
        if not args.forest or not args.vvs:
            _err("--lift requires --forest and --vvs")
            return EXIT_VALIDATION
        forest = clean_forest(parse_forest(_read(args.forest)), polyset)
        members = parse_vvs(_read(args.vvs))
        valuation = lift_valuation(forest, members, valuation)
    for poly in polyset.polys:
        print(poly.evaluate(valuation))
    return EXIT_OK


def _cmd_decide(args) -> int:
    polyset = parse_polyset(_read(args.input))
    forest = parse_forest(_read(args.forest))
    exists = decide_precise(polyset, forest, args.bound, args.granularity, cut_cap=args.cap)
    print("yes" if exists else "no")
    return EXIT_OK if exists else EXIT_NO


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _bench_instance(args):
    if args.generator == "telephony":
        spec = benchgen.TelephonySpec(num_customers=args.customers, seed=args.seed)
        polyset, _ = benchgen.gen_telephony(spec)
        family = [f"p{i}" for i in range(128)]
    else:
        polyset, _, _ = benchgen.gen_tpch_like(args.keys, 128, args.seed)
        family = [f"s{i}" for i in range(128)]
    return polyset, family


def _cmd_bench(args) -> int:
    polyset, family = _bench_instance(args)
    types = set(_int_list(args.types))
    fractions = [float(part) for part in args.bounds.split(",") if part]
    algos = [part for part in args.algos.split(",") if part]
    for algo in algos:
        if algo not in _ALGO_NAMES:
            _err(f"unknown algorithm {algo!r}")
            return EXIT_VALIDATION

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for spec in benchgen.TREE_CATALOG:
            if spec.type not in types:
                continue
            tree = benchgen.gen_tree(
                benchgen.TreeSpec(spec.type, spec.fanouts, leaf_labels=tuple(family), prefix="g")
            )
            num_cuts = count_vvs(tree)
            for fraction in fractions:
                bound = max(1, min(polyset.num_m, round(fraction * polyset.num_m)))
                for algo in algos:
                    row = {
                        "generator": args.generator,
                        "tree_type": spec.type,
                        "tree_nodes": tree.node_count(),
                        "num_cuts": num_cuts,
                        "algo": algo,
                        "bound": bound,
                    }
                    try:
                        if algo == "opt":
                            result = optimal_vvs_single_tree(polyset, tree, bound)
                        elif algo == "greedy":
                            result = greedy_vvs(polyset, AbstractionForest([tree]), bound)
                        else:
                            result = brute_force_vvs(
                                polyset, AbstractionForest([tree]), bound, cut_cap=args.cap
                            )
                    except TooManyCutsError:
                        row.update(status="cap-exceeded", ml="", vl="", out_num_m="",
                                   out_num_v="", node_visits="", table_entries="",
                                   promotions="", elapsed_ms="")
                        writer.writerow(row)
                        continue
                    row.update(
                        status=result.status,
                        ml=result.ml,
                        vl=result.vl,
                        out_num_m=result.out_num_m,
                        out_num_v=result.out_num_v,
                        node_visits=result.stats.node_visits,
                        table_entries=result.stats.table_entries,
                        promotions=result.stats.promotions,
                        elapsed_ms=f"{result.stats.elapsed_ms:.3f}",
                    )
                    writer.writerow(row)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="provtrim",
        description="Compress provenance polynomials under abstraction trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit benchmark instances as JSON files")
    gensub = gen.add_subparsers(dest="generator", required=True)

    g = gensub.add_parser("telephony", help="per-zip revenue polynomials")
    g.add_argument("--customers", type=int, required=True)
    g.add_argument("--plans", type=int, default=128)
    g.add_argument("--months", type=int, default=12)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    g = gensub.add_parser("tpch", help="line items with modular supplier/part variables")
    g.add_argument("--keys", type=int, required=True)
    g.add_argument("--modulus", type=int, default=128)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    g = gensub.add_parser("tree", help="one uniform tree of a catalogue type")
    g.add_argument("--type", type=int, required=True)
    g.add_argument("--fanouts", required=True, help="comma-separated fan-out per level")
    g.add_argument("--output", required=True)

    g = gensub.add_parser("upp", help="uniformly partitioned polynomial with flat forest")
    g.add_argument("--metavars", type=int, required=True)
    g.add_argument("--blowup", type=int, required=True)
    g.add_argument("--pairs", required=True, help="comma-separated a-b pairs, a<b")
    g.add_argument("--output", required=True)

    g = gensub.add_parser("vcreduce", help="vertex-cover instance encoded as a UPP")
    g.add_argument("--vertices", type=int, required=True)
    g.add_argument("--edges", required=True, help="comma-separated a-b edges")
    g.add_argument("--cover-size", type=int, required=True)
    g.add_argument("--max-vertices", type=int, default=6)
    g.add_argument("--output", required=True)

    ver = sub.add_parser("verify", help="validate inputs without compressing")
    versub = ver.add_subparsers(dest="check", required=True)
    v = versub.add_parser("forest", help="structural forest validation")
    v.add_argument("--forest", required=True)
    v = versub.add_parser("compat", help="polynomials vs. forest compatibility")
    v.add_argument("--input", required=True)
    v.add_argument("--forest", required=True)
    v = versub.add_parser("vvs", help="cut validity")
    v.add_argument("--forest", required=True)
    v.add_argument("--vvs", required=True)

    c = sub.add_parser("compress", help="select and apply a cut")
    c.add_argument("--input", required=True)
    c.add_argument("--forest", required=True)
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--algo", choices=sorted(_ALGO_NAMES), default="opt")
    c.add_argument("--cap", type=int, default=DEFAULT_CUT_CAP)
    c.add_argument("--output", help="directory for result.json, vvs.json and compressed.json")
    c.add_argument("--stats", action="store_true", help="print operation counters to stderr")

    e = sub.add_parser("evaluate", help="valuate each polynomial under a scenario")
    e.add_argument("--input", required=True)
    e.add_argument("--valuation", required=True)
    e.add_argument("--lift", action="store_true",
                   help="valuation addresses cut members; lift it to the leaves")
    e.add_argument("--forest")
    e.add_argument("--vvs")

    d = sub.add_parser("decide", help="does a cut of exactly this size and granularity exist?")
    d.add_argument("--input", required=True)
    d.add_argument("--forest", required=True)
    d.add_argument("--bound", type=int, required=True)
    d.add_argument("--granularity", type=int, required=True)
    d.add_argument("--cap", type=int, default=DEFAULT_CUT_CAP)

    b = sub.add_parser("bench", help="sweep tree type x bound x algorithm, emit CSV")
    b.add_argument("--generator", choices=["telephony", "tpch"], default="tpch")
    b.add_argument("--customers", type=int, default=1000)
    b.add_argument("--keys", type=int, default=5000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--types", default="1,2,3,4,5,6,7")
    b.add_argument("--bounds", default="0.5", help="comma-separated fractions of numM")
    b.add_argument("--algos", default="opt,greedy")
    b.add_argument("--cap", type=int, default=DEFAULT_CUT_CAP)
    b.add_argument("--output", help="CSV file (stdout when omitted)")

    return parser


_COMMANDS = {
    "generate": _cmd_generate,
    "verify": _cmd_verify,
    "compress": _cmd_compress,
    "evaluate": _cmd_evaluate,
    "decide": _cmd_decide,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TooManyCutsError as exc:
        _err(str(exc))
        return EXIT_CAP
    except (ProvtrimError, ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
