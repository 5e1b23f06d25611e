"""Command-line front end.

Exit status: 0 success, 1 validation failure or malformed input, 2 usage
error, 3 size-guard refusal. Outputs are deterministic for fixed inputs
and flags.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, clades, esequence, generators, metric, serialize
from .errors import InputError, SizeGuardError, UndecidedError
from .esequence import PrecRelation


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_space(args):
    space = serialize.space_from_csv(_read(args.input), source=args.input)
    if args.max_points and len(space.points) > args.max_points:
        raise SizeGuardError(
            f"{args.input}: {len(space.points)} points exceed --max-points "
            f"{args.max_points}"
        )
    return space


def cmd_analyze(args) -> int:
    quiver = serialize.read_quiver_file(args.input)
    report = analysis.analyze(quiver)
    _write(args, serialize.dumps(serialize.report_to_obj(report)))
    return 0


def cmd_universal(args) -> int:
    quiver = serialize.read_quiver_file(args.input)
    quiver.check_vertex(args.vertex)
    try:
        evo = analysis.universal_evolution(quiver, args.vertex)
    except UndecidedError as exc:
        _write(args, serialize.dumps({"status": "undecided", "reason": str(exc)}))
        return 0
    if evo is None:
        _write(args, serialize.dumps({"status": "none"}))
        return 0
    obj = {"status": "universal", **serialize.evolution_to_obj(evo)}
    if args.bound is not None:
        obj["verified_up_to_length"] = args.bound
        obj["bounded_check"] = analysis.verify_universal_bounded(
            quiver, evo, args.bound
        )
    _write(args, serialize.dumps(obj))
    return 0


def cmd_clade(args) -> int:
    quiver = serialize.read_quiver_file(args.input)
    _write(args, serialize.dumps(clades.clade_report(quiver, args.apex)))
    return 0


def cmd_esequence(args) -> int:
    quiver = serialize.read_quiver_file(args.input)
    seq = esequence.evolutionary_sequence(quiver)
    _write(args, serialize.dumps(serialize.esequence_to_obj(seq)))
    return 0


def cmd_forest(args) -> int:
    if args.input.endswith(".esq.json"):
        seq = serialize.esequence_from_obj(
            serialize.loads(_read(args.input), source=args.input), source=args.input
        )
    else:
        quiver = serialize.read_quiver_file(args.input)
        seq = esequence.evolutionary_sequence(quiver)
    forest = esequence.build_forest(seq)
    if args.format == "dot":
        _write(args, serialize.forest_to_dot(forest))
    elif args.format == "newick":
        _write(args, serialize.forest_to_newick(forest))
    else:
        _write(args, serialize.dumps(serialize.forest_to_obj(forest)))
    return 0


def cmd_reconstruct(args) -> int:
    space = _load_space(args)
    if args.prec is None or args.prec == "empty":
        prec = PrecRelation.build(())
    else:
        prec = serialize.prec_from_text(_read(args.prec))
    if args.levels is None:
        values = [
            space.distance(a, b) for a in space.points for b in space.points
        ]
        top = max(values)
        if top.denominator != 1:
            raise InputError(
                "matrix has non-integer distances; pass --levels explicitly "
                "only for integer ultrametrics"
            )
        n = int(top)
    else:
        n = args.levels
    seq = esequence.reconstruct(space, prec, n)
    _write(args, serialize.dumps(serialize.esequence_to_obj(seq)))
    return 0


def cmd_ultra_tower(args) -> int:
    tower = metric.tower_u(_load_space(args))
    _write(args, serialize.dumps(serialize.tower_to_obj(tower, "ultrametric")))
    return 0


def cmd_metric_tower(args) -> int:
    tower = metric.tower_v(_load_space(args))
    _write(args, serialize.dumps(serialize.tower_to_obj(tower, "metric")))
    return 0


def cmd_validate(args) -> int:
    path = args.input
    text = _read(path)
    if path.endswith(".csv"):
        labels, rows = serialize.matrix_from_csv(text, source=path)
        check = metric.validate_space(labels, rows)
        obj = {
            "kind": "metric-space",
            "is_metric": check.is_metric,
            "is_ultrametric": check.is_ultrametric,
            "problems": list(check.problems),
        }
        _write(args, serialize.dumps(obj))
        return 0 if check.is_metric else 1
    if path.endswith(".dot") or path.endswith(".gv"):
        serialize.quiver_from_dot(text, source=path)
        _write(args, serialize.dumps({"kind": "quiver", "problems": []}))
        return 0
    obj = serialize.loads(text, source=path)
    if isinstance(obj, dict) and "levels" in obj:
        seq = serialize.esequence_from_obj(obj, source=path)
        problems = esequence.validate_esequence(seq)
        _write(args, serialize.dumps({"kind": "esequence", "problems": problems}))
        return 0 if not problems else 1
    serialize.quiver_from_obj(obj, source=path)
    _write(args, serialize.dumps({"kind": "quiver", "problems": []}))
    return 0


def _parse_tree_edges(text: str) -> list[tuple[str, str]]:
    edges = []
    for token in text.replace(",", " ").split():
        if "-" not in token:
            raise InputError(f"tree edge {token!r} must look like a-b")
        a, _, b = token.partition("-")
        edges.append((a, b))
    return edges


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "map-quiver":
        out = serialize.dumps(serialize.quiver_to_obj(generators.gen_map_quiver(args.n)))
    elif kind == "surjection-quiver":
        out = serialize.dumps(
            serialize.quiver_to_obj(generators.gen_surjection_quiver(args.n))
        )
    elif kind == "rooted-tree":
        if not args.edges or not args.root:
            raise InputError("rooted-tree needs --edges and --root")
        quiver = generators.gen_rooted_tree_quiver(
            _parse_tree_edges(args.edges), args.root
        )
        out = serialize.dumps(serialize.quiver_to_obj(quiver))
    elif kind in ("g3", "abnormal", "nonmonotonous", "irregular"):
        fn = {
            "g3": generators.gen_g3,
            "abnormal": generators.gen_abnormal,
            "nonmonotonous": generators.gen_nonmonotonous,
            "irregular": generators.gen_irregular,
        }[kind]
        out = serialize.dumps(serialize.quiver_to_obj(fn()))
    elif kind == "random-quiver":
        out = serialize.dumps(serialize.quiver_to_obj(
            generators.gen_random_quiver(args.n, args.density, args.seed)
        ))
    elif kind == "random-monotonous":
        out = serialize.dumps(serialize.quiver_to_obj(
            generators.gen_random_monotonous(args.n, args.density, args.seed)
        ))
    elif kind == "random-phylogenetic":
        out = serialize.dumps(serialize.quiver_to_obj(
            generators.gen_random_phylogenetic(args.n, args.density, args.seed)
        ))
    elif kind == "random-ultrametric":
        out = serialize.space_to_csv(
            generators.gen_random_ultrametric(args.n, args.depth, args.seed)
        )
    elif kind == "random-metric":
        out = serialize.space_to_csv(generators.gen_random_metric(args.n, args.seed))
    elif kind == "random-esequence":
        seq = generators.gen_random_esequence(
            args.levels, args.width, args.order_density, args.seed,
            single_root=args.single_root, surjective=args.surjective,
        )
        out = serialize.dumps(serialize.esequence_to_obj(seq))
    else:  # argparse choices make this unreachable
        raise InputError(f"unknown generator kind {kind!r}")
    _write(args, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phyloquiver",
        description="Phylogenetic analysis on finite quivers and metric spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("-o", "--output", help="write output here instead of stdout")
        return p

    p = add("analyze", cmd_analyze, "per-vertex heights/normality/phylogeny report")
    p.add_argument("input", help="quiver file (.json or .dot)")

    p = add("universal", cmd_universal, "universal evolution of a vertex")
    p.add_argument("input")
    p.add_argument("vertex")
    p.add_argument("--bound", type=int, default=None,
                   help="also run the bounded universality check up to this length")

    p = add("clade", cmd_clade, "clade report for an apex vertex")
    p.add_argument("input")
    p.add_argument("apex")

    p = add("esequence", cmd_esequence, "evolutionary sequence of a phylogenetic quiver")
    p.add_argument("input")

    p = add("forest", cmd_forest, "evolutionary forest (dot, newick, or json)")
    p.add_argument("input", help="quiver file, or an E-sequence saved as *.esq.json")
    p.add_argument("--format", choices=["dot", "newick", "json"], default="dot",
                   help="newick needs a single root; every edge gets length 1")

    p = add("reconstruct", cmd_reconstruct,
            "rebuild an E-sequence from a distance matrix and a prec relation")
    p.add_argument("input", help="distance matrix CSV")
    p.add_argument("--prec", default=None,
                   help="pair list file, or the literal 'empty'")
    p.add_argument("--levels", type=int, default=None,
                   help="number of reconstructed steps (default: max distance)")
    p.add_argument("--max-points", type=int, default=None)

    p = add("ultra-tower", cmd_ultra_tower, "contraction tower of an ultrametric space")
    p.add_argument("input")
    p.add_argument("--max-points", type=int, default=None)

    p = add("metric-tower", cmd_metric_tower, "drift tower of a metric space")
    p.add_argument("input")
    p.add_argument("--max-points", type=int, default=None)

    p = add("gen", cmd_gen, "emit a fixture or a seeded random instance")
    p.add_argument("kind", choices=[
        "map-quiver", "surjection-quiver", "rooted-tree", "g3", "abnormal",
        "nonmonotonous", "irregular", "random-quiver", "random-monotonous",
        "random-phylogenetic", "random-ultrametric", "random-metric",
        "random-esequence",
    ])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--width", type=int, default=5)
    p.add_argument("--order-density", type=float, default=0.3)
    p.add_argument("--single-root", action="store_true")
    p.add_argument("--surjective", action="store_true")
    p.add_argument("--edges", help="tree edges for rooted-tree, e.g. 'a-b b-c'")
    p.add_argument("--root", help="root vertex for rooted-tree")

    p = add("validate", cmd_validate, "run every validator that applies to the input")
    p.add_argument("input")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SizeGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
