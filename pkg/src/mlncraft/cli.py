"""Command-line interface: ``mlncraft <command> [options]``.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.
Results go to standard output (or ``--out``) as canonical JSON;
diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, io
from .analysis import (
    ABOVE_MEAN,
    CLOSENESS,
    DEGREE,
    TOP_K,
    centrality,
    community_hubs,
    detect_communities,
    layer_hubs,
    load_communities,
)
from .bench import bench
from .cbg import METRICS
from .errors import MLNError
from .generate import SyntheticSpec, generate_synthetic
from .homln import compose_communities_and, compose_hub_sets, compose_layers, parse_expr, rank_layers_by_avg_degree, BinOp, Ref
from .kcommunity import PARTIAL, INCONSISTENT, k_community, parse_ordering, rank_elements, two_community


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(doc_or_obj, args):
    text = io.dumps(doc_or_obj)
    if getattr(args, "out", None):
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise MLNError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _network(args):
    if getattr(args, "mln", None):
        return io.load_mln(args.mln)
    if getattr(args, "generate", None):
        return generate_synthetic(SyntheticSpec.from_shorthand(args.generate, seed=args.seed))[0]
    raise UsageError("give --mln FILE" + (" or --generate SPEC" if hasattr(args, "generate") else ""))


def _read_assignment_file(net, path):
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        loaded = io.loads(text, net)
        return loaded if isinstance(loaded, dict) else {loaded.layer.name: loaded}
    grouped = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise MLNError(f"{path}:{lineno}: expected 'layer vertex community'")
        grouped.setdefault(parts[0], {})[parts[1]] = parts[2]
    return {name: load_communities(net.layer(name), assignment) for name, assignment in grouped.items()}


def _community_sets(net, names, args):
    sets = {}
    for path in getattr(args, "communities", None) or []:
        sets.update(_read_assignment_file(net, path))
    todo = [n for n in names if n not in sets]
    detect = lambda name: detect_communities(net.layer(name), seed=args.seed, resolution=args.resolution)  # noqa: E731
    if getattr(args, "parallel", False) and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=len(todo)) as pool:
            found = list(pool.map(detect, todo))
    else:
        found = [detect(name) for name in todo]
    sets.update(zip(todo, found))
    return sets


def _metric_options(args):
    return {"literal_denominator": True} if getattr(args, "paper_literal_denominator", False) else {}


def _dot(result, path):
    lines = ["graph kcommunity {", "  node [shape=ellipse];"]
    nodes = sorted({f"{layer}:{c}" for e in result.elements for layer, c in e.tuple})
    lines += [f'  "{n}";' for n in nodes]
    for e in result.elements:
        style = "dashed" if e.status == PARTIAL else "solid"
        for link in e.links:
            lines.append(
                f'  "{link.left_layer}:{link.left}" -- "{link.right_layer}:{link.right}" '
                f'[label="{link.weight:.4g}", style={style}];'
            )
        if e.failure_kind == INCONSISTENT:
            first_layer = e.tuple[0][0]
            lines.append(
                f'  "{e.tuple[-1][0]}:{e.tuple[-1][1]}" -- "{first_layer}:{e.mismatched_with}" [color=red, style=dashed];'
            )
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


# --- commands --------------------------------------------------------------


def cmd_info(args):
    net = _network(args)
    doc = {
        "type": "info",
        "kind": net.kind,
        "layers": [
            {
                "name": layer.name,
                "entity_type": layer.entity_type,
                "n": layer.n,
                "m": layer.m,
                "avg_degree": 2.0 * layer.m / layer.n if layer.n else 0.0,
            }
            for layer in net.layers
        ],
        "couplings": [
            {"layers": [a, b], "edges": len(net.coupling(a, b)), "implicit": net.coupling(a, b).implicit}
            for a, b in net.meta_edges()
        ],
    }
    _emit(doc, args)


def cmd_communities(args):
    net = _network(args)
    names = args.layer or net.layer_names
    sets = _community_sets(net, names, args)
    _emit({name: sets[name] for name in names}, args)


def cmd_hubs(args):
    net = _network(args)
    layer = net.layer(args.layer)
    if args.community is not None:
        cset = _community_sets(net, [layer.name], args)[layer.name]
        if not 0 <= args.community < cset.count:
            raise MLNError(f"layer {layer.name!r} has no community {args.community}")
        hubs = community_hubs(layer, cset[args.community])
    else:
        hubs = layer_hubs(centrality(layer, args.metric), args.rule, args.k)
    if args.combine:
        other = layer_hubs(centrality(net.layer(args.combine), args.metric), args.rule, args.k)
        combined = compose_hub_sets(hubs, other, args.op)
        hubs = type(hubs)(
            f"{hubs.scope} {args.op} {other.scope}", hubs.metric, combined, hubs.threshold_rule
        )
    _emit(hubs, args)


def cmd_compose(args):
    net = _network(args)
    tree = parse_expr(args.expr)
    layer = compose_layers(net, tree, complement_cap=args.complement_cap)
    doc = {
        "type": "layer",
        "expression": str(tree),
        "n": layer.n,
        "m": layer.m,
        "avg_degree": 2.0 * layer.m / layer.n if layer.n else 0.0,
        "edges": [[layer.label(u), layer.label(v)] for u, v in layer.edges.tolist()],
    }
    if args.communities_and:
        if not (isinstance(tree, BinOp) and tree.op == "AND" and isinstance(tree.left, Ref) and isinstance(tree.right, Ref)):
            raise UsageError("--communities-and needs an expression of the form 'A AND B'")
        sets = _community_sets(net, [tree.left.layer, tree.right.layer], args)
        composed = compose_communities_and(sets[tree.left.layer], sets[tree.right.layer])
        doc["communities"] = io.to_document(composed)
        del doc["communities"]["schema"]
    _emit(doc, args)


def cmd_two_community(args):
    net = _network(args)
    names = [t.strip() for t in args.layers.split(",")]
    if len(names) != 2:
        raise UsageError("--layers takes exactly two layer names, e.g. A,D")
    ordering = parse_ordering(net, names)
    sets = _community_sets(net, ordering.layers, args)
    result = two_community(net, names[0], names[1], args.metric, sets, seed=args.seed, **_metric_options(args))
    if args.dot:
        _dot(result, args.dot)
    _emit(result, args)


def cmd_kcommunity(args):
    net = _network(args)
    ordering = parse_ordering(net, args.order)
    sets = _community_sets(net, list(dict.fromkeys(ordering.layers)), args)
    result = k_community(net, ordering, args.metric, sets, seed=args.seed, **_metric_options(args))
    if args.dot:
        _dot(result, args.dot)
    _emit(result, args)


def cmd_rank(args):
    if args.result:
        result = io.load_result(args.result)
        ranked = rank_elements(result)
        doc = {"type": "ranked_elements", "metric": result.metric, "elements": [io._element_doc(e) for e in ranked]}
    else:
        net = _network(args)
        doc = {
            "type": "layer_ranking",
            "ranking": [{"layer": name, "avg_degree": avg} for name, avg in rank_layers_by_avg_degree(net)],
        }
    _emit(doc, args)


def cmd_generate(args):
    if args.spec:
        spec = SyntheticSpec.from_dict(json.loads(Path(args.spec).read_text()))
        if args.seed is not None:
            spec.seed = args.seed
    elif args.generate:
        spec = SyntheticSpec.from_shorthand(args.generate, seed=args.seed)
    else:
        raise UsageError("give --generate SPEC or --spec FILE")
    net, planted = generate_synthetic(spec)
    text = io.format_mln(net)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.planted:
        doc = {
            "type": "generated",
            "seed": spec.seed,
            "spec": spec.as_dict(),
            "planted": {name: labels.tolist() for name, labels in planted.items()},
        }
        Path(args.planted).write_text(io.dumps(doc))


def cmd_bench(args):
    net = _network(args)
    report = bench(net, args.order, args.metric, args.repetitions, seed=args.seed, **_metric_options(args))
    _emit(report, args)


# --- parser ----------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="mlncraft", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mlncraft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, generate=False, seed_default=0):
        p.add_argument("--mln", help="network file in MLN text format")
        if generate:
            p.add_argument("--generate", help="synthetic network shorthand, e.g. '3x10000,deg20'")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", help="write JSON here instead of standard output")

    def communities_opts(p):
        p.add_argument("--communities", action="append", metavar="FILE",
                       help="precomputed communities (JSON from 'communities' or 'layer vertex community' lines)")
        p.add_argument("--resolution", type=float, default=1.0)
        p.add_argument("--parallel", action="store_true", help="detect layer communities concurrently")

    def metric_opts(p):
        p.add_argument("--metric", choices=sorted(METRICS), default="we")
        p.add_argument("--paper-literal-denominator", action="store_true",
                       help="use |V_i^m|*|V_i^n| as the coupled-fraction denominator in wd and wh")
        p.add_argument("--dot", help="also write a DOT graph of the elements here")

    p = sub.add_parser("info", help="summarise a network")
    common(p, generate=True)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("communities", help="Louvain communities per layer")
    common(p, generate=True)
    communities_opts(p)
    p.add_argument("--layer", action="append", help="restrict to these layers")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("hubs", help="layer or community hubs")
    common(p)
    communities_opts(p)
    p.add_argument("--layer", required=True)
    p.add_argument("--metric", choices=[DEGREE, CLOSENESS], default=DEGREE)
    p.add_argument("--rule", choices=[ABOVE_MEAN, TOP_K], default=ABOVE_MEAN)
    p.add_argument("--k", type=int)
    p.add_argument("--community", type=int, help="hubs of this community (degree inside the community)")
    p.add_argument("--combine", metavar="LAYER", help="combine with the hubs of another layer")
    p.add_argument("--op", choices=["AND", "OR", "MINUS"], default="AND")
    p.set_defaults(func=cmd_hubs)

    p = sub.add_parser("compose", help="Boolean layer composition of a homogeneous network")
    common(p)
    communities_opts(p)
    p.add_argument("--expr", required=True, help="e.g. 'A AND NOT B'")
    p.add_argument("--communities-and", action="store_true",
                   help="also compose the two layers' communities for 'A AND B'")
    p.add_argument("--complement-cap", type=int, default=20_000)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("two-community", help="pair the communities of two layers")
    common(p)
    communities_opts(p)
    metric_opts(p)
    p.add_argument("--layers", required=True, help="two layer names, e.g. A,D")
    p.set_defaults(func=cmd_two_community)

    p = sub.add_parser("kcommunity", help="k-community along a layer ordering")
    common(p, generate=True)
    communities_opts(p)
    metric_opts(p)
    p.add_argument("--order", required=True, help="e.g. 'M,A,D,M' (repeat the first layer to close a cycle)")
    p.set_defaults(func=cmd_kcommunity)

    p = sub.add_parser("rank", help="rank k-community elements or homogeneous layers")
    common(p)
    p.add_argument("--result", help="k-community JSON to rank by strength")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("generate", help="planted-partition synthetic network")
    p.add_argument("--generate", help="shorthand, e.g. '3x1000,deg20,blocks5'")
    p.add_argument("--spec", help="JSON generator spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the MLN file here instead of standard output")
    p.add_argument("--planted", help="write planted block labels (JSON) here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="time decoupled composition against per-layer analysis")
    common(p, generate=True)
    p.add_argument("--order", required=True)
    p.add_argument("--metric", choices=sorted(METRICS), default="we")
    p.add_argument("--paper-literal-denominator", action="store_true")
    p.add_argument("--repetitions", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mlncraft: error: {exc}", file=sys.stderr)
        return 1
    except (MLNError, OSError, ValueError) as exc:
        print(f"mlncraft: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
