"""Command-line entry point: ``coalgebra-kit <verb> ...``.

Every verb is a pure function of its inputs; :func:`run` returns the exit
status and the text to print, so batch mode can evaluate lines in parallel.
"""

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor

from . import chain, functors, metrics, systems, trees
from .errors import ClassificationGap, CoalgebraKitError, FunctorSyntaxError, TreeSyntaxError

SCHEMA_VERSION = 1
BUDGET_ENV = "COALGEBRA_KIT_BUDGET"


class Diagnostic(Exception):
    """One-line error report; always exits with status 2."""


def _read(arg):
    """Return (text, source name); ``arg`` is a file path or an inline literal."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read(), arg
    return arg, "<inline>"


def _load_json(arg):
    text, source = _read(arg)
    try:
        return json.loads(text), source
    except json.JSONDecodeError as exc:
        raise Diagnostic(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _load_graph(arg):
    doc, source = _load_json(arg)
    if not isinstance(doc, dict):
        raise Diagnostic(f"{source}: a graph document must be a JSON object")
    try:
        return systems.graph_from_json(doc)
    except CoalgebraKitError as exc:
        raise Diagnostic(f"{source}: {exc}") from None


def _load_tree(arg):
    text, source = _read(arg)
    try:
        return trees.parse_tree(text)
    except TreeSyntaxError as exc:
        raise Diagnostic(f"{source}: {exc}") from None


def _load_functor(arg):
    text, source = _read(arg)
    try:
        return functors.parse_functor(text.strip())
    except FunctorSyntaxError as exc:
        raise Diagnostic(f"{source}: {exc}") from None


def _dump(doc):
    return json.dumps({"schema_version": SCHEMA_VERSION, **doc}, sort_keys=True)


def _state_name(state):
    graph, node = state
    return f"g{graph + 1}:{node}"


# --- verbs -------------------------------------------------------------------


def cmd_canonize(args):
    t = _load_tree(args.tree)
    c = trees.canonize(t)
    text = trees.format_tree(c)
    if args.json:
        return 0, _dump({"tree": text, "input_nodes": trees.size(t), "output_nodes": c.size})
    return 0, text


def cmd_bisim(args):
    g1, g2 = _load_graph(args.graph1), _load_graph(args.graph2)
    witness = systems.bisimilar(g1, g2)
    depth = None if witness is not None else systems.separation_depth(g1, g2)
    # depth-bounded agreement of approximants, computed independently of the refinement
    agree = all(
        systems.graph_partial(g1, n) is systems.graph_partial(g2, n) for n in range(args.depth + 1)
    )
    if args.json:
        doc = {"bisimilar": witness is not None, "separation_depth": depth, "agree_to_depth": agree, "depth": args.depth}
        if witness is not None:
            doc["blocks"] = [[_state_name(s) for s in b] for b in witness.partition.blocks]
        return (0 if witness else 1), _dump(doc)
    if witness is None:
        return 1, f"not bisimilar\nseparation depth: {depth}"
    lines = ["bisimilar"]
    lines += ["block {}: {}".format(i, " ".join(_state_name(s) for s in b)) for i, b in enumerate(witness.partition.blocks)]
    return 0, "\n".join(lines)


def cmd_distance(args):
    g1, g2 = _load_graph(args.graph1), _load_graph(args.graph2)
    if args.delta is not None or g1.is_labelled or g2.is_labelled:
        d = metrics.labelled_behavioral_distance(g1, g2, args.delta)
    else:
        d = metrics.behavioral_distance(g1, g2)
    text = metrics.format_ext(d)
    return 0, (_dump({"distance": text}) if args.json else text)


def cmd_chain(args):
    F = _load_functor(args.functor)
    metric = args.metric or any(isinstance(e, functors.Hd) for e in functors.walk(F))
    build = chain.hausdorff_chain if metric else chain.kripke_chain
    levels = build(F, args.n, args.budget)
    if args.json:
        return 0, _dump(chain.chain_to_json(F, levels, args.sizes_only))
    sizes = " ".join(str(len(l)) for l in levels)
    if args.sizes_only:
        return 0, sizes
    lines = [f"{functors.format_functor(F)}: {sizes}"]
    for i, level in enumerate(levels):
        prev = levels[i - 1].carrier if i else None
        for k, x in enumerate(level.carrier):
            line = f"V{level.index}[{k}] = {json.dumps(chain.encode_value(x), sort_keys=True)}"
            if prev is not None:
                line += f" -> V{level.index - 1}[{prev.index(level.connect(x))}]"
            lines.append(line)
    return 0, "\n".join(lines)


def cmd_classify(args):
    F = _load_functor(args.functor)
    try:
        value = str(functors.classify(F))
    except ClassificationGap:
        value = "classification-gap"
    return 0, (_dump({"functor": functors.format_functor(F), "class": value}) if args.json else value)


def cmd_unfold(args):
    g = _load_graph(args.graph)
    t = systems.unfold(g, args.n)
    if args.canonize:
        t = trees.canonize(t)
    text = trees.format_tree(t)
    return 0, (_dump({"tree": text}) if args.json else text)


def cmd_hausdorff(args):
    doc, source = _load_json(args.space)
    try:
        X = metrics.metric_from_json(doc)
    except CoalgebraKitError as exc:
        raise Diagnostic(f"{source}: {exc}") from None
    S, _ = _load_json(args.subset1)
    T, _ = _load_json(args.subset2)
    fix = lambda p: tuple(p) if isinstance(p, list) else p  # noqa: E731
    d = metrics.hausdorff_distance([fix(p) for p in S], [fix(p) for p in T], X)
    text = metrics.format_ext(d)
    return 0, (_dump({"distance": text}) if args.json else text)


def cmd_minimize(args):
    g = _load_graph(args.graph)
    m = systems.minimize(g)
    doc = systems.graph_to_json(m)
    if args.json:
        return 0, _dump({"graph": doc})
    return 0, json.dumps(doc, sort_keys=True)


def _budget_default():
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return metrics.DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise Diagnostic(f"{BUDGET_ENV}: not an integer: {raw!r}") from None


def _common(suppress):
    common = argparse.ArgumentParser(add_help=False)
    # sub-level copies must not clobber flags given before the verb
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common.add_argument("--json", action="store_true", default=dflt(False), help="machine-readable output")
    common.add_argument("--budget", type=int, default=dflt(None), help="maximum entries per chain level")
    common.add_argument(
        "--depth", type=int, default=dflt(systems.DEFAULT_ORACLE_DEPTH), help="depth bound for definitional oracles"
    )
    return common


def build_parser():
    parser = argparse.ArgumentParser(prog="coalgebra-kit", parents=[_common(False)], description=__doc__.splitlines()[0])
    common = _common(True)
    parser.add_argument("--batch", metavar="FILE", help="run one command per line of FILE")
    sub = parser.add_subparsers(dest="verb")

    p = sub.add_parser("canonize", parents=[common], help="strongly extensional form of a tree")
    p.add_argument("tree")
    p.set_defaults(func=cmd_canonize)

    p = sub.add_parser("bisim", parents=[common], help="bisimilarity of two graphs (exit 1 if not)")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("distance", parents=[common], help="behavioural distance of two graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--delta", default=None, help="label distance d(0,1) for labelled graphs")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("chain", parents=[common], help="terminal-coalgebra chain levels 0..N")
    p.add_argument("functor")
    p.add_argument("n", type=int)
    p.add_argument("--sizes-only", action="store_true")
    p.add_argument("--metric", action="store_true", help="evaluate over metric spaces")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("classify", parents=[common], help="cardinality class n(F)")
    p.add_argument("functor")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("unfold", parents=[common], help="depth-bounded tree unfolding of a graph")
    p.add_argument("graph")
    p.add_argument("n", type=int)
    p.add_argument("--canonize", action="store_true")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distance of two subsets")
    p.add_argument("space")
    p.add_argument("subset1")
    p.add_argument("subset2")
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("minimize", parents=[common], help="quotient a graph by bisimilarity")
    p.add_argument("graph")
    p.set_defaults(func=cmd_minimize)
    return parser


def run(argv):
    """Execute one command line; returns (exit status, output text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (2 if exc.code else 0), ""
    try:
        if args.budget is None:
            args.budget = _budget_default()
        if args.verb is None:
            return 2, "error: no command given"
        return args.func(args)
    except Diagnostic as exc:
        return 2, f"error: {exc}"
    except CoalgebraKitError as exc:
        return 2, f"error: {exc}"
    except (OSError, ValueError) as exc:
        return 2, f"error: {exc}"


def run_batch(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [l for l in (x.strip() for x in fh) if l and not l.startswith("#")]
    except OSError as exc:
        return [(2, f"error: {path}: {exc.strerror}")]
    argvs = [shlex.split(l) for l in lines]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(run, argvs))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if "--batch" in argv:
        i = argv.index("--batch")
        if i + 1 >= len(argv):
            print("error: --batch needs a file", file=sys.stderr)
            return 2
        results = run_batch(argv[i + 1])
        status = 0
        for code, text in results:
            if text:
                (sys.stderr if code >= 2 else sys.stdout).write(text + "\n")
            status = max(status, code)
        return status
    code, text = run(argv)
    if text:
        (sys.stderr if code >= 2 else sys.stdout).write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
