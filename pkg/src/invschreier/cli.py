"""Command-line entry point: ``invschreier <subcommand> ...``.

Exit codes: 0 success, 1 parse or I/O error, 2 precondition violated,
3 search budget exhausted.  ``--json`` switches stdout to one JSON
document with a ``"v": 1`` field.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .errors import BudgetExhausted, GraphFormatError, PreconditionError, SchreierError, SizeLimitError
from .factorize import extend_structure, schreier_structure
from .graph_core import RootedMultigraph, ball, canonical_key
from .lazy import LazyGraph, from_selector
from .measures import (
    DiracSampler,
    ReversalModel,
    check_shift_invariance,
    check_unimodular,
    dirac,
    distinctness_witness,
    estimate_cylinder,
    exact_reversal_measure,
    reversal_family_count,
    sofic_lift,
    uniform_root_measure,
)
from .schreier import (
    SchreierGraph,
    contains,
    forget,
    from_subgroup,
    in_subgroup,
    schreier_generators,
    validate,
)
from .words import Word

DEFAULT_BUDGET = 10**6


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.doc: dict = {"v": 1}
        self.lines: list[str] = []

    def put(self, text: str, **fields):
        self.lines.append(text)
        self.doc.update(fields)

    def flush(self):
        if self.as_json:
            print(json.dumps(self.doc, sort_keys=True))
        else:
            for line in self.lines:
                print(line)


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("SCHREIER_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise PreconditionError(f"SCHREIER_BUDGET={env!r} is not an integer") from None
    return DEFAULT_BUDGET


def _graph_source(spec: str):
    """A lazy selector (``z2diag``, ``tree:4``, ...) or a path to a .el/.sg file."""
    if Path(spec).exists():
        return io.load_graph(spec)
    return from_selector(spec)


def _labeled(spec: str) -> SchreierGraph:
    g = io.load_graph(spec)
    if not isinstance(g, SchreierGraph):
        raise PreconditionError(f"{spec} is not a labeled (.sg) graph")
    return g


def _write_or_print(path, text: str, out: _Out, field: str):
    if path:
        io.write_text(path, text)
    elif out.as_json:
        out.doc[field] = text
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_factorize(args, out: _Out):
    g = io.load_graph(args.input)
    if isinstance(g, SchreierGraph):
        g = forget(g)
    sg = schreier_structure(g, args.seed)
    _write_or_print(args.out, io.format_schreier(sg), out, "graph")
    out.put(f"schreier structure of rank {sg.rank} on {sg.n_vertices} vertices",
            rank=sg.rank, n_vertices=sg.n_vertices)


def _selector(args) -> str:
    spec = args.graph or args.lazy
    if not spec:
        raise PreconditionError("give a graph selector or file")
    return spec


def cmd_extend(args, out: _Out):
    G = _graph_source(_selector(args))
    ext = extend_structure(G, args.radius, seed=args.seed, budget=_budget(args),
                           lookahead=args.lookahead)
    sg = ext.graph
    rep = validate(sg)
    _write_or_print(args.out, io.format_schreier(sg), out, "graph")
    out.put(f"labeled {args.radius}-ball: {sg.n_vertices} vertices, {rep.summary()}",
            valid=rep.ok, certificate=ext.certificate)


def cmd_ball(args, out: _Out):
    G = _graph_source(_selector(args))
    b = ball(G, None, args.radius)
    as_el = not b.labeled or (args.out or "").endswith(".el")
    text = io.format_edge_list(b.unlabeled()) if as_el else io.format_schreier(io.schreier_from_ball(b))
    _write_or_print(args.out, text, out, "graph")
    out.put(f"{args.radius}-ball with {b.n_vertices} vertices", n_vertices=b.n_vertices,
            key=canonical_key(b).hex())


def cmd_verify(args, out: _Out):
    sg = _labeled(args.input)
    rep = validate(sg)
    if rep.ok:
        kind = "truncated schreier structure" if sg.truncated else "schreier structure"
        out.put(f"valid {kind}, rank {sg.rank}, {sg.n_vertices} vertices",
                valid=True, rank=sg.rank, n_vertices=sg.n_vertices)
        return 0
    out.put(rep.summary(), valid=False, violations=[list(v) for v in rep.violations])
    return 2


def cmd_subgroup(args, out: _Out):
    if args.gens is not None:
        gens = [Word.parse(w) for w in args.gens.split(",") if w.strip()]
        sg = from_subgroup(gens, args.rank)
        if args.out or args.member is None:
            _write_or_print(args.out, io.format_schreier(sg), out, "graph")
        out.put(f"core graph with {sg.n_vertices} vertices", n_vertices=sg.n_vertices)
        if args.member is not None:
            h = Word.parse(args.member)
            member = in_subgroup(gens, args.rank, h)
            out.put(f"{h}: {'member' if member else 'not a member'}", word=str(h), member=member)
        return 0
    sg = _labeled(args.input)
    if args.member is not None:
        h = Word.parse(args.member)
        c = contains(sg, h)
        verdict = {True: "member", False: "not a member", None: "unknown (walk leaves the ball)"}[c]
        out.put(f"{h}: {verdict}", word=str(h), member=c)
        return 0
    gens = schreier_generators(sg)
    out.put("\n".join(str(w) for w in gens) if gens else "trivial subgroup",
            generators=[str(w) for w in gens])
    return 0


def _model(text: str, seed: int):
    """``reversal:<source>:<i>:p=<p>`` or ``dirac:<source>``."""
    kind, _, rest = text.partition(":")
    if kind == "dirac":
        return DiracSampler(_graph_source(rest))
    if kind != "reversal":
        raise PreconditionError(f"unknown model {text!r}")
    parts = rest.split(":")
    if len(parts) < 3 or not parts[-1].startswith("p="):
        raise PreconditionError(f"model {text!r} should read reversal:<source>:<i>:p=<p>")
    try:
        i = int(parts[-2])
        p = float(parts[-1][2:])
    except ValueError:
        raise PreconditionError(f"bad numbers in model {text!r}") from None
    return ReversalModel(_graph_source(":".join(parts[:-2])), i, p, seed)


def cmd_estimate(args, out: _Out):
    sampler = _model(args.model, args.seed)
    if args.exact:
        if not isinstance(sampler, ReversalModel):
            raise PreconditionError("--exact needs a reversal model")
        m = exact_reversal_measure(sampler, args.radius)
    else:
        m = estimate_cylinder(sampler, args.radius, args.n, args.seed)
    text = io.measure_to_json(m)
    _write_or_print(args.out, text, out, "measure")
    out.put(f"{len(m.keys())} classes at radius {args.radius}", classes=len(m.keys()))


def cmd_check_unimodular(args, out: _Out):
    if args.graph and args.graph.endswith(".json"):
        args.measure = args.graph
    if args.measure:
        m = io.measure_from_json(io.read_text(args.measure))
    else:
        g = _graph_source(_selector_or_fail(args.graph))
        if args.radius is None:
            args.radius = 1
        r1 = args.radius + 1
        if args.root == "dirac" or isinstance(g, LazyGraph):
            m = dirac(g, r1)
        else:
            m = uniform_root_measure(g, r1)
    rep = check_unimodular(m, args.radius)
    worst = rep.worst
    fields = {"ok": rep.ok, "radius": rep.radius, "exact": rep.exact,
              "violations": len(rep.violations)}
    if worst is not None:
        fields["worst"] = {"lhs": str(worst.lhs), "rhs": str(worst.rhs)}
    out.put(rep.summary(), **fields)
    return 0 if rep.ok else 4


def _selector_or_fail(spec):
    if not spec:
        raise PreconditionError("give a graph, a lazy selector, or --measure")
    return spec


def cmd_check_shift(args, out: _Out):
    sampler = _model(args.model, args.seed)
    g = Word.parse(args.word)
    rep = check_shift_invariance(sampler, g, args.radius, args.n, args.seed)
    worst = max(rep.rows, key=lambda row: row.z, default=None)
    z = worst.z if worst else 0.0
    out.put(f"shift by {g}: {'invariant' if rep.ok else 'NOT invariant'} "
            f"(max z {z:.2f}, threshold {rep.threshold:.2f})",
            ok=rep.ok, max_z=z, threshold=rep.threshold)
    return 0 if rep.ok else 4


def cmd_witness(args, out: _Out):
    A, B = _labeled(args.a), _labeled(args.b)
    h = distinctness_witness(A, B, args.max_len)
    if h is None:
        out.put(f"no witness up to length {args.max_len}", witness=None)
        return 4
    out.put(str(h), witness=str(h))
    return 0


def cmd_count_reversals(args, out: _Out):
    sg = _labeled(args.input)
    rc = reversal_family_count(sg, args.i)
    out.put(f"{rc.count} distinct of 2^{rc.n_cycles} patterns; "
            f"underlying graph {'rigid' if rc.rigid else 'not rigid'}; {len(rc.collisions)} collisions",
            count=rc.count, n_cycles=rc.n_cycles, rigid=rc.rigid,
            collisions=[["".join("1" if f else "0" for f in a), "".join("1" if f else "0" for f in b)]
                        for a, b in rc.collisions])


def _cycle(k: int) -> RootedMultigraph:
    return RootedMultigraph(k, tuple((v, (v + 1) % k) for v in range(k)))


def cmd_sofic_lift(args, out: _Out):
    sizes = [int(s) for s in args.cycles.split(",")]
    if args.inputs:
        graphs = [forget(g) if isinstance(g, SchreierGraph) else g
                  for g in map(io.load_graph, args.inputs)]
    else:
        graphs = [_cycle(k) for k in sizes]
    rep = sofic_lift(graphs, args.radius, args.seed)
    tv = [str(x) for x in rep.tv_labeled]
    out.put(f"consecutive TV (labeled): {' '.join(tv)}; stable from index {rep.stabilized_from()}",
            tv_labeled=tv, tv_unlabeled=[str(x) for x in rep.tv_unlabeled],
            stabilized_from=rep.stabilized_from())


def cmd_export_dot(args, out: _Out):
    g = io.load_graph(args.input)
    _write_or_print(args.out, io.to_dot(g), out, "dot")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invschreier", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(fn=fn)
        s.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return s

    s = add("factorize", cmd_factorize, "label an even-regular .el graph")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=0)

    s = add("extend", cmd_extend, "labeled R-ball of an infinite even-regular graph")
    s.add_argument("graph", nargs="?", help="lazy selector, e.g. grandfather:3, tree:4, forget:z2, line")
    s.add_argument("--lazy", help="same as the positional selector")
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lookahead", type=int, default=1)
    s.add_argument("--budget", type=int)
    s.add_argument("--out")

    s = add("ball", cmd_ball, "extract the r-ball at the root")
    s.add_argument("graph", nargs="?", help="lazy selector or graph file")
    s.add_argument("--lazy", help="same as the positional selector")
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--out")

    s = add("verify", cmd_verify, "validate a .sg Schreier structure")
    s.add_argument("input")

    s = add("subgroup", cmd_subgroup, "subgroup <-> Schreier graph")
    s.add_argument("input", nargs="?")
    s.add_argument("--gens", help="comma-separated words, builds the core graph")
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--member", help="word to test for membership")
    s.add_argument("--out")

    s = add("estimate", cmd_estimate, "cylinder measure of a random model")
    s.add_argument("--model", required=True, help="reversal:<source>:<i>:p=<p> or dirac:<source>")
    s.add_argument("--radius", type=int, default=1)
    s.add_argument("-N", "--n", type=int, default=10**4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact", action="store_true", help="enumerate coin patterns instead of sampling")
    s.add_argument("--out")

    s = add("check-unimodular", cmd_check_unimodular, "orbit-weighted root-swap test")
    s.add_argument("graph", nargs="?", help="graph file, lazy selector, or measure JSON")
    s.add_argument("--measure", help="measure JSON instead of a graph")
    s.add_argument("--radius", type=int, help="check radius (default 1, or one below a measure's radius)")
    s.add_argument("--root", choices=["uniform", "dirac"], default="uniform")

    s = add("check-shift", cmd_check_shift, "root-shift invariance of a sampler")
    s.add_argument("--model", required=True)
    s.add_argument("--word", required=True, help='e.g. "a1" or "a2^-1"')
    s.add_argument("--radius", type=int, default=1)
    s.add_argument("-N", "--n", type=int, default=10**4)
    s.add_argument("--seed", type=int, default=0)

    s = add("witness", cmd_witness, "word in exactly one of two subgroups")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--max-len", type=int, default=8)

    s = add("count-reversals", cmd_count_reversals, "distinct graphs among a_i-cycle reversals")
    s.add_argument("input")
    s.add_argument("--i", type=int, default=1)

    s = add("sofic-lift", cmd_sofic_lift, "TV distances along a sequence of labeled finite graphs")
    s.add_argument("inputs", nargs="*")
    s.add_argument("--cycles", default="8,16,32,64,128", help="cycle lengths used when no inputs are given")
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)

    s = add("export-dot", cmd_export_dot, "Graphviz DOT export")
    s.add_argument("input")
    s.add_argument("--out")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    out = _Out(args.json)
    code = 0
    try:
        code = args.fn(args, out) or 0
    except (GraphFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExhausted as exc:
        print(f"error: {exc} (nodes {exc.nodes}, deepest radius {exc.deepest})", file=sys.stderr)
        return 3
    except (PreconditionError, SizeLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchreierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.flush()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
