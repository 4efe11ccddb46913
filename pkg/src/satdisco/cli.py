"""Command-line entry point.

    satdisco discover  --relations r.txt --nodes "x y z"   statuses from a relation list
    satdisco discover  --graph g.txt --passive            statuses from a known graph
    satdisco oracle    --graph g.txt --passive            the graph's relations
    satdisco encode    --relations r.txt                  DIMACS of the working formula
    satdisco query     --formula f.json "exactly(x->y)"   always-true / always-false / contingent
    satdisco verify    --n 3 --instances 20               discovery vs. brute-force consensus
    satdisco simulate  scaling|identifiability|assumptions

Exit codes: 0 success, 1 usage or input error, 2 contradiction (UNSAT).
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import random
import sys
from typing import List, Optional, Sequence

from satdisco import bruteforce, experiments
from satdisco.cnf import write_dimacs
from satdisco.discovery import (
    Contradiction,
    DiscoveryConfig,
    DiscoveryResult,
    GraphOracle,
    RelationListOracle,
    run,
)
from satdisco.encoder import Encoder, dump_state, load_state
from satdisco.formats import (
    FormatError,
    Knowledge,
    format_relations,
    parse_experiments,
    parse_graph,
    parse_knowledge,
    parse_relations,
)
from satdisco.graph import (
    MixedGraph,
    Relation,
    oracle_relations,
    passive_experiment,
    random_experiments,
    random_graph,
)
from satdisco.query import QueryError, query
from satdisco.sat import SolverError, make_backend

log = logging.getLogger("satdisco")

EXIT_OK, EXIT_USAGE, EXIT_UNSAT = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        if sys.stdin.isatty():
            raise UsageError("no input file given and stdin is a terminal")
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _backend(text: Optional[str]) -> Optional[str]:
    if text is None or text in ("embedded", "minisat") or text.startswith("external:"):
        return text
    raise argparse.ArgumentTypeError("backend must be embedded, minisat or external:PATH")


def _names(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    names = text.replace(",", " ").split()
    if len(set(names)) != len(names):
        raise UsageError("--nodes lists a name twice")
    return names


def _knowledge(args, names) -> Knowledge:
    k = parse_knowledge(_read(args.know), names) if args.know else Knowledge()
    for a in args.assume or ():
        if a not in k.assumptions:
            k.assumptions.append(a)
    return k


def _config(args, names) -> DiscoveryConfig:
    k = _knowledge(args, names)
    return DiscoveryConfig(
        max_c=args.max_c,
        acyclic="acyclic" in k.assumptions,
        no_latents="no-latents" in k.assumptions,
        background=k.constraints,
        track_ancestral=args.ancestral,
        backend=args.backend,
    )


def _experiments(args, g: MixedGraph):
    chosen = [bool(args.passive), bool(args.experiments), args.random_experiments is not None]
    if sum(chosen) > 1:
        raise UsageError("choose one of --passive, --experiments, --random-experiments")
    if args.experiments:
        return parse_experiments(_read(args.experiments), g.names)
    if args.random_experiments is not None:
        return random_experiments(g.n, args.random_experiments, random.Random(args.seed))
    return [passive_experiment(g.n)]


def _relation_oracle(args):
    names = _names(args.nodes)
    relations, names = parse_relations(_read(args.relations), names)
    return RelationListOracle(relations, names)


def _oracle(args):
    if getattr(args, "graph", None):
        g = parse_graph(_read(args.graph))
        return GraphOracle(g, _experiments(args, g))
    return _relation_oracle(args)


def format_result(result: DiscoveryResult, footer: bool = True) -> str:
    names = result.names
    lines = [f"{kind} {names[x]} {names[y]} {st.value}" for kind, (x, y), st in result.solution.items()]
    if footer:
        summary = result.summary()
        lines.append("# " + " ".join(f"{k}={summary[k]}" for k in sorted(summary) if not k.startswith("sat_")))
        sat = {k: v for k, v in summary.items() if k.startswith("sat_")}
        if sat:
            lines.append("# " + " ".join(f"{k}={v}" for k, v in sorted(sat.items())))
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------------


def cmd_discover(args) -> int:
    oracle = _oracle(args)
    cfg = _config(args, oracle.names)
    result = run(oracle, cfg)
    with _output(args.out) as out:
        out.write(format_result(result, footer=not args.no_summary))
    if args.save_formula:
        with open(args.save_formula, "w") as fh:
            json.dump(dump_state(result.encoder, result.names), fh)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = parse_graph(_read(args.graph))
    exps = _experiments(args, g)
    rels = oracle_relations(g, exps, max_c=args.max_c)
    with _output(args.out) as out:
        out.write(format_relations(rels, g.names))
    return EXIT_OK


def _encode_relations(args):
    oracle = _relation_oracle(args)
    if oracle.conflicting:
        raise Contradiction("the relation list asserts both polarities for the same test")
    k = _knowledge(args, oracle.names)
    enc = Encoder(oracle.n)
    if "no-latents" in k.assumptions:
        enc.constrain_sufficiency()
    if "acyclic" in k.assumptions:
        enc.constrain_acyclicity()
    for c in k.constraints:
        enc.add_background(c)
    for t, ans in oracle.answers.items():
        if args.max_c is None or len(t.cond) <= args.max_c:
            enc.encode_relation(Relation(t, ans))
    return enc, oracle.names


def cmd_encode(args) -> int:
    enc, names = _encode_relations(args)
    comments = [f"{kind} {names[x]} {names[y]} = {v}"
                for (kind, x, y), v in _edge_keys(enc)]
    with _output(args.out) as out:
        write_dimacs(enc.formula, out, comments)
    if args.save_formula:
        with open(args.save_formula, "w") as fh:
            json.dump(dump_state(enc, names), fh)
    return EXIT_OK


def _edge_keys(enc: Encoder):
    for x, y in enc.ordered_pairs():
        yield ("dir", x, y), enc.dir_var(x, y)
    for x, y in enc.unordered_pairs():
        yield ("bidir", x, y), enc.bidir_var(x, y)


def cmd_query(args) -> int:
    if args.formula:
        with open(args.formula) as fh:
            enc, names = load_state(json.load(fh))
    else:
        enc, names = _encode_relations(args)
    solver = make_backend(args.backend, enc.formula.clauses)
    enc.formula.listeners.append(solver.add_clauses)
    if not solver.solve_under([]).satisfiable:
        raise Contradiction("the working formula is unsatisfiable")
    with _output(args.out) as out:
        for text in args.expression:
            out.write(f"{query(enc, solver, text, names)}\t{text}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    """Cross-check discovery against brute-force consensus on random small instances."""
    if not 2 <= args.n <= bruteforce.MAX_ENUM_NODES:
        raise UsageError(f"--n must lie in 2..{bruteforce.MAX_ENUM_NODES}")
    rng = random.Random(args.seed)
    assumptions = set(args.assume or ())
    failures = 0
    with _output(args.out) as out:
        for i in range(args.instances):
            g = random_graph(args.n, args.edge_prob, rng)
            if "acyclic" in assumptions and not g.is_acyclic():
                g = MixedGraph(g.names, frozenset((a, b) for a, b in g.directed if a < b), g.bidirected)
            if "no-latents" in assumptions:
                g = MixedGraph(g.names, g.directed, frozenset())
            exps = random_experiments(args.n, args.n_experiments, rng)
            cfg = DiscoveryConfig(
                acyclic="acyclic" in assumptions,
                no_latents="no-latents" in assumptions,
                backend=args.backend,
            )
            res = run(GraphOracle(g, exps), cfg)
            rels = oracle_relations(g, exps)
            ref = bruteforce.consensus(rels, args.n, cfg.acyclic, cfg.no_latents)
            ok = list(ref.items()) == list(res.solution.items())
            failures += not ok
            out.write(f"instance {i}\t{'ok' if ok else 'MISMATCH'}\n")
        out.write(f"# instances={args.instances} mismatches={failures}\n")
    return EXIT_OK if failures == 0 else EXIT_USAGE


def cmd_simulate(args) -> int:
    if args.study == "scaling":
        ns = args.n or [5, 6, 7, 8]
        rows = experiments.run_scaling(
            ns, args.instances, max_c=args.max_c if args.max_c is not None else 2,
            seed=args.seed, timeout=args.timeout_sec, backend=args.backend,
        )
    elif args.study == "identifiability":
        rows, _ = experiments.run_identifiability(
            (args.n or [6])[0], args.instances, seed=args.seed, backend=args.backend
        )
    else:
        rows = experiments.run_assumption_comparison(
            (args.n or [5])[0], args.instances, seed=args.seed, backend=args.backend
        )
    with _output(args.out) as out:
        out.write(experiments.format_table(rows))
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="satdisco", description="SAT-based causal structure discovery")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, relations=True, graph=False):
        sp.add_argument("--max-c", type=int, default=None, help="largest conditioning set used")
        sp.add_argument("--assume", action="append", choices=["acyclic", "no-latents"])
        sp.add_argument("--know", metavar="FILE", help="background knowledge file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--backend", type=_backend, default=None,
                        help="embedded, minisat or external:PATH (default: minisat when available)")
        sp.add_argument("--out", metavar="FILE")
        if relations:
            sp.add_argument("--relations", metavar="FILE", help="relation list (default: stdin)")
            sp.add_argument("--nodes", help="node universe, e.g. \"x y z\"")
        if graph:
            _graph_args(sp)

    d = sub.add_parser("discover", help="edge statuses from relations or a known graph")
    common(d, graph=True)
    d.add_argument("--ancestral", action="store_true", help="also report ancestral statuses")
    d.add_argument("--save-formula", metavar="FILE", help="write the final formula as JSON")
    d.add_argument("--no-summary", action="store_true")
    d.set_defaults(func=cmd_discover)

    o = sub.add_parser("oracle", help="d-separation relations of a graph")
    o.add_argument("--max-c", type=int, default=None)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", metavar="FILE")
    _graph_args(o, required=True)
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("encode", help="DIMACS CNF for a relation list")
    common(e)
    e.add_argument("--save-formula", metavar="FILE")
    e.set_defaults(func=cmd_encode)

    q = sub.add_parser("query", help="classify structural queries")
    common(q)
    q.add_argument("--formula", metavar="FILE", help="formula saved by discover/encode")
    q.add_argument("expression", nargs="+")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="cross-check against brute-force consensus")
    v.add_argument("--n", type=int, default=3)
    v.add_argument("--instances", type=int, default=10)
    v.add_argument("--edge-prob", type=float, default=0.3)
    v.add_argument("--n-experiments", type=int, default=3)
    v.add_argument("--assume", action="append", choices=["acyclic", "no-latents"])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--backend", type=_backend, default=None)
    v.add_argument("--out", metavar="FILE")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="simulation studies, tab-separated output")
    s.add_argument("study", choices=["scaling", "identifiability", "assumptions"])
    s.add_argument("--n", type=int, action="append", help="node count (repeatable for scaling)")
    s.add_argument("--instances", type=int, default=20)
    s.add_argument("--max-c", type=int, default=None, help="cap for the scaling comparison (default 2)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timeout-sec", type=float, default=None)
    s.add_argument("--backend", type=_backend, default=None)
    s.add_argument("--out", metavar="FILE")
    s.set_defaults(func=cmd_simulate)
    return p


def _graph_args(sp, required=False):
    sp.add_argument("--graph", metavar="FILE", required=required, help="graph file")
    sp.add_argument("--passive", action="store_true", help="one passive experiment over all nodes")
    sp.add_argument("--experiments", metavar="FILE", help="experiment list")
    sp.add_argument("--random-experiments", type=int, metavar="K", help="K random experiments (uses --seed)")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except Contradiction as exc:
        print(f"UNSAT: contradiction: {exc}", file=sys.stderr)
        return EXIT_UNSAT
    except (FormatError, QueryError, UsageError, KeyError, ValueError, OSError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
