"""The discovery loop: test selection, encoding, and backbone-driven statuses."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from satdisco.encoder import BackgroundConstraint, Encoder
from satdisco.graph import (
    Experiment,
    MixedGraph,
    Relation,
    TestSpec,
    d_connected,
    iter_specs,
    manipulate,
)
from satdisco.sat import Backend, Unsatisfiable, backbone, make_backend

log = logging.getLogger(__name__)


class Status(str, Enum):
    PRESENT = "present"
    ABSENT = "absent"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


class Contradiction(Exception):
    """The supplied relations and assumptions admit no graph."""


class StatusConflict(RuntimeError):
    """A determinate status was asked to flip; indicates a bug, never bad input."""


@dataclass
class EdgeSolution:
    n: int
    directed: Dict[Tuple[int, int], Status] = field(default_factory=dict)
    bidirected: Dict[Tuple[int, int], Status] = field(default_factory=dict)
    ancestral: Dict[Tuple[int, int], Status] = field(default_factory=dict)

    @classmethod
    def unknown(cls, n: int, ancestral: bool = True) -> "EdgeSolution":
        s = cls(n)
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                s.directed[(x, y)] = Status.UNKNOWN
                if ancestral:
                    s.ancestral[(x, y)] = Status.UNKNOWN
                if x < y:
                    s.bidirected[(x, y)] = Status.UNKNOWN
        return s

    def set(self, kind: str, pair: Tuple[int, int], status: Status) -> None:
        table = getattr(self, kind)
        old = table[pair]
        if old != Status.UNKNOWN and old != status:
            raise StatusConflict(f"{kind} {pair} would change from {old} to {status}")
        table[pair] = status

    def items(self):
        for pair, st in sorted(self.directed.items()):
            yield "dir", pair, st
        for pair, st in sorted(self.bidirected.items()):
            yield "bidir", pair, st
        for pair, st in sorted(self.ancestral.items()):
            yield "anc", pair, st

    def edge_items(self):
        return [item for item in self.items() if item[0] != "anc"]

    def determinate(self) -> Dict[Tuple[str, Tuple[int, int]], Status]:
        return {(k, p): st for k, p, st in self.items() if st != Status.UNKNOWN}

    def fully_determined(self) -> bool:
        return all(st != Status.UNKNOWN for _, _, st in self.edge_items())

    def graphs(self, names: Sequence[str]) -> Tuple[MixedGraph, MixedGraph]:
        """(G1, G2): determined edges only, and determined plus undetermined edges."""
        g1_d = {p for p, st in self.directed.items() if st == Status.PRESENT}
        g2_d = {p for p, st in self.directed.items() if st != Status.ABSENT}
        g1_b = {p for p, st in self.bidirected.items() if st == Status.PRESENT}
        g2_b = {p for p, st in self.bidirected.items() if st != Status.ABSENT}
        names = tuple(names)
        return (
            MixedGraph(names, frozenset(g1_d), frozenset(g1_b)),
            MixedGraph(names, frozenset(g2_d), frozenset(g2_b)),
        )

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for kind, _, st in self.items():
            out[f"{kind}_{st.value}"] = out.get(f"{kind}_{st.value}", 0) + 1
        return out


@dataclass
class DiscoveryConfig:
    max_c: Optional[int] = None
    acyclic: bool = False
    no_latents: bool = False
    background: List[BackgroundConstraint] = field(default_factory=list)
    track_ancestral: bool = True
    backend: Optional[str] = None
    skip_unreachable: bool = True
    backbone_filtering: bool = True


# -- oracles ---------------------------------------------------------------------


class GraphOracle:
    """Answers every test available from the experiments using a known graph."""

    complete = True

    def __init__(self, graph: MixedGraph, experiments: Sequence[Experiment]):
        for e in experiments:
            for v in e.observed:
                if not 0 <= v < graph.n:
                    raise KeyError(f"experiment mentions unknown node {v}")
        self.graph = graph
        self.experiments = list(experiments)
        self.names = graph.names
        self.n = graph.n
        self.queries = 0

    def max_level(self) -> int:
        return max((len(e.observed) - 2 for e in self.experiments), default=-1)

    def candidates(self, c: int) -> List[TestSpec]:
        return enumerate_candidates(self.experiments, c)

    def answer(self, t: TestSpec) -> Optional[bool]:
        self.queries += 1
        return d_connected(self.graph, t)


class RelationListOracle:
    """A fixed set of relations over an explicit node universe."""

    complete = False

    def __init__(self, relations: Sequence[Relation], names: Sequence[str]):
        self.names = tuple(names)
        self.n = len(self.names)
        self.answers: Dict[TestSpec, bool] = {}
        self.conflicting: List[TestSpec] = []
        for r in relations:
            for v in r.spec.involved:
                if not 0 <= v < self.n:
                    raise KeyError(f"relation mentions unknown node {v}")
            prev = self.answers.get(r.spec)
            if prev is not None and prev != r.connected:
                self.conflicting.append(r.spec)
            self.answers.setdefault(r.spec, r.connected)
        self.queries = 0

    def max_level(self) -> int:
        return max((len(t.cond) for t in self.answers), default=-1)

    def candidates(self, c: int) -> List[TestSpec]:
        return sorted((t for t in self.answers if len(t.cond) == c), key=TestSpec.sort_key)

    def answer(self, t: TestSpec) -> Optional[bool]:
        self.queries += 1
        return self.answers.get(t)


def enumerate_candidates(experiments: Sequence[Experiment], c: int) -> List[TestSpec]:
    if c < 0:
        raise ValueError("conditioning-set size must be non-negative")
    return list(iter_specs(experiments, size=c))


# -- pruning ---------------------------------------------------------------------


def _component(g: MixedGraph, start: int) -> set:
    nbrs = [set() for _ in range(g.n)]
    for a, b in g.directed | g.bidirected:
        nbrs[a].add(b)
        nbrs[b].add(a)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in nbrs[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def prune_tests(
    s: EdgeSolution,
    candidates: Sequence[TestSpec],
    names: Optional[Sequence[str]] = None,
    skip_unreachable: bool = True,
) -> Tuple[List[Relation], List[TestSpec]]:
    """Split candidates into relations already implied by ``s`` and open tests.

    A connection in the sparsest consistent graph holds in every consistent
    graph, and a separation in the densest one does too. With
    ``skip_unreachable`` a test is dropped when some conditioning node lies
    outside the (manipulated) densest graph's component of x or of y; such a
    node cannot sit on a connecting walk, so the test repeats a smaller one.
    """
    names = names if names is not None else tuple(f"v{i}" for i in range(s.n))
    g1, g2 = s.graphs(names)
    determined, open_ = [], []
    comp_cache: Dict[Tuple[frozenset, int], set] = {}
    for t in candidates:
        if d_connected(g1, t):
            determined.append(Relation(t, True))
            continue
        if not d_connected(g2, t):
            determined.append(Relation(t, False))
            continue
        if skip_unreachable and t.cond:
            key_x, key_y = (t.interv, t.x), (t.interv, t.y)
            if key_x not in comp_cache or key_y not in comp_cache:
                m = manipulate(g2, t.interv)
                comp_cache.setdefault(key_x, _component(m, t.x))
                comp_cache.setdefault(key_y, _component(m, t.y))
            cx, cy = comp_cache[key_x], comp_cache[key_y]
            if any(z not in cx or z not in cy for z in t.cond):
                continue
        open_.append(t)
    return determined, open_


# -- the loop ---------------------------------------------------------------------


@dataclass
class LevelStats:
    c: int
    candidates: int = 0
    pruned: int = 0
    skipped: int = 0
    encoded: int = 0
    unavailable: int = 0
    backbone_calls: int = 0
    seconds: float = 0.0


@dataclass
class DiscoveryResult:
    solution: EdgeSolution
    encoder: Encoder
    solver: Backend
    names: Tuple[str, ...]
    levels: List[LevelStats] = field(default_factory=list)
    encoded: List[Relation] = field(default_factory=list)
    seconds: float = 0.0

    def summary(self) -> Dict[str, object]:
        out: Dict[str, object] = dict(self.solution.counts())
        out["relations_encoded"] = len(self.encoded)
        out["tests_pruned"] = sum(l.pruned for l in self.levels)
        out["tests_skipped"] = sum(l.skipped for l in self.levels)
        out["backbone_calls"] = sum(l.backbone_calls for l in self.levels)
        out["variables"] = self.encoder.table.count
        out["clauses"] = len(self.encoder.formula)
        out["seconds"] = round(self.seconds, 3)
        out.update({f"sat_{k}": v for k, v in self.solver.stats().items()})
        return out


class _Run:
    def __init__(self, n: int, names, cfg: DiscoveryConfig):
        self.cfg = cfg
        self.names = tuple(names)
        self.enc = Encoder(n)
        self.solver = make_backend(cfg.backend)
        self.enc.formula.listeners.append(self.solver.add_clauses)
        self.solution = EdgeSolution.unknown(n, cfg.track_ancestral)
        self.items: Dict[int, Tuple[str, Tuple[int, int]]] = {}
        for x, y in self.enc.ordered_pairs():
            self.items[self.enc.dir_var(x, y)] = ("directed", (x, y))
        for x, y in self.enc.unordered_pairs():
            self.items[self.enc.bidir_var(x, y)] = ("bidirected", (x, y))

    def setup(self) -> None:
        enc = self.enc
        if self.cfg.no_latents:
            enc.constrain_sufficiency()
        if self.cfg.acyclic:
            enc.constrain_acyclicity()
        for k in self.cfg.background:
            enc.add_background(k)
        if self.cfg.track_ancestral:
            for x, y in enc.ordered_pairs():
                self.items[enc.ancestral_var(x, y)] = ("ancestral", (x, y))

    def refresh(self) -> int:
        """Backbone over the still-unknown items; returns solver calls used."""
        open_vars = [
            v for v, (kind, pair) in self.items.items()
            if getattr(self.solution, kind)[pair] == Status.UNKNOWN
        ]
        if not open_vars:
            if not self.solver.solve_under([]).satisfiable:
                raise Contradiction("the encoded relations are unsatisfiable")
            return 1
        try:
            bb = backbone(self.solver, open_vars, filtering=self.cfg.backbone_filtering)
        except Unsatisfiable:
            raise Contradiction("the encoded relations are unsatisfiable") from None
        units = []
        for v, pol in sorted(bb.fixed.items()):
            kind, pair = self.items[v]
            self.solution.set(kind, pair, Status.PRESENT if pol else Status.ABSENT)
            units.append((v if pol else -v,))
        if units:
            self.enc.formula.extend(units)
        return bb.solver_calls


def run(oracle, cfg: Optional[DiscoveryConfig] = None) -> DiscoveryResult:
    """Discover edge (and ancestral) statuses from the oracle's relations.

    Raises :class:`Contradiction` when the relations, assumptions and
    background knowledge cannot all hold in one graph.
    """
    cfg = cfg or DiscoveryConfig()
    n = oracle.n
    if n < 2:
        raise ValueError("need at least two nodes")
    if cfg.max_c is not None and cfg.max_c > n - 2:
        raise ValueError(f"max_c must be at most {n - 2}")
    if getattr(oracle, "conflicting", None):
        raise Contradiction("the relation list asserts both polarities for the same test")
    start = time.perf_counter()
    state = _Run(n, oracle.names, cfg)
    state.setup()
    result = DiscoveryResult(state.solution, state.enc, state.solver, state.names)
    if len(state.enc.formula):
        state.refresh()
    top = oracle.max_level()
    if cfg.max_c is not None:
        top = min(top, cfg.max_c)
    # the reduction of a test to a smaller one needs the smaller one to be available
    skip = cfg.skip_unreachable and oracle.complete
    for c in range(top + 1):
        t0 = time.perf_counter()
        stats = LevelStats(c)
        specs = oracle.candidates(c)
        stats.candidates = len(specs)
        determined, open_ = prune_tests(state.solution, specs, state.names, skip)
        stats.pruned = len(determined)
        if not oracle.complete:
            # a supplied relation can disagree with what the formula already implies
            for r in determined:
                given = oracle.answer(r.spec)
                if given is not None and given != r.connected:
                    raise Contradiction(
                        f"relation {'con' if given else 'sep'} {r.spec} contradicts the formula"
                    )
        stats.skipped = len(specs) - len(determined) - len(open_)
        answered = []
        for t in open_:
            ans = oracle.answer(t)
            if ans is None:
                stats.unavailable += 1
                continue
            answered.append(Relation(t, ans))
        for r in answered:
            state.enc.encode_relation(r)
        result.encoded.extend(answered)
        stats.encoded = len(answered)
        if answered:
            stats.backbone_calls = state.refresh()
        stats.seconds = time.perf_counter() - t0
        result.levels.append(stats)
        log.debug("level %d: %s", c, stats)
        if state.solution.fully_determined() and not cfg.track_ancestral:
            break
        if state.solution.fully_determined() and all(
            st != Status.UNKNOWN for st in state.solution.ancestral.values()
        ):
            break
    result.seconds = time.perf_counter() - start
    return result


def run_relations(
    relations: Sequence[Relation], names: Sequence[str], cfg: Optional[DiscoveryConfig] = None
) -> DiscoveryResult:
    return run(RelationListOracle(relations, names), cfg)


def run_graph(
    graph: MixedGraph, experiments: Sequence[Experiment], cfg: Optional[DiscoveryConfig] = None
) -> DiscoveryResult:
    return run(GraphOracle(graph, experiments), cfg)


def open_relations(result: DiscoveryResult, specs: Sequence[TestSpec]) -> List[TestSpec]:
    """Specs whose d-connection status is not fixed by the final formula.

    Pruning against the final statuses settles most of them; the rest are
    checked directly against the solver.
    """
    _, open_ = prune_tests(result.solution, specs, result.names, skip_unreachable=False)
    undecided = []
    for t in open_:
        v = result.encoder.relation_var(t)
        if result.solver.solve_under([v]).satisfiable and result.solver.solve_under([-v]).satisfiable:
            undecided.append(t)
    return undecided
