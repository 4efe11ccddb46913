"""Directed mixed graphs, interventional d-connection, and random instances.

Nodes are dense integer indices ``0..n-1``; names are carried only for I/O.
Edge marks are ``TAIL`` / ``HEAD``: a directed edge ``x -> y`` has a tail at
``x`` and a head at ``y``; a bidirected edge has heads at both ends.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

TAIL = 0
HEAD = 1

NodeSet = FrozenSet[int]


def _default_names(n: int) -> Tuple[str, ...]:
    return tuple(f"v{i}" for i in range(n))


@dataclass(frozen=True)
class MixedGraph:
    """Directed edges as ordered pairs, bidirected edges as pairs with ``i < j``."""

    names: Tuple[str, ...]
    directed: FrozenSet[Tuple[int, int]] = frozenset()
    bidirected: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise ValueError("node names must be unique")
        object.__setattr__(self, "directed", frozenset(self.directed))
        object.__setattr__(
            self, "bidirected", frozenset((min(e), max(e)) for e in self.bidirected)
        )
        for x, y in itertools.chain(self.directed, self.bidirected):
            if x == y:
                raise ValueError(f"self-loop at {self.names[x]!r}")
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"edge ({x}, {y}) outside node range")

    @classmethod
    def empty(cls, n: int, names: Optional[Sequence[str]] = None) -> "MixedGraph":
        return cls(tuple(names) if names is not None else _default_names(n))

    @classmethod
    def from_edges(
        cls,
        names: Sequence[str],
        directed: Iterable[Tuple[str, str]] = (),
        bidirected: Iterable[Tuple[str, str]] = (),
    ) -> "MixedGraph":
        idx = {name: i for i, name in enumerate(names)}
        return cls(
            tuple(names),
            frozenset((idx[a], idx[b]) for a, b in directed),
            frozenset((idx[a], idx[b]) for a, b in bidirected),
        )

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown node {name!r}") from None

    def has_directed(self, x: int, y: int) -> bool:
        return (x, y) in self.directed

    def has_bidirected(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self.bidirected

    def without_edge(self, kind: str, x: int, y: int) -> "MixedGraph":
        if kind == "->":
            return MixedGraph(self.names, self.directed - {(x, y)}, self.bidirected)
        return MixedGraph(self.names, self.directed, self.bidirected - {(min(x, y), max(x, y))})

    def incident(self) -> List[List[Tuple[int, int, int]]]:
        """Per node, the list of ``(neighbour, mark_here, mark_there)`` edge ends."""
        adj: List[List[Tuple[int, int, int]]] = [[] for _ in range(self.n)]
        for x, y in sorted(self.directed):
            adj[x].append((y, TAIL, HEAD))
            adj[y].append((x, HEAD, TAIL))
        for x, y in sorted(self.bidirected):
            adj[x].append((y, HEAD, HEAD))
            adj[y].append((x, HEAD, HEAD))
        return adj

    def is_acyclic(self) -> bool:
        children = [[] for _ in range(self.n)]
        indeg = [0] * self.n
        for x, y in self.directed:
            children[x].append(y)
            indeg[y] += 1
        stack = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    stack.append(c)
        return seen == self.n

    def ancestors_of(self, y: int) -> NodeSet:
        """Nodes with a directed path (length >= 1) into ``y``."""
        parents = [[] for _ in range(self.n)]
        for a, b in self.directed:
            parents[b].append(a)
        found = set()
        stack = list(parents[y])
        while stack:
            v = stack.pop()
            if v in found:
                continue
            found.add(v)
            stack.extend(parents[v])
        return frozenset(found)

    def is_ancestor(self, x: int, y: int) -> bool:
        return x in self.ancestors_of(y)


@dataclass(frozen=True)
class Experiment:
    """Nodes measured in one data set; ``intervened`` is randomized, the rest observed."""

    observed: NodeSet
    intervened: NodeSet = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "observed", frozenset(self.observed))
        object.__setattr__(self, "intervened", frozenset(self.intervened))
        if not self.intervened <= self.observed:
            raise ValueError("intervened nodes must be a subset of the experiment's nodes")

    @property
    def passive(self) -> NodeSet:
        return self.observed - self.intervened


@dataclass(frozen=True, order=True)
class TestSpec:
    """The test ``x _||_ y | cond || interv``; stored with ``x < y``."""

    __test__ = False  # keep pytest from collecting this class

    x: int
    y: int
    cond: NodeSet = field(default=frozenset())
    interv: NodeSet = field(default=frozenset())

    def __post_init__(self):
        x, y = self.x, self.y
        if x == y:
            raise ValueError("a test needs two distinct nodes")
        if x > y:
            object.__setattr__(self, "x", y)
            object.__setattr__(self, "y", x)
        object.__setattr__(self, "cond", frozenset(self.cond))
        object.__setattr__(self, "interv", frozenset(self.interv))
        if x in self.cond or y in self.cond:
            raise ValueError("tested nodes may not be in the conditioning set")

    @property
    def involved(self) -> NodeSet:
        return self.cond | self.interv | {self.x, self.y}

    @property
    def cond_meets_interv(self) -> bool:
        return bool(self.cond & self.interv)

    def sort_key(self):
        return (len(self.cond), sorted(self.interv), self.x, self.y, sorted(self.cond))


@dataclass(frozen=True)
class Relation:
    spec: TestSpec
    connected: bool

    @classmethod
    def sep(cls, x: int, y: int, cond=(), interv=()) -> "Relation":
        return cls(TestSpec(x, y, frozenset(cond), frozenset(interv)), False)

    @classmethod
    def con(cls, x: int, y: int, cond=(), interv=()) -> "Relation":
        return cls(TestSpec(x, y, frozenset(cond), frozenset(interv)), True)


def _check_nodes(g: MixedGraph, nodes: Iterable[int]) -> None:
    for v in nodes:
        if not 0 <= v < g.n:
            raise KeyError(f"unknown node index {v}")


def manipulate(g: MixedGraph, j: Iterable[int]) -> MixedGraph:
    """Remove every edge with an arrowhead at an intervened node."""
    j = frozenset(j)
    _check_nodes(g, j)
    directed = frozenset((a, b) for a, b in g.directed if b not in j)
    bidirected = frozenset((a, b) for a, b in g.bidirected if a not in j and b not in j)
    return MixedGraph(g.names, directed, bidirected)


def d_connected(g: MixedGraph, t: TestSpec) -> bool:
    """Reachability over (node, mark at node) states of the manipulated graph."""
    _check_nodes(g, t.involved)
    adj = manipulate(g, t.interv).incident()
    cond = t.cond
    start, goal = t.x, t.y
    seen = set()
    stack: List[Tuple[int, int]] = []
    for v, _, mark_v in adj[start]:
        if v == goal:
            return True
        stack.append((v, mark_v))
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        u, mark_in = state
        in_cond = u in cond
        for v, mark_out, mark_v in adj[u]:
            collider = mark_in == HEAD and mark_out == HEAD
            if collider != in_cond:
                continue
            if v == goal:
                return True
            stack.append((v, mark_v))
    return False


def max_path_length(n: int, t: TestSpec) -> int:
    """Longest walk length that has to be considered for test ``t`` on ``n`` nodes."""
    if n < 2:
        raise ValueError("need at least two nodes")
    bound = 2 * n - len(t.involved) - 1
    if n >= 3:
        bound = min(bound, 2 * n - 4)
    return max(bound, 1)


def random_graph(n: int, edge_prob: float, rng: random.Random, names=None) -> MixedGraph:
    """Independent edge draws: directed pairs in (i, j) order first, then bidirected."""
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")
    directed = [
        (i, j) for i in range(n) for j in range(n) if i != j and rng.random() < edge_prob
    ]
    bidirected = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob
    ]
    return MixedGraph(
        tuple(names) if names is not None else _default_names(n),
        frozenset(directed),
        frozenset(bidirected),
    )


def random_experiments(n: int, k: int, rng: random.Random) -> List[Experiment]:
    """Each node is intervened / observed / unobserved with probability 1/3 each."""
    if k < 1:
        raise ValueError("need at least one experiment")
    out = []
    for _ in range(k):
        observed, intervened = set(), set()
        for v in range(n):
            role = rng.randrange(3)
            if role == 0:
                observed.add(v)
                intervened.add(v)
            elif role == 1:
                observed.add(v)
        out.append(Experiment(frozenset(observed), frozenset(intervened)))
    return out


def passive_experiment(n: int) -> Experiment:
    return Experiment(frozenset(range(n)))


def iter_specs(
    experiments: Sequence[Experiment], size: Optional[int] = None, max_c: Optional[int] = None
) -> Iterator[TestSpec]:
    """Test specs available from the experiments, deduplicated, in node-index order.

    ``size`` selects one conditioning-set size; ``max_c`` caps it instead.
    """
    seen = set()
    for exp in experiments:
        nodes = sorted(exp.observed)
        for x, y in itertools.combinations(nodes, 2):
            rest = [v for v in nodes if v != x and v != y]
            sizes = [size] if size is not None else range(len(rest) + 1)
            for c in sizes:
                if max_c is not None and c > max_c:
                    continue
                for cond in itertools.combinations(rest, c):
                    t = TestSpec(x, y, frozenset(cond), exp.intervened)
                    if t not in seen:
                        seen.add(t)
                        yield t


def oracle_relations(
    g: MixedGraph, experiments: Sequence[Experiment], max_c: Optional[int] = None
) -> List[Relation]:
    for exp in experiments:
        _check_nodes(g, exp.observed)
    specs = sorted(iter_specs(experiments, max_c=max_c), key=TestSpec.sort_key)
    return [Relation(t, d_connected(g, t)) for t in specs]
