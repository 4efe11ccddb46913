"""CNF encoding of d-connection over walks of bounded length.

Variable keys (all node sets are frozensets):

``("dir", x, y)``          edge x -> y
``("bidir", x, y)``        edge x <-> y, ``x < y``
``("rel", x, y, C, J)``    x and y d-connected given C under intervention J, ``x < y``
``("path", s, t, l, a, b, C, J)``
    a walk of exactly ``l`` edges from s to t in the graph manipulated by J,
    with mark ``a`` at s and ``b`` at t, on which every interior collider is
    in C and every interior non-collider is outside C.

Walk variables are generated lazily per target node ``t``: the recursion
peels the first edge ``s - z`` and recurses on ``z ... t``, so only walks
ending at a relation's second node are ever defined. Definitions for one
``(C, J)`` context are shared by all relations using it and never emitted
twice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from satdisco.cnf import CnfFormula, VarTable, add_equiv_disjunction
from satdisco.graph import HEAD, TAIL, MixedGraph, Relation, TestSpec, d_connected, max_path_length

MARKS = (TAIL, HEAD)
MARK_PAIRS = tuple(itertools.product(MARKS, MARKS))
EMPTY: FrozenSet[int] = frozenset()


@dataclass
class EncodingContext:
    cond: FrozenSet[int]
    interv: FrozenSet[int]
    # target node -> longest walk length defined so far
    lengths: Dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class BackgroundConstraint:
    """Prior knowledge. ``kind`` is one of ``edge``, ``bidir``, ``ancestral``
    or ``path``; paths are directed walks from ``x`` to ``y`` visiting
    ``waypoints`` in order with at most ``length`` edges."""

    kind: str
    x: int
    y: int
    present: bool = True
    waypoints: Tuple[int, ...] = ()
    length: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("edge", "bidir", "ancestral", "path"):
            raise ValueError(f"unknown background kind {self.kind!r}")
        if self.kind != "path" and (self.waypoints or self.length is not None):
            raise ValueError("waypoints and length apply to path constraints only")
        if self.x == self.y:
            raise ValueError("background constraints need two distinct nodes")


def dir_key(x: int, y: int):
    return ("dir", x, y)


def bidir_key(x: int, y: int):
    return ("bidir", min(x, y), max(x, y))


def rel_key(t: TestSpec):
    return ("rel", t.x, t.y, t.cond, t.interv)


def ancestral_spec(x: int, y: int) -> TestSpec:
    """Directed path x ~> y exists iff x, y are d-connected given nothing when x is intervened."""
    return TestSpec(x, y, EMPTY, frozenset({x}))


class Encoder:
    """Owns the variable table and working formula for one node universe."""

    def __init__(self, n: int, table: Optional[VarTable] = None, formula: Optional[CnfFormula] = None):
        if n < 2:
            raise ValueError("need at least two nodes")
        self.n = n
        self.table = table if table is not None else VarTable()
        self.formula = formula if formula is not None else CnfFormula()
        self.contexts: Dict[Tuple[FrozenSet[int], FrozenSet[int]], EncodingContext] = {}
        self._false: Set[int] = set()
        self._relations_defined: Set[int] = set()
        for x, y in self.ordered_pairs():
            self.table.var(dir_key(x, y))
        for x, y in self.unordered_pairs():
            self.table.var(bidir_key(x, y))

    # -- variable lookup ----------------------------------------------------

    def ordered_pairs(self):
        return [(x, y) for x in range(self.n) for y in range(self.n) if x != y]

    def unordered_pairs(self):
        return list(itertools.combinations(range(self.n), 2))

    def dir_var(self, x: int, y: int) -> int:
        return self.table.var(dir_key(x, y))

    def bidir_var(self, x: int, y: int) -> int:
        return self.table.var(bidir_key(x, y))

    def edge_vars(self) -> List[int]:
        return [self.dir_var(x, y) for x, y in self.ordered_pairs()] + [
            self.bidir_var(x, y) for x, y in self.unordered_pairs()
        ]

    def _check_nodes(self, nodes: Iterable[int]) -> None:
        for v in nodes:
            if not 0 <= v < self.n:
                raise KeyError(f"unknown node index {v}")

    def _context(self, cond, interv) -> EncodingContext:
        key = (frozenset(cond), frozenset(interv))
        ctx = self.contexts.get(key)
        if ctx is None:
            ctx = self.contexts[key] = EncodingContext(*key)
        return ctx

    # -- walk variables -----------------------------------------------------

    def _define(self, v: int, terms: List[List[int]]) -> None:
        terms = [t for t in terms if not any(lit in self._false for lit in t)]
        if not terms:
            self._false.add(v)
        add_equiv_disjunction(self.table, self.formula, v, terms)

    def _length1_terms(self, s: int, t: int, a: int, b: int, interv) -> List[List[int]]:
        if s == t:
            return []
        if a == TAIL and b == HEAD:
            return [] if t in interv else [[self.dir_var(s, t)]]
        if a == HEAD and b == TAIL:
            return [] if s in interv else [[self.dir_var(t, s)]]
        if a == HEAD and b == HEAD:
            return [] if s in interv or t in interv else [[self.bidir_var(s, t)]]
        return []

    def path_var(self, s: int, t: int, length: int, a: int, b: int, cond, interv) -> int:
        key = ("path", s, t, length, a, b, cond, interv)
        v = self.table.get(key)
        if v is not None:
            return v
        if length == 1:
            v = self.table.var(key)
            self._define(v, self._length1_terms(s, t, a, b, interv))
            return v
        terms = []
        for z in range(self.n):
            if z == s:
                continue
            if z in cond:
                # z must be a collider: heads on both sides
                combos = [(HEAD, HEAD)]
            else:
                combos = [(TAIL, None), (HEAD, TAIL)]
            for m_in, m_out in combos:
                first = self.path_var(s, z, 1, a, m_in, cond, interv)
                if first in self._false:
                    continue
                if m_out is None:
                    rest = self._any_start_var(z, t, length - 1, b, cond, interv)
                else:
                    rest = self.path_var(z, t, length - 1, m_out, b, cond, interv)
                if rest in self._false:
                    continue
                terms.append([first, rest])
        v = self.table.var(key)
        self._define(v, terms)
        return v

    def _any_start_var(self, s: int, t: int, length: int, b: int, cond, interv) -> int:
        """Walk s ... t of the given length leaving s by either mark."""
        key = ("path-any", s, t, length, b, cond, interv)
        v = self.table.get(key)
        if v is not None:
            return v
        terms = [[self.path_var(s, t, length, m, b, cond, interv)] for m in MARKS]
        v = self.table.var(key)
        self.table.definitions[v] = [tuple(term) for term in terms]
        self._define(v, terms)
        return v

    def _ensure_target(self, ctx: EncodingContext, t: int, l_max: int) -> None:
        done = ctx.lengths.get(t, 0)
        if done >= l_max:
            return
        for length in range(1, l_max + 1):
            for s in range(self.n):
                if s == t:
                    continue
                for a, b in MARK_PAIRS:
                    self.path_var(s, t, length, a, b, ctx.cond, ctx.interv)
        ctx.lengths[t] = l_max

    def encode_context(self, cond, interv, l_max: int) -> None:
        """Define every walk variable of the context up to ``l_max`` edges."""
        if l_max < 1:
            raise ValueError("l_max must be at least 1")
        cond, interv = frozenset(cond), frozenset(interv)
        self._check_nodes(cond | interv)
        ctx = self._context(cond, interv)
        for t in range(self.n):
            self._ensure_target(ctx, t, l_max)

    # -- relations ----------------------------------------------------------

    def relation_var(self, t: TestSpec) -> int:
        """Variable for the d-connection claim of ``t``, defined on first use."""
        self._check_nodes(t.involved)
        key = rel_key(t)
        v = self.table.var(key)
        if v in self._relations_defined:
            return v
        self._relations_defined.add(v)
        l_max = max_path_length(self.n, t)
        self._context(t.cond, t.interv)
        terms = []
        for length in range(1, l_max + 1):
            for a, b in MARK_PAIRS:
                terms.append([self.path_var(t.x, t.y, length, a, b, t.cond, t.interv)])
        self._define(v, terms)
        return v

    def encode_relation(self, r: Relation) -> int:
        v = self.relation_var(r.spec)
        self.formula.add((v if r.connected else -v,))
        return v

    def ancestral_var(self, x: int, y: int) -> int:
        return self.relation_var(ancestral_spec(x, y))

    # -- model-space restrictions and background knowledge ------------------

    def constrain_sufficiency(self) -> None:
        self.formula.extend([(-self.bidir_var(x, y),) for x, y in self.unordered_pairs()])

    def constrain_acyclicity(self) -> None:
        clauses = []
        for x, y in self.unordered_pairs():
            clauses.append((-self.ancestral_var(x, y), -self.ancestral_var(y, x)))
        self.formula.extend(clauses)

    def directed_walk_var(self, s: int, t: int, length: int) -> int:
        # with nothing conditioned, a walk leaving s by a tail and entering t
        # by a head has no colliders, so every edge on it points forward
        return self.path_var(s, t, length, TAIL, HEAD, EMPTY, EMPTY)

    def path_constraint_var(self, x: int, y: int, waypoints: Sequence[int], length: Optional[int]) -> int:
        stops = [x, *waypoints, y]
        self._check_nodes(stops)
        segments = len(stops) - 1
        if length is None:
            length = segments * (self.n - 1)
        if len(waypoints) > length - 1:
            raise ValueError(
                f"{len(waypoints)} waypoints cannot fit on a walk of at most {length} edges"
            )
        for u, w in zip(stops, stops[1:]):
            if u == w:
                raise ValueError("consecutive stops on a path must differ")
        key = ("path-knowledge", tuple(stops), length)
        existing = self.table.get(key)
        if existing is not None:
            return existing
        terms = []
        for split in itertools.product(range(1, length + 1), repeat=segments):
            if sum(split) > length:
                continue
            terms.append(
                [self.directed_walk_var(u, w, k) for (u, w), k in zip(zip(stops, stops[1:]), split)]
            )
        v = self.table.var(key)
        self.table.definitions[v] = [tuple(t) for t in terms]
        self._define(v, terms)
        return v

    def add_background(self, k: BackgroundConstraint) -> None:
        self._check_nodes([k.x, k.y, *k.waypoints])
        if k.kind == "edge":
            v = self.dir_var(k.x, k.y)
        elif k.kind == "bidir":
            v = self.bidir_var(k.x, k.y)
        elif k.kind == "ancestral":
            v = self.ancestral_var(k.x, k.y)
        else:
            v = self.path_constraint_var(k.x, k.y, k.waypoints, k.length)
        self.formula.add((v if k.present else -v,))


# -- semantic evaluation ----------------------------------------------------


class _WalkEvaluator:
    """Truth of walk variables in a concrete graph, straight from their meaning."""

    def __init__(self, g: MixedGraph):
        self.g = g
        self.cache: Dict[tuple, bool] = {}

    def edge_marks(self, s: int, z: int, interv) -> List[Tuple[int, int]]:
        out = []
        if (s, z) in self.g.directed and z not in interv:
            out.append((TAIL, HEAD))
        if (z, s) in self.g.directed and s not in interv:
            out.append((HEAD, TAIL))
        if self.g.has_bidirected(s, z) and s not in interv and z not in interv:
            out.append((HEAD, HEAD))
        return out

    def walk(self, s, t, length, a, b, cond, interv) -> bool:
        key = (s, t, length, a, b, cond, interv)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        result = False
        if length == 1:
            result = s != t and (a, b) in self.edge_marks(s, t, interv)
        else:
            for z in range(self.g.n):
                if z == s:
                    continue
                for ma, mz in self.edge_marks(s, z, interv):
                    if ma != a:
                        continue
                    for m_out in MARKS:
                        collider = mz == HEAD and m_out == HEAD
                        if collider != (z in cond):
                            continue
                        if self.walk(z, t, length - 1, m_out, b, cond, interv):
                            result = True
                            break
                    if result:
                        break
                if result:
                    break
        self.cache[key] = result
        return result


def assignment_of(table: VarTable, g: MixedGraph) -> List[bool]:
    """Truth value of every variable in ``table`` when the graph is ``g``.

    Edge variables come from ``g``, walk variables from their definition,
    relation variables from the reachability oracle, and auxiliary or query
    variables from their recorded definitions.
    """
    ev = _WalkEvaluator(g)
    values: List[Optional[bool]] = [None] * (table.count + 1)
    values[0] = False

    def lit_value(lit: int) -> bool:
        val = value(abs(lit))
        return val if lit > 0 else not val

    def value(v: int) -> bool:
        if values[v] is not None:
            return values[v]
        key = table.key(v)
        head = key[0]
        if head == "dir":
            val = (key[1], key[2]) in g.directed
        elif head == "bidir":
            val = g.has_bidirected(key[1], key[2])
        elif head == "path":
            val = ev.walk(*key[1:])
        elif head == "rel":
            val = d_connected(g, TestSpec(key[1], key[2], key[3], key[4]))
        elif v in table.definitions:
            val = any(all(lit_value(l) for l in term) for term in table.definitions[v])
        else:
            val = False
        values[v] = val
        return val

    for v in range(1, table.count + 1):
        value(v)
    return values


def satisfies(assignment: Sequence[bool], clauses: Iterable[Sequence[int]]) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def violated(assignment: Sequence[bool], clauses: Iterable[Sequence[int]]):
    return [c for c in clauses if not any(assignment[abs(l)] == (l > 0) for l in c)]


# -- persistence --------------------------------------------------------------


def _pack(obj):
    if isinstance(obj, frozenset):
        return {"set": sorted(obj)}
    if isinstance(obj, tuple):
        return [_pack(o) for o in obj]
    return obj


def _unpack(obj):
    if isinstance(obj, dict):
        return frozenset(obj["set"])
    if isinstance(obj, list):
        return tuple(_unpack(o) for o in obj)
    return obj


def dump_state(enc: Encoder, names: Sequence[str]) -> dict:
    """JSON-ready snapshot of an encoder: keys in id order plus all clauses."""
    table = enc.table
    return {
        "format": "satdisco-formula/1",
        "names": list(names),
        "keys": [_pack(table.key(v)) for v in range(1, table.count + 1)],
        "definitions": {str(v): [list(t) for t in terms] for v, terms in table.definitions.items()},
        "false": sorted(enc._false),
        "relations": sorted(enc._relations_defined),
        "clauses": [list(c) for c in enc.formula.clauses],
    }


def load_state(state: dict) -> Tuple[Encoder, Tuple[str, ...]]:
    if state.get("format") != "satdisco-formula/1":
        raise ValueError("not a saved satdisco formula")
    names = tuple(state["names"])
    table = VarTable()
    for raw in state["keys"]:
        key = _unpack(raw)
        if key[0] == "aux":
            table.aux()
        else:
            table.var(key)
    for v, terms in state["definitions"].items():
        table.definitions[int(v)] = [tuple(t) for t in terms]
    enc = Encoder(len(names), table=table)
    enc._false = set(state["false"])
    enc._relations_defined = set(state["relations"])
    enc.formula.extend(tuple(c) for c in state["clauses"])
    for key, _ in list(table.items()):
        if key[0] == "path":
            enc._context(key[6], key[7])
    return enc, names
