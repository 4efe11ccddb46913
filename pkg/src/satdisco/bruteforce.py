"""Exponential reference oracles used to cross-check the SAT pipeline.

``walks_dconnect`` enumerates walks edge by edge and applies the collider
rule to each complete walk. ``consensus`` enumerates every mixed graph on a
few nodes and keeps those agreeing with the relations; reachability over all
graphs at once is done with numpy boolean vectors.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from satdisco.discovery import Contradiction, EdgeSolution, Status
from satdisco.graph import HEAD, TAIL, MixedGraph, Relation, TestSpec, manipulate

MAX_ENUM_NODES = 4


# -- walks ------------------------------------------------------------------------


def iter_walks(g: MixedGraph, x: int, y: int, l_cap: int) -> Iterator[List[Tuple[int, int, int]]]:
    """Every walk from x to y with at most ``l_cap`` edges, as a list of
    ``(node, mark at previous node, mark at node)`` steps; it may pass
    through y before ending there."""
    adj = g.incident()

    def extend(walk, node):
        if walk and node == y:
            yield list(walk)
        if len(walk) == l_cap:
            return
        for v, m_here, m_there in adj[node]:
            walk.append((v, m_here, m_there))
            yield from extend(walk, v)
            walk.pop()

    yield from extend([], x)


def walk_is_dconnecting(walk: Sequence[Tuple[int, int, int]], cond) -> bool:
    """Every interior collider in ``cond`` and no interior non-collider in it."""
    for (node, _, into), (_, out, _) in zip(walk, walk[1:]):
        collider = into == HEAD and out == HEAD
        if collider != (node in cond):
            return False
    return True


def walks_dconnect(g: MixedGraph, t: TestSpec, l_cap: int, memo: bool = True) -> bool:
    """Is there a d-connecting walk of at most ``l_cap`` edges from t.x to t.y?

    ``memo=False`` checks every enumerated walk literally; ``memo=True``
    additionally remembers (node, incoming mark, edges left) states from which
    no admissible continuation reaches y, which keeps n = 6 tractable.
    """
    if l_cap < 1:
        raise ValueError("l_cap must be at least 1")
    h = manipulate(g, t.interv)
    if not memo:
        return any(walk_is_dconnecting(w, t.cond) for w in iter_walks(h, t.x, t.y, l_cap))
    adj = h.incident()
    dead = set()
    cond, goal = t.cond, t.y

    def search(node, into, left) -> bool:
        state = (node, into, left)
        if state in dead:
            return False
        for v, out, there in adj[node]:
            if (into == HEAD and out == HEAD) != (node in cond):
                continue
            if v == goal:
                return True
            if left > 1 and search(v, there, left - 1):
                return True
        dead.add(state)
        return False

    for v, _, there in adj[t.x]:
        if v == goal:
            return True
        if l_cap > 1 and search(v, there, l_cap - 1):
            return True
    return False


def all_specs(n: int) -> List[TestSpec]:
    """Every test spec on n nodes (all pairs, conditioning sets and interventions)."""
    out = []
    for x, y in itertools.combinations(range(n), 2):
        rest = [v for v in range(n) if v not in (x, y)]
        for k in range(len(rest) + 1):
            for cond in itertools.combinations(rest, k):
                for m in range(n + 1):
                    for interv in itertools.combinations(range(n), m):
                        out.append(TestSpec(x, y, frozenset(cond), frozenset(interv)))
    return out


# -- graph enumeration -------------------------------------------------------------


def edge_slots(n: int) -> List[Tuple[str, int, int]]:
    """Bit order used by :func:`enumerate_graphs`: directed pairs, then bidirected."""
    slots = [("dir", x, y) for x in range(n) for y in range(n) if x != y]
    slots += [("bidir", x, y) for x, y in itertools.combinations(range(n), 2)]
    return slots


def graph_from_bits(n: int, bits: int, names=None) -> MixedGraph:
    d, b = [], []
    for i, (kind, x, y) in enumerate(edge_slots(n)):
        if bits >> i & 1:
            (d if kind == "dir" else b).append((x, y))
    names = tuple(names) if names is not None else tuple(f"v{i}" for i in range(n))
    return MixedGraph(names, frozenset(d), frozenset(b))


def bits_of(g: MixedGraph) -> int:
    bits = 0
    for i, (kind, x, y) in enumerate(edge_slots(g.n)):
        if (kind == "dir" and (x, y) in g.directed) or (kind == "bidir" and (x, y) in g.bidirected):
            bits |= 1 << i
    return bits


def enumerate_graphs(n: int, names=None) -> Iterator[MixedGraph]:
    if n > MAX_ENUM_NODES:
        raise ValueError(f"graph enumeration is capped at {MAX_ENUM_NODES} nodes")
    m = len(edge_slots(n))
    for bits in range(1 << m):
        yield graph_from_bits(n, bits, names)


class GraphSpace:
    """All mixed graphs on n nodes as a boolean edge matrix, one row per graph."""

    def __init__(self, n: int):
        if n > MAX_ENUM_NODES:
            raise ValueError(f"graph enumeration is capped at {MAX_ENUM_NODES} nodes")
        self.n = n
        self.slots = edge_slots(n)
        m = len(self.slots)
        codes = np.arange(1 << m, dtype=np.int64)
        self.edges = ((codes[:, None] >> np.arange(m)) & 1).astype(bool)
        self.slot_index = {s: i for i, s in enumerate(self.slots)}
        self._cache: Dict[TestSpec, np.ndarray] = {}

    def __len__(self) -> int:
        return self.edges.shape[0]

    def _ends(self, t: TestSpec):
        """Edge ends ``(u, mark at u, v, mark at v, slot)`` surviving intervention."""
        out = []
        for i, (kind, a, b) in enumerate(self.slots):
            if kind == "dir":
                if b in t.interv:
                    continue
                out.append((a, TAIL, b, HEAD, i))
                out.append((b, HEAD, a, TAIL, i))
            else:
                if a in t.interv or b in t.interv:
                    continue
                out.append((a, HEAD, b, HEAD, i))
                out.append((b, HEAD, a, HEAD, i))
        return out

    def connected(self, t: TestSpec, rows: Optional[np.ndarray] = None) -> np.ndarray:
        """d-connection of t in every graph (or the selected rows)."""
        if rows is None and t in self._cache:
            return self._cache[t]
        E = self.edges if rows is None else self.edges[rows]
        count = E.shape[0]
        ends = self._ends(t)
        reach = {}  # (node, incoming mark) -> bool vector
        zero = np.zeros(count, dtype=bool)
        for u, _, v, mv, i in ends:
            if u == t.x:
                key = (v, mv)
                reach[key] = reach.get(key, zero) | E[:, i]
        changed = True
        while changed:
            changed = False
            for u, mu, v, mv, i in ends:
                if u == t.y:
                    continue
                for m_in in (TAIL, HEAD):
                    src = reach.get((u, m_in))
                    if src is None:
                        continue
                    if (m_in == HEAD and mu == HEAD) != (u in t.cond):
                        continue
                    new = src & E[:, i]
                    old = reach.get((v, mv), zero)
                    merged = old | new
                    if not np.array_equal(merged, old):
                        reach[(v, mv)] = merged
                        changed = True
        out = reach.get((t.y, TAIL), zero) | reach.get((t.y, HEAD), zero)
        if rows is None:
            self._cache[t] = out
        return out

    def ancestor_matrix(self, rows: np.ndarray):
        """anc[x][y][k]: graph k has a directed path x ~> y (length >= 1)."""
        n = self.n
        E = self.edges[rows]
        anc = [[E[:, self.slot_index[("dir", x, y)]] if x != y else np.zeros(len(E), bool)
                for y in range(n)] for x in range(n)]
        for z in range(n):
            for x in range(n):
                for y in range(n):
                    anc[x][y] = anc[x][y] | (anc[x][z] & anc[z][y])
        return anc


_SPACES: Dict[int, GraphSpace] = {}


def graph_space(n: int) -> GraphSpace:
    if n not in _SPACES:
        _SPACES[n] = GraphSpace(n)
    return _SPACES[n]


def consistent_rows(
    relations: Sequence[Relation], n: int, acyclic: bool = False, no_latents: bool = False
) -> np.ndarray:
    space = graph_space(n)
    mask = np.ones(len(space), dtype=bool)
    if no_latents:
        for i, (kind, _, _) in enumerate(space.slots):
            if kind == "bidir":
                mask &= ~space.edges[:, i]
    # separations first: they cut the space fastest
    for r in sorted(relations, key=lambda r: r.connected):
        mask &= space.connected(r.spec) == r.connected
        if not mask.any():
            break
    rows = np.flatnonzero(mask)
    if acyclic and len(rows):
        anc = space.ancestor_matrix(rows)
        cyclic = np.zeros(len(rows), dtype=bool)
        for x in range(n):
            cyclic |= anc[x][x]
        rows = rows[~cyclic]
    return rows


def _status(col: np.ndarray) -> Status:
    if col.all():
        return Status.PRESENT
    if not col.any():
        return Status.ABSENT
    return Status.UNKNOWN


def consensus(
    relations: Sequence[Relation], n: int, acyclic: bool = False, no_latents: bool = False
) -> EdgeSolution:
    """Status of every edge and ancestral relation across all consistent graphs."""
    rows = consistent_rows(relations, n, acyclic, no_latents)
    if len(rows) == 0:
        raise Contradiction("no graph satisfies the relations")
    space = graph_space(n)
    E = space.edges[rows]
    sol = EdgeSolution(n)
    for i, (kind, x, y) in enumerate(space.slots):
        if kind == "dir":
            sol.directed[(x, y)] = _status(E[:, i])
        else:
            sol.bidirected[(x, y)] = _status(E[:, i])
    anc = space.ancestor_matrix(rows)
    for x in range(n):
        for y in range(n):
            if x != y:
                sol.ancestral[(x, y)] = _status(anc[x][y])
    return sol
