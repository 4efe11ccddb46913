"""Line-oriented text formats for graphs, relations and background knowledge.

Graph::

    nodes: x y z w
    edge x -> z
    edge z <-> w

Relations (``-`` for an empty set; an optional ``nodes:`` header fixes the
node universe)::

    sep x y | - || -
    con x w | z || y

Knowledge::

    know edge x -> y present
    know ancestral x y absent
    know path x y via a b len <= 4 present
    assume acyclic
    assume no-latents
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from satdisco.encoder import BackgroundConstraint
from satdisco.graph import Experiment, MixedGraph, Relation, TestSpec

ASSUMPTIONS = ("acyclic", "no-latents")


class FormatError(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_nodes(lineno: int, line: str) -> Tuple[str, ...]:
    names = tuple(line.split(":", 1)[1].split())
    if len(set(names)) != len(names):
        raise FormatError(lineno, "duplicate node name")
    if not names:
        raise FormatError(lineno, "empty node list")
    return names


def _index(names: Sequence[str], lineno: int, name: str) -> int:
    try:
        return names.index(name)
    except ValueError:
        raise FormatError(lineno, f"unknown node {name!r}") from None


# -- graphs -------------------------------------------------------------------


def parse_graph(text: str) -> MixedGraph:
    names: Optional[Tuple[str, ...]] = None
    directed, bidirected = set(), set()
    for lineno, line in _lines(text):
        if line.startswith("nodes:"):
            if names is not None:
                raise FormatError(lineno, "second 'nodes:' header")
            names = _parse_nodes(lineno, line)
            continue
        parts = line.split()
        if parts[0] != "edge" or len(parts) != 4 or parts[2] not in ("->", "<-", "<->"):
            raise FormatError(lineno, f"expected 'edge a -> b' or 'edge a <-> b', got {line!r}")
        if names is None:
            raise FormatError(lineno, "edge before 'nodes:' header")
        a, b = _index(names, lineno, parts[1]), _index(names, lineno, parts[3])
        if a == b:
            raise FormatError(lineno, "self-loops are not allowed")
        if parts[2] == "->":
            directed.add((a, b))
        elif parts[2] == "<-":
            directed.add((b, a))
        else:
            bidirected.add((min(a, b), max(a, b)))
    if names is None:
        raise FormatError(0, "missing 'nodes:' header")
    return MixedGraph(names, frozenset(directed), frozenset(bidirected))


def format_graph(g: MixedGraph) -> str:
    out = ["nodes: " + " ".join(g.names)]
    for a, b in sorted(g.directed):
        out.append(f"edge {g.names[a]} -> {g.names[b]}")
    for a, b in sorted(g.bidirected):
        out.append(f"edge {g.names[a]} <-> {g.names[b]}")
    return "\n".join(out) + "\n"


# -- relations ----------------------------------------------------------------


def _set_text(names: Sequence[str], nodes) -> str:
    return " ".join(names[v] for v in sorted(nodes)) if nodes else "-"


def format_relation(r: Relation, names: Sequence[str]) -> str:
    t = r.spec
    word = "con" if r.connected else "sep"
    return (
        f"{word} {names[t.x]} {names[t.y]} | {_set_text(names, t.cond)}"
        f" || {_set_text(names, t.interv)}"
    )


def format_relations(relations: Sequence[Relation], names: Sequence[str], header: bool = True) -> str:
    out = ["nodes: " + " ".join(names)] if header else []
    out.extend(format_relation(r, names) for r in relations)
    return "\n".join(out) + "\n"


def parse_relations(
    text: str, names: Optional[Sequence[str]] = None
) -> Tuple[List[Relation], Tuple[str, ...]]:
    """Parse relations; the node universe comes from ``names`` or a ``nodes:`` header."""
    names = tuple(names) if names is not None else None
    pending = []
    for lineno, line in _lines(text):
        if line.startswith("nodes:"):
            header = _parse_nodes(lineno, line)
            if names is not None and set(header) - set(names):
                raise FormatError(lineno, "header names nodes outside the given universe")
            names = names or header
            continue
        pending.append((lineno, line))
    if names is None:
        raise FormatError(0, "node universe unknown: pass it explicitly or add a 'nodes:' header")
    relations = []
    for lineno, line in pending:
        relations.append(_parse_relation_line(lineno, line, names))
    return relations, names


def _parse_relation_line(lineno: int, line: str, names: Sequence[str]) -> Relation:
    head, sep, tail = line.partition("|")
    if not sep:
        raise FormatError(lineno, "expected 'sep|con x y | C || J'")
    head_parts = head.split()
    if len(head_parts) != 3 or head_parts[0] not in ("sep", "con"):
        raise FormatError(lineno, f"bad relation head {head.strip()!r}")
    cond_text, sep2, interv_text = tail.partition("||")
    if not sep2:
        interv_text = "-"
    if cond_text.startswith("|"):
        raise FormatError(lineno, "malformed separators")

    def node_set(txt: str):
        toks = txt.split()
        if toks == ["-"]:
            return frozenset()
        return frozenset(_index(names, lineno, tok) for tok in toks)

    x, y = _index(names, lineno, head_parts[1]), _index(names, lineno, head_parts[2])
    try:
        spec = TestSpec(x, y, node_set(cond_text), node_set(interv_text))
    except ValueError as exc:
        raise FormatError(lineno, str(exc)) from None
    return Relation(spec, head_parts[0] == "con")


# -- experiments ----------------------------------------------------------------


def parse_experiments(text: str, names: Sequence[str]) -> List[Experiment]:
    """One experiment per line: ``observed a b c || intervened a``."""
    out = []
    for lineno, line in _lines(text):
        obs_text, _, int_text = line.partition("||")
        toks = obs_text.split()
        if toks and toks[0] == "observed":
            toks = toks[1:]
        observed = {_index(names, lineno, t) for t in toks if t != "-"}
        intervened = {_index(names, lineno, t) for t in int_text.split() if t != "-"}
        try:
            out.append(Experiment(frozenset(observed | intervened), frozenset(intervened)))
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
    return out


def format_experiments(experiments: Sequence[Experiment], names: Sequence[str]) -> str:
    lines = []
    for e in experiments:
        lines.append(f"observed {_set_text(names, e.observed)} || {_set_text(names, e.intervened)}")
    return "\n".join(lines) + "\n"


# -- knowledge ------------------------------------------------------------------


@dataclass
class Knowledge:
    constraints: List[BackgroundConstraint] = field(default_factory=list)
    assumptions: List[str] = field(default_factory=list)


def parse_knowledge(text: str, names: Sequence[str]) -> Knowledge:
    out = Knowledge()
    for lineno, line in _lines(text):
        parts = line.split()
        if parts[0] == "assume":
            if len(parts) != 2 or parts[1] not in ASSUMPTIONS:
                raise FormatError(lineno, f"expected 'assume acyclic|no-latents', got {line!r}")
            if parts[1] not in out.assumptions:
                out.assumptions.append(parts[1])
            continue
        if parts[0] != "know" or len(parts) < 2:
            raise FormatError(lineno, f"unrecognised line {line!r}")
        polarity = parts[-1]
        if polarity not in ("present", "absent"):
            raise FormatError(lineno, "knowledge lines end in 'present' or 'absent'")
        present = polarity == "present"
        body = parts[1:-1]
        kind = body[0]
        try:
            if kind == "edge":
                if len(body) != 4 or body[2] not in ("->", "<->"):
                    raise FormatError(lineno, "expected 'know edge a -> b' or 'know edge a <-> b'")
                a, b = _index(names, lineno, body[1]), _index(names, lineno, body[3])
                edge_kind = "edge" if body[2] == "->" else "bidir"
                out.constraints.append(BackgroundConstraint(edge_kind, a, b, present))
            elif kind == "ancestral":
                if len(body) != 3:
                    raise FormatError(lineno, "expected 'know ancestral a b'")
                a, b = _index(names, lineno, body[1]), _index(names, lineno, body[2])
                out.constraints.append(BackgroundConstraint("ancestral", a, b, present))
            elif kind == "path":
                out.constraints.append(_parse_path(lineno, body[1:], names, present))
            else:
                raise FormatError(lineno, f"unknown knowledge kind {kind!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(lineno, str(exc)) from None
    return out


def _parse_path(lineno, toks, names, present) -> BackgroundConstraint:
    if len(toks) < 2:
        raise FormatError(lineno, "expected 'know path a b [via ...] [len <= L]'")
    a, b = _index(names, lineno, toks[0]), _index(names, lineno, toks[1])
    rest = toks[2:]
    waypoints: List[int] = []
    length = None
    if rest and rest[0] == "via":
        rest = rest[1:]
        while rest and rest[0] != "len":
            waypoints.append(_index(names, lineno, rest[0]))
            rest = rest[1:]
    if rest:
        if len(rest) != 3 or rest[0] != "len" or rest[1] != "<=":
            raise FormatError(lineno, "expected 'len <= L'")
        try:
            length = int(rest[2])
        except ValueError:
            raise FormatError(lineno, f"bad length {rest[2]!r}") from None
    return BackgroundConstraint("path", a, b, present, tuple(waypoints), length)


def format_knowledge(k: Knowledge, names: Sequence[str]) -> str:
    lines = [f"assume {a}" for a in k.assumptions]
    for c in k.constraints:
        pol = "present" if c.present else "absent"
        x, y = names[c.x], names[c.y]
        if c.kind == "edge":
            lines.append(f"know edge {x} -> {y} {pol}")
        elif c.kind == "bidir":
            lines.append(f"know edge {x} <-> {y} {pol}")
        elif c.kind == "ancestral":
            lines.append(f"know ancestral {x} {y} {pol}")
        else:
            via = " via " + " ".join(names[w] for w in c.waypoints) if c.waypoints else ""
            ln = f" len <= {c.length}" if c.length is not None else ""
            lines.append(f"know path {x} {y}{via}{ln} {pol}")
    return "\n".join(lines) + "\n"


def name_index(names: Sequence[str]) -> Dict[str, int]:
    return {n: i for i, n in enumerate(names)}
