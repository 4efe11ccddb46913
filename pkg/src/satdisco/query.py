"""Boolean structural queries against a working formula.

Expression syntax (node names are identifiers)::

    x->y   x<-y   x<->y   anc(x,y)   true   false
    !e   e & e   e | e   (e)
    exactly(x->y, z->y)     # this edge set and no other edge
"""
from __future__ import annotations

import itertools
import re
from typing import List, Sequence, Tuple, Union

from satdisco.cnf import add_equiv_disjunction
from satdisco.encoder import Encoder
from satdisco.graph import MixedGraph
from satdisco.sat import Backend

ALWAYS_TRUE = "always-true"
ALWAYS_FALSE = "always-false"
CONTINGENT = "contingent"

Expr = Union[Tuple, bool]

_TOKEN = re.compile(r"\s*(<->|->|<-|&&|\|\||[()!&|,~]|[A-Za-z_][A-Za-z0-9_.]*)")


class QueryError(ValueError):
    pass


def _tokenize(text: str) -> List[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QueryError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens: List[str], names: Sequence[str]):
        self.toks = tokens
        self.i = 0
        self.names = list(names)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise QueryError(f"expected {expected or 'more input'}, got {tok!r}")
        self.i += 1
        return tok

    def node(self) -> int:
        tok = self.take()
        try:
            return self.names.index(tok)
        except ValueError:
            raise QueryError(f"unknown node {tok!r}") from None

    def expr(self):
        parts = [self.conj()]
        while self.peek() in ("|", "||"):
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else ("or", tuple(parts))

    def conj(self):
        parts = [self.unary()]
        while self.peek() in ("&", "&&"):
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else ("and", tuple(parts))

    def unary(self):
        tok = self.peek()
        if tok in ("!", "~"):
            self.take()
            return ("not", self.unary())
        if tok == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok == "true":
            self.take()
            return True
        if tok == "false":
            self.take()
            return False
        if tok == "anc":
            self.take()
            self.take("(")
            x = self.node()
            self.take(",")
            y = self.node()
            self.take(")")
            return ("anc", x, y)
        if tok == "exactly":
            self.take()
            self.take("(")
            edges = []
            if self.peek() != ")":
                edges.append(self.edge())
                while self.peek() == ",":
                    self.take()
                    edges.append(self.edge())
            self.take(")")
            return exactly_edges(len(self.names), edges)
        return self.edge()

    def edge(self):
        x = self.node()
        arrow = self.take()
        y = self.node()
        if x == y:
            raise QueryError("self-loops are not part of the model space")
        if arrow == "->":
            return ("dir", x, y)
        if arrow == "<-":
            return ("dir", y, x)
        if arrow == "<->":
            return ("bidir", min(x, y), max(x, y))
        raise QueryError(f"expected an edge arrow, got {arrow!r}")


def parse_query(text: str, names: Sequence[str]) -> Expr:
    p = _Parser(_tokenize(text), names)
    e = p.expr()
    if p.peek() is not None:
        raise QueryError(f"trailing input at {p.peek()!r}")
    return e


def exactly_edges(n: int, edges) -> Expr:
    """Conjunction fixing every possible edge: listed ones present, the rest absent."""
    present = set(edges)
    lits = []
    for x, y in itertools.permutations(range(n), 2):
        atom = ("dir", x, y)
        lits.append(atom if atom in present else ("not", atom))
    for x, y in itertools.combinations(range(n), 2):
        atom = ("bidir", x, y)
        lits.append(atom if atom in present else ("not", atom))
    return ("and", tuple(lits))


def exactly(g: MixedGraph) -> Expr:
    return exactly_edges(
        g.n, [("dir", x, y) for x, y in g.directed] + [("bidir", x, y) for x, y in g.bidirected]
    )


def compile_query(enc: Encoder, e: Expr) -> int:
    """A literal equivalent to ``e`` over the encoder's variables."""
    if e is True or e is False:
        v = enc.table.var(("query", "const", e))
        enc.table.definitions[v] = [()] if e else []
        enc.formula.add((v,) if e else (-v,))
        return v
    op = e[0]
    if op == "dir":
        enc._check_nodes(e[1:])
        return enc.dir_var(e[1], e[2])
    if op == "bidir":
        enc._check_nodes(e[1:])
        return enc.bidir_var(e[1], e[2])
    if op == "anc":
        enc._check_nodes(e[1:])
        return enc.ancestral_var(e[1], e[2])
    if op == "not":
        return -compile_query(enc, e[1])
    if op in ("and", "or"):
        lits = [compile_query(enc, sub) for sub in e[1]]
        key = ("query", op, tuple(lits))
        existing = enc.table.get(key)
        if existing is not None:
            return existing
        v = enc.table.var(key)
        terms = [tuple(lits)] if op == "and" else [(lit,) for lit in lits]
        enc.table.definitions[v] = terms
        add_equiv_disjunction(enc.table, enc.formula, v, terms)
        return v
    raise QueryError(f"unknown query node {op!r}")


def classify(solver: Backend, lit: int) -> str:
    can_true = solver.solve_under([lit]).satisfiable
    can_false = solver.solve_under([-lit]).satisfiable
    if can_true and can_false:
        return CONTINGENT
    if can_true:
        return ALWAYS_TRUE
    if can_false:
        return ALWAYS_FALSE
    raise ValueError("the working formula is unsatisfiable")


def query(enc: Encoder, solver: Backend, e: Union[Expr, str], names=None) -> str:
    """Classify a query as always-true, always-false or contingent under the formula.

    ``solver`` must already hold the encoder's clauses (new definitions are
    forwarded through the formula's listeners).
    """
    if isinstance(e, str):
        if names is None:
            raise QueryError("node names are needed to parse a textual query")
        e = parse_query(e, names)
    return classify(solver, compile_query(enc, e))
