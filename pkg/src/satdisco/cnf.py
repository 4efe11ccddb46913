"""Propositional variables, CNF storage, Tseitin compilation and DIMACS I/O.

Literals are signed non-zero ints in the usual DIMACS convention.
"""
from __future__ import annotations

import io
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, TextIO, Tuple

# variable roles; backbone candidates are drawn from the semantic ones only
EDGE = "edge"
RELATION = "relation"
PATH = "path"
AUX = "aux"
QUERY = "query"


def key_role(key: Hashable) -> str:
    if isinstance(key, tuple) and key and isinstance(key[0], str):
        head = key[0]
        if head in ("dir", "bidir"):
            return EDGE
        if head == "rel":
            return RELATION
        if head == "path":
            return PATH
        if head == "query":
            return QUERY
    return AUX


class VarTable:
    """Bijection between semantic keys and variable ids ``1..count``."""

    def __init__(self):
        self._ids: Dict[Hashable, int] = {}
        self._keys: List[Optional[Hashable]] = [None]
        self._roles: List[Optional[str]] = [None]
        # v -> terms, for variables defined as OR of ANDs (aux and query vars)
        self.definitions: Dict[int, List[Tuple[int, ...]]] = {}

    def __len__(self) -> int:
        return len(self._keys) - 1

    def __contains__(self, key: Hashable) -> bool:
        return key in self._ids

    @property
    def count(self) -> int:
        return len(self._keys) - 1

    def var(self, key: Hashable) -> int:
        """Id for ``key``, allocating the next id on first use."""
        v = self._ids.get(key)
        if v is None:
            v = len(self._keys)
            self._ids[key] = v
            self._keys.append(key)
            self._roles.append(key_role(key))
        return v

    fresh_var = var

    def get(self, key: Hashable) -> Optional[int]:
        return self._ids.get(key)

    def aux(self, term: Optional[Sequence[int]] = None) -> int:
        """New auxiliary variable; ``term`` records it as a conjunction."""
        v = len(self._keys)
        self._keys.append(("aux", v))
        self._ids[("aux", v)] = v
        self._roles.append(AUX)
        if term is not None:
            self.definitions[v] = [tuple(term)]
        return v

    def key(self, v: int) -> Hashable:
        return self._keys[v]

    def role(self, v: int) -> str:
        return self._roles[v]

    def items(self) -> Iterable[Tuple[Hashable, int]]:
        return self._ids.items()


class CnfFormula:
    """Append-only clause list. ``listeners`` receive every new clause batch."""

    def __init__(self):
        self.clauses: List[Tuple[int, ...]] = []
        self.var_count = 0
        self.listeners: list = []

    def __len__(self) -> int:
        return len(self.clauses)

    def add(self, clause: Sequence[int]) -> None:
        self.extend([clause])

    def extend(self, clauses: Iterable[Sequence[int]]) -> None:
        batch = []
        for clause in clauses:
            clause = tuple(clause)
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0:
                    raise ValueError("literal 0 is not allowed")
                if abs(lit) > self.var_count:
                    self.var_count = abs(lit)
            batch.append(clause)
        self.clauses.extend(batch)
        for listener in self.listeners:
            listener(batch)

    def literal_count(self) -> int:
        return sum(len(c) for c in self.clauses)


def add_equiv_disjunction(
    table: VarTable, f: CnfFormula, lhs: int, terms: Sequence[Sequence[int]]
) -> None:
    """Add clauses for ``lhs <-> OR_k AND(terms[k])``.

    Single-literal terms are used directly; longer ones get one auxiliary
    variable each. Both implication directions are always emitted.
    """
    clauses: List[Tuple[int, ...]] = []
    disjuncts = []
    for term in terms:
        term = list(term)
        if not term:
            # an empty conjunction is true
            f.add((lhs,))
            return
        if len(term) == 1:
            disjuncts.append(term[0])
            continue
        t = table.aux(term)
        for lit in term:
            clauses.append((-t, lit))
        clauses.append(tuple(-lit for lit in term) + (t,))
        disjuncts.append(t)
    if not disjuncts:
        clauses.append((-lhs,))
    else:
        clauses.append((-lhs,) + tuple(disjuncts))
        for d in disjuncts:
            clauses.append((-d, lhs))
    f.extend(clauses)


def add_equiv_conjunction(table: VarTable, f: CnfFormula, lhs: int, term: Sequence[int]) -> None:
    """``lhs <-> AND(term)``; the empty conjunction is true."""
    if not term:
        f.add((lhs,))
        return
    clauses = [(-lhs, lit) for lit in term]
    clauses.append(tuple(-lit for lit in term) + (lhs,))
    f.extend(clauses)


def write_dimacs(f: CnfFormula, sink: TextIO, comments: Sequence[str] = ()) -> None:
    for line in comments:
        sink.write(f"c {line}\n")
    sink.write(f"p cnf {f.var_count} {len(f.clauses)}\n")
    for clause in f.clauses:
        sink.write(" ".join(map(str, clause)) + " 0\n")


def dimacs_string(f: CnfFormula) -> str:
    buf = io.StringIO()
    write_dimacs(f, buf)
    return buf.getvalue()


def read_dimacs(text: str) -> Tuple[int, List[Tuple[int, ...]]]:
    """Parse DIMACS CNF text into ``(var_count, clauses)``."""
    var_count = None
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header {line!r}")
            var_count = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if var_count is None:
        raise ValueError("missing 'p cnf' header")
    return var_count, clauses
