"""Incremental SAT backends behind one small interface.

``embedded``  the pure-Python CDCL solver in :mod:`satdisco.sat.cdcl`
``minisat``   MiniSat 2.2 through the ``python-sat`` bindings
``external:PATH``  any DIMACS solver binary; one fresh process per call
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from satdisco.sat.cdcl import CDCLSolver


class SolverError(RuntimeError):
    pass


@dataclass
class SolveOutcome:
    satisfiable: bool
    model: Optional[Sequence[bool]] = None  # model[v] for v >= 1; index 0 unused

    def value(self, v: int) -> bool:
        if self.model is None:
            raise ValueError("no model for an unsatisfiable outcome")
        return self.model[v] if v < len(self.model) else False


class _LitModel:
    """Read-only ``model[v]`` view over a solver's list of model literals."""

    __slots__ = ("lits",)

    def __init__(self, lits: Sequence[int]):
        self.lits = lits

    def __len__(self) -> int:
        return len(self.lits) + 1

    def __getitem__(self, v: int) -> bool:
        return self.lits[v - 1] > 0


class Backend:
    name = "abstract"

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        raise NotImplementedError

    def solve_under(self, assumptions: Sequence[int] = ()) -> SolveOutcome:
        raise NotImplementedError

    def stats(self) -> dict:
        return {}

    def close(self) -> None:
        pass


class EmbeddedBackend(Backend):
    name = "embedded"

    def __init__(self, clauses: Iterable[Sequence[int]] = ()):
        self.solver = CDCLSolver()
        self.add_clauses(clauses)

    def add_clauses(self, clauses):
        self.solver.add_clauses(clauses)

    def solve_under(self, assumptions=()):
        if self.solver.solve(assumptions):
            return SolveOutcome(True, list(self.solver.model))
        return SolveOutcome(False)

    def stats(self):
        return dict(self.solver.stats)


class MinisatBackend(Backend):
    name = "minisat"

    def __init__(self, clauses: Iterable[Sequence[int]] = ()):
        from pysat.solvers import Minisat22

        self.solver = Minisat22()
        self.calls = 0
        self.add_clauses(clauses)

    def add_clauses(self, clauses):
        for c in clauses:
            self.solver.add_clause(list(c))

    def solve_under(self, assumptions=()):
        self.calls += 1
        if not self.solver.solve(assumptions=list(assumptions)):
            return SolveOutcome(False)
        # pysat reports literals in variable order 1..max
        return SolveOutcome(True, _LitModel(self.solver.get_model() or []))

    def stats(self):
        out = {"solves": self.calls}
        out.update({k: v for k, v in self.solver.accum_stats().items()})
        return out

    def close(self):
        self.solver.delete()


def parse_solver_output(text: str, nvars: int) -> SolveOutcome:
    """Understand both MiniSat result files (``SAT`` / model line) and the
    competition format (``s SATISFIABLE`` / ``v`` lines)."""
    status = None
    lits: List[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        head, _, rest = line.partition(" ")
        if head == "s":
            line, head, rest = rest, rest, ""
        if head in ("SAT", "SATISFIABLE"):
            status = True
            continue
        if head in ("UNSAT", "UNSATISFIABLE"):
            status = False
            continue
        if head == "v":
            line = rest
        lits.extend(int(tok) for tok in line.split() if tok not in ("v",))
    if status is None:
        raise SolverError("solver output has no SAT/UNSAT verdict")
    if not status:
        return SolveOutcome(False)
    model = [False] * (nvars + 1)
    for lit in lits:
        if lit and abs(lit) <= nvars:
            model[abs(lit)] = lit > 0
    return SolveOutcome(True, model)


class ExternalBackend(Backend):
    """Writes the accumulated clauses plus assumption units to a temporary
    DIMACS file and runs ``command <cnf> <result>``; the result file (or,
    failing that, stdout) is parsed."""

    name = "external"

    def __init__(self, command: str, clauses: Iterable[Sequence[int]] = (), timeout=None):
        self.argv = shlex.split(command)
        self.clauses: List[Sequence[int]] = []
        self.nvars = 0
        self.timeout = timeout
        self.calls = 0
        self.add_clauses(clauses)

    def add_clauses(self, clauses):
        for c in clauses:
            c = tuple(c)
            self.clauses.append(c)
            for lit in c:
                self.nvars = max(self.nvars, abs(lit))

    def solve_under(self, assumptions=()):
        self.calls += 1
        nvars = max([self.nvars] + [abs(a) for a in assumptions])
        with tempfile.TemporaryDirectory() as tmp:
            cnf = os.path.join(tmp, "in.cnf")
            res = os.path.join(tmp, "out.txt")
            with open(cnf, "w") as fh:
                fh.write(f"p cnf {nvars} {len(self.clauses) + len(assumptions)}\n")
                for c in self.clauses:
                    fh.write(" ".join(map(str, c)) + " 0\n")
                for a in assumptions:
                    fh.write(f"{a} 0\n")
            try:
                proc = subprocess.run(
                    self.argv + [cnf, res], capture_output=True, text=True, timeout=self.timeout
                )
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise SolverError(f"external solver failed: {exc}") from exc
            text = ""
            if os.path.exists(res):
                with open(res) as fh:
                    text = fh.read()
            if not text.strip():
                text = proc.stdout
            if proc.returncode not in (0, 10, 20):
                raise SolverError(
                    f"external solver exited with {proc.returncode}: {proc.stderr.strip()}"
                )
        return parse_solver_output(text, nvars)

    def stats(self):
        return {"solves": self.calls}


def pysat_available() -> bool:
    try:
        import pysat.solvers  # noqa: F401
    except ImportError:
        return False
    return True


def default_backend_name() -> str:
    return "minisat" if pysat_available() else "embedded"


def make_backend(spec: Optional[str] = None, clauses: Iterable[Sequence[int]] = ()) -> Backend:
    spec = spec or default_backend_name()
    if spec == "embedded":
        return EmbeddedBackend(clauses)
    if spec == "minisat":
        return MinisatBackend(clauses)
    if spec.startswith("external:"):
        return ExternalBackend(spec[len("external:"):], clauses)
    raise ValueError(f"unknown backend {spec!r}")
