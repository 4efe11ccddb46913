from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Set

from satdisco.sat.backends import Backend


class Unsatisfiable(Exception):
    """The accumulated formula has no model."""


@dataclass
class BackboneResult:
    fixed: Dict[int, bool] = field(default_factory=dict)
    free: Set[int] = field(default_factory=set)
    solver_calls: int = 0


def backbone(solver: Backend, candidates: Iterable[int], filtering: bool = True) -> BackboneResult:
    """Split ``candidates`` into backbone variables (with polarity) and free ones.

    A variable is fixed at polarity p iff the formula is unsatisfiable under
    the assumption that it takes the opposite value. With ``filtering`` every
    model found along the way removes the candidates it flips, so they need no
    call of their own.
    """
    candidates = sorted(set(candidates))
    first = solver.solve_under([])
    calls = 1
    if not first.satisfiable:
        raise Unsatisfiable("formula is unsatisfiable")
    guess = {v: first.value(v) for v in candidates}
    result = BackboneResult()
    open_ = dict(guess)
    for v in candidates:
        if v not in open_:
            continue
        pol = open_.pop(v)
        out = solver.solve_under([-v if pol else v])
        calls += 1
        if not out.satisfiable:
            result.fixed[v] = pol
            continue
        result.free.add(v)
        if filtering:
            for u in [u for u, p in open_.items() if out.value(u) != p]:
                del open_[u]
                result.free.add(u)
    result.solver_calls = calls
    return result
