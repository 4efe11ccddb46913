"""A small incremental CDCL solver in pure Python.

Two watched literals per clause, first-UIP learning with non-chronological
backjumping, VSIDS-style activities on a lazy heap, phase saving, Luby
restarts and MiniSat-style assumptions (assumptions are the first decisions,
so learnt clauses never depend on them and stay valid across calls).
"""
from __future__ import annotations

import heapq
from typing import Dict, Iterable, List, Optional, Sequence


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CDCLSolver:
    restart_unit = 100
    var_decay = 0.95

    def __init__(self, clauses: Iterable[Sequence[int]] = ()):
        self.nvars = 0
        self.clauses: List[List[int]] = []
        self.learnts: List[List[int]] = []
        self.watches: Dict[int, List[List[int]]] = {}
        self.true: Dict[int, bool] = {}  # literals currently true
        self.level: List[int] = [0]
        self.reason: List[Optional[List[int]]] = [None]
        self.activity: List[float] = [0.0]
        self.phase: List[bool] = [False]
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.heap: list = []
        self.var_inc = 1.0
        self.ok = True
        self.model: Optional[List[bool]] = None
        self.max_learnts = 2000
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "solves": 0}
        for c in clauses:
            self.add_clause(c)

    # -- variables and clauses --------------------------------------------

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            v = self.nvars
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(False)
            self.watches[v] = []
            self.watches[-v] = []
            heapq.heappush(self.heap, (0.0, v))

    def add_clause(self, clause: Sequence[int]) -> bool:
        """Add a permanent clause. Returns False once the formula is known UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        lits = []
        seen = set()
        for lit in clause:
            if lit == 0:
                raise ValueError("literal 0 is not allowed")
            self.ensure_vars(abs(lit))
            if -lit in seen:
                return True
            if lit in seen:
                continue
            seen.add(lit)
            if lit in self.true:
                return True
            if -lit in self.true:
                continue  # false at level 0
            lits.append(lit)
        if not lits:
            self.ok = False
            return False
        if len(lits) == 1:
            self._assign(lits[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(lits)
        self.watches[-lits[0]].append(lits)
        self.watches[-lits[1]].append(lits)
        return True

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        for c in clauses:
            self.add_clause(c)
        return self.ok

    # -- core ---------------------------------------------------------------

    def _assign(self, lit: int, reason: Optional[List[int]]) -> None:
        v = abs(lit)
        self.true[lit] = True
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> Optional[List[int]]:
        """Unit propagation. Watch lists are keyed by the literal whose truth
        falsifies a watched literal, i.e. clause c sits in watches[-c[0]] and
        watches[-c[1]]."""
        true = self.true
        watches = self.watches
        trail = self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false_lit = -p
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if first in true:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    if -lit not in true:
                        c[1] = lit
                        c[k] = false_lit
                        watches[-lit].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if -first in true:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        self.stats["propagations"] += props
                        return c
                    self._assign(first, c)
            del ws[j:]
        self.stats["propagations"] += props
        return None

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1)
                         if u not in self.true and -u not in self.true]
            heapq.heapify(self.heap)
        elif v not in self.true and -v not in self.true:
            heapq.heappush(self.heap, (-act, v))

    def _analyze(self, confl: List[int]):
        seen = set()
        learnt = [0]
        path_c = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level = self.level
        while True:
            for q in confl if p is None else confl[1:]:
                v = abs(q)
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path_c += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[abs(p)]
            seen.discard(abs(p))
            path_c -= 1
            if path_c == 0:
                break
        learnt[0] = -p
        # drop literals implied by the rest of the clause (basic minimization)
        keep = [learnt[0]]
        marked = {abs(q) for q in learnt}
        for q in learnt[1:]:
            r = self.reason[abs(q)]
            if r is None or any(abs(u) not in marked and level[abs(u)] > 0 for u in r[1:]):
                keep.append(q)
        learnt = keep
        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[abs(learnt[k])] > level[abs(learnt[best])]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[abs(learnt[1])]
        self.var_inc /= self.var_decay
        return learnt, bt

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            del self.true[lit]
            self.phase[v] = lit > 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick_branch(self) -> int:
        heap = self.heap
        true = self.true
        act = self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if v in true or -v in true or -a != act[v]:
                continue
            return v if self.phase[v] else -v
        # stale entries exhausted; fall back to a scan
        for v in range(1, self.nvars + 1):
            if v not in true and -v not in true:
                return v if self.phase[v] else -v
        return 0

    def _reduce_db(self) -> None:
        # only called at level 0, so no learnt clause is a live reason
        self.learnts.sort(key=len)
        self.learnts = self.learnts[: len(self.learnts) // 2]
        for lit in self.watches:
            self.watches[lit] = []
        for c in self.clauses:
            self.watches[-c[0]].append(c)
            self.watches[-c[1]].append(c)
        for c in self.learnts:
            self.watches[-c[0]].append(c)
            self.watches[-c[1]].append(c)
        self.max_learnts = int(self.max_learnts * 1.1)

    def _search(self, budget: int, assumptions: Sequence[int]) -> Optional[bool]:
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                self.stats["conflicts"] += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watches[-learnt[0]].append(learnt)
                    self.watches[-learnt[1]].append(learnt)
                    self._assign(learnt[0], learnt)
                continue
            if conflicts >= budget:
                self._cancel_until(0)
                return None
            dl = len(self.trail_lim)
            if dl < len(assumptions):
                p = assumptions[dl]
                if p in self.true:
                    self.trail_lim.append(len(self.trail))
                    continue
                if -p in self.true:
                    return False
            else:
                p = self._pick_branch()
                if p == 0:
                    return True
                self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._assign(p, None)

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Decide clauses + assumptions; on SAT, ``self.model`` holds the assignment."""
        self.stats["solves"] += 1
        self.model = None
        for lit in assumptions:
            self.ensure_vars(abs(lit))
        if not self.ok:
            return False
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart = 0
        while True:
            restart += 1
            if len(self.learnts) > self.max_learnts + len(self.trail):
                self._reduce_db()
            result = self._search(luby(restart) * self.restart_unit, list(assumptions))
            if result is None:
                continue
            if result:
                self.model = [False] + [v in self.true for v in range(1, self.nvars + 1)]
            self._cancel_until(0)
            return result

    def value(self, v: int) -> Optional[bool]:
        if self.model is None or v > self.nvars:
            return None
        return self.model[v]
