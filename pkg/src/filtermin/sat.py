"""Incremental CDCL SAT engine used by the minimization loop.

Conflict-driven clause learning with two watched literals per clause,
first-UIP conflict analysis, VSIDS-style variable activities, geometric
restarts, and periodic deletion of long learned clauses.  The solver is
incremental at the root level: clauses (including unit bans) may be added
between `solve` calls and learned clauses survive, which is what makes the
shrinking size loop and the just-in-time constraint loading cheap.

Literal convention is DIMACS-like: variables are positive ints, a negative
int is the negated literal.  Literal-indexed tables exploit Python's
negative indexing; a table of capacity c has length 2c + 1 so table[lit]
works for -c <= lit <= c.

Models are partial: only variables that appear in some stored clause are
reported.  Callers read them with .get(var, False).
"""
from __future__ import annotations

import heapq
import os
import time
from dataclasses import dataclass
from typing import Optional

from .rng import derive

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

_RESCALE_LIMIT = 1e100
_RESCALE_FACTOR = 1e-100


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0
    deleted: int = 0


@dataclass
class SolveOutcome:
    status: str
    model: Optional[dict]
    stats: SolveStats


class CdclSolver:
    def __init__(self, num_vars: int = 0, seed: Optional[int] = None,
                 archive: bool = False):
        if seed is None:
            seed = int(os.environ.get("FILTERMIN_SAT_SEED", "0"))
        self.seed = seed
        self._cap = 0
        self.num_vars = 0
        self.values = [0]        # lit-indexed: 1 true, -1 false, 0 unassigned
        self.watches = [None]    # lit-indexed lists of clauses watching lit
        self.level = [0]         # var-indexed tables from here down
        self.reason = [None]
        self.activity = [0.0]
        self.saved_phase = [False]
        self.active = bytearray(1)
        self._seen = bytearray(1)
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.unsat = False
        self.learnts = []
        self.max_learnts = 30000.0
        self.n_problem = 0
        self._archive = [] if archive else None
        self.stats = SolveStats()
        if num_vars:
            self._ensure(num_vars)

    # -- storage -------------------------------------------------------------

    def _ensure(self, n):
        if n <= self.num_vars:
            return
        if n > self._cap:
            cap = max(n, 2 * self._cap, 1024)
            for name, default in (("values", 0), ("watches", None)):
                old = getattr(self, name)
                new = [default] * (2 * cap + 1)
                c = self._cap
                new[:c + 1] = old[:c + 1]
                if c:
                    new[-c:] = old[-c:]
                setattr(self, name, new)
            grow = cap + 1 - len(self.level)
            self.level.extend([0] * grow)
            self.reason.extend([None] * grow)
            self.activity.extend([0.0] * grow)
            self.saved_phase.extend([False] * grow)
            self.active.extend(bytes(grow))
            self._seen.extend(bytes(grow))
            self._cap = cap
        for v in range(self.num_vars + 1, n + 1):
            # tiny seeded jitter so equal-activity ties break by seed
            self.activity[v] = (derive(self.seed, v) % 997) * 1e-12
            if self.watches[v] is None:
                self.watches[v] = []
                self.watches[-v] = []
        self.num_vars = n

    def add_clause(self, lits) -> bool:
        """Add a problem clause; returns False once the formula is known unsat.

        Must be called with the solver at decision level 0 (it always is
        between `solve` calls).  The clause is deduplicated, then simplified
        against root assignments: satisfied clauses are dropped, false
        literals stripped.  A clause that simplifies to a unit is assigned
        at the root immediately and propagated on the next solve.
        """
        if self._archive is not None:
            self._archive.append(tuple(lits))
        if self.unsat:
            return False
        seen = set()
        clause = []
        for lit in lits:
            if lit in seen:
                continue
            if -lit in seen:
                return True          # tautology
            seen.add(lit)
            clause.append(lit)
        if clause:
            self._ensure(max(abs(l) for l in clause))
        values = self.values
        out = []
        for lit in clause:
            val = values[lit]
            if val == 1:
                return True          # already satisfied at root
            if val == 0:
                out.append(lit)
        if not out:
            self.unsat = True
            return False
        active = self.active
        for lit in out:
            active[abs(lit)] = 1
        self.n_problem += 1
        if len(out) == 1:
            self._assign(out[0], None)
            return True
        self.watches[out[0]].append(out)
        self.watches[out[1]].append(out)
        return True

    # -- trail ---------------------------------------------------------------

    def _assign(self, lit, reason):
        self.values[lit] = 1
        self.values[-lit] = -1
        v = lit if lit > 0 else -lit
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.saved_phase[v] = lit > 0
        self.trail.append(lit)

    def _backtrack(self, target_level):
        if len(self.trail_lim) <= target_level:
            return
        bound = self.trail_lim[target_level]
        values = self.values
        reason = self.reason
        for lit in self.trail[bound:]:
            values[lit] = 0
            values[-lit] = 0
            reason[abs(lit)] = None
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    # -- propagation ---------------------------------------------------------

    def _propagate(self):
        values = self.values
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            ws = watches[-p]
            if not ws:
                continue
            watches[-p] = keep = []
            i = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == -p:
                    c[0] = c[1]
                    c[1] = -p
                first = c[0]
                if values[first] == 1:
                    keep.append(c)
                    continue
                for idx in range(2, len(c)):
                    l = c[idx]
                    if values[l] >= 0:
                        c[1] = l
                        c[idx] = -p
                        watches[l].append(c)
                        break
                else:
                    keep.append(c)
                    if values[first] == -1:
                        keep.extend(ws[i:])
                        return c
                    self._assign(first, c)
        return None

    # -- conflict analysis ---------------------------------------------------

    def _bump_var(self, v):
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > _RESCALE_LIMIT:
            self._rescale()
        else:
            heapq.heappush(self.heap, (-act, v))

    def _rescale(self):
        for v in range(1, self.num_vars + 1):
            self.activity[v] *= _RESCALE_FACTOR
        self.var_inc *= _RESCALE_FACTOR
        values = self.values
        self.heap = [(-self.activity[v], v)
                     for v in range(1, self.num_vars + 1)
                     if self.active[v] and values[v] == 0]
        heapq.heapify(self.heap)

    def _analyze(self, confl):
        """First-UIP learning; returns (learnt_clause, backjump_level)."""
        seen = self._seen
        level = self.level
        trail = self.trail
        cur_level = len(self.trail_lim)
        learnt = []
        to_clear = []
        counter = 0
        p = None
        idx = len(trail) - 1
        while True:
            for l in (confl if p is None else confl[1:]):
                v = l if l > 0 else -l
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump_var(v)
                    if level[v] == cur_level:
                        counter += 1
                    else:
                        learnt.append(l)
            while True:
                p = trail[idx]
                idx -= 1
                v = p if p > 0 else -p
                if seen[v]:
                    break
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[v]
        learnt.insert(0, -p)
        for v in to_clear:
            seen[v] = 0
        if len(learnt) == 1:
            return learnt, 0
        # watch position 1 must hold the deepest remaining literal
        max_pos = 1
        max_level = level[abs(learnt[1])]
        for pos in range(2, len(learnt)):
            lv = level[abs(learnt[pos])]
            if lv > max_level:
                max_level = lv
                max_pos = pos
        learnt[1], learnt[max_pos] = learnt[max_pos], learnt[1]
        return learnt, max_level

    # -- decisions -----------------------------------------------------------

    def _pick_branch(self):
        values = self.values
        activity = self.activity
        heap = self.heap
        while heap:
            neg_act, v = heapq.heappop(heap)
            # stale entries carry an out-of-date activity
            if values[v] == 0 and -neg_act == activity[v]:
                return v if self.saved_phase[v] else -v
        entries = [(-activity[v], v)
                   for v in range(1, self.num_vars + 1)
                   if self.active[v] and values[v] == 0]
        if not entries:
            return None
        heapq.heapify(entries)
        self.heap = entries
        _, v = heapq.heappop(entries)
        return v if self.saved_phase[v] else -v

    # -- learned clause deletion ----------------------------------------------

    def _locked(self, c):
        lit = c[0]
        return self.values[lit] == 1 and self.reason[abs(lit)] is c

    def _reduce_learnts(self):
        self.learnts.sort(key=len)
        keep_n = len(self.learnts) // 2
        kept = []
        removed = []
        for pos, c in enumerate(self.learnts):
            if pos < keep_n or len(c) <= 2 or self._locked(c):
                kept.append(c)
            else:
                removed.append(c)
        if removed:
            dead = set(map(id, removed))
            watches = self.watches
            for s in range(len(watches)):
                ws = watches[s]
                if ws:
                    watches[s] = [c for c in ws if id(c) not in dead]
            self.learnts = kept
            self.stats.deleted += len(removed)
        self.max_learnts *= 1.3

    # -- main loop -----------------------------------------------------------

    def solve(self, time_budget_s: Optional[float] = None) -> SolveOutcome:
        """Run search until SAT, UNSAT, or the time budget runs out.

        Returns to decision level 0 before returning, whatever the outcome,
        so the solver stays usable for further clauses and calls.  UNSAT is
        permanent; later calls return it immediately.
        """
        self.stats = stats = SolveStats()
        if self.unsat:
            return SolveOutcome(UNSAT, None, stats)
        deadline = None
        if time_budget_s is not None:
            if time_budget_s <= 0:
                return SolveOutcome(UNKNOWN, None, stats)
            deadline = time.monotonic() + time_budget_s
        restart_limit = 100.0
        conflicts_at_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                stats.conflicts += 1
                if not self.trail_lim:
                    self.unsat = True
                    return SolveOutcome(UNSAT, None, stats)
                learnt, back_level = self._analyze(confl)
                self._backtrack(back_level)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._assign(learnt[0], learnt)
                stats.learned += 1
                self.var_inc /= self.var_decay
                if deadline is not None and time.monotonic() > deadline:
                    self._backtrack(0)
                    return SolveOutcome(UNKNOWN, None, stats)
                if stats.conflicts - conflicts_at_restart >= restart_limit:
                    conflicts_at_restart = stats.conflicts
                    restart_limit *= 1.5
                    stats.restarts += 1
                    self._backtrack(0)
                if len(self.learnts) > self.max_learnts:
                    self._reduce_learnts()
            else:
                if deadline is not None and time.monotonic() > deadline:
                    self._backtrack(0)
                    return SolveOutcome(UNKNOWN, None, stats)
                lit = self._pick_branch()
                if lit is None:
                    values = self.values
                    model = {v: values[v] == 1
                             for v in range(1, self.num_vars + 1)
                             if self.active[v]}
                    self._backtrack(0)
                    return SolveOutcome(SAT, model, stats)
                stats.decisions += 1
                self.trail_lim.append(len(self.trail))
                self._assign(lit, None)

    # -- inspection ----------------------------------------------------------

    def export_dimacs(self) -> str:
        """DIMACS text of every clause ever passed to add_clause, verbatim.

        Only available when constructed with archive=True.
        """
        if self._archive is None:
            raise RuntimeError("solver was not constructed with archive=True")
        lines = [f"p cnf {self.num_vars} {len(self._archive)}"]
        for clause in self._archive:
            lines.append(" ".join(map(str, clause)) + " 0")
        return "\n".join(lines) + "\n"
