"""Anytime minimization: shrink a size bound with one incremental solver.

Both methods build the constraint system once at bound k = |V|, then after
every satisfying assignment ban the highest subset slot with unit clauses
and re-solve, reusing everything the solver has learned.  An unsatisfiable
step proves the last cover minimal; running out of budget still leaves the
best cover found so far.

The lazy variant withholds the children-containment ("zip") clauses and
loads them in groups only when a proposed cover actually violates the zip
condition, which keeps the loaded formula a fraction of the full one on
filters with many observations.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .encoding import (build_cnf, build_layout, ban_size_units,
                       cover_from_model, zip1_clauses_for_state,
                       zip2_clauses_for_obs)
from .filters import (Cover, Filter, find_zip_violation, identity_cover,
                      induced_filter)
from .sat import SAT, UNSAT, CdclSolver

METHOD_SAT = "sat"
METHOD_LAZY = "lazy-sat"


class Budget:
    """Wall-clock allowance for the solving phase of a minimize run.

    Construction does not start the clock; `start` does, so formula
    building stays outside the budget.  A None allowance never expires.
    """

    def __init__(self, seconds: Optional[float] = None):
        if seconds is not None and seconds < 0:
            raise ValueError("budget must be >= 0")
        self.seconds = seconds
        self._deadline = None

    def start(self) -> "Budget":
        if self.seconds is not None:
            self._deadline = time.monotonic() + self.seconds
        return self

    def remaining(self) -> Optional[float]:
        if self._deadline is None:
            return None
        return self._deadline - time.monotonic()

    @property
    def expired(self) -> bool:
        rem = self.remaining()
        return rem is not None and rem <= 0


@dataclass(frozen=True)
class IterationStat:
    """Outcome of one size bound k (lazy reload rounds are aggregated)."""

    k: int
    outcome: str
    elapsed_s: float
    clauses_in_solver: int
    best_size: Optional[int]


@dataclass(frozen=True)
class MinimizeReport:
    method: str
    best_cover: Cover
    best_filter: Filter
    proven_minimal: bool
    iterations: tuple
    zip_obs_loaded: int = 0
    zip_pairs_loaded: int = 0

    @property
    def best_size(self) -> int:
        return self.best_cover.size

    @property
    def final_clause_count(self) -> int:
        if not self.iterations:
            return 0
        return self.iterations[-1].clauses_in_solver

    def summary_lines(self):
        head = (f"method={self.method} best_size={self.best_size} "
                f"proven={self.proven_minimal}")
        rows = [head]
        for it in self.iterations:
            rows.append(f"  k={it.k} {it.outcome} {it.elapsed_s * 1000:.1f}ms "
                        f"clauses={it.clauses_in_solver} best={it.best_size}")
        return rows


def _better(best: Optional[Cover], cand: Cover) -> Cover:
    if best is None or cand.size < best.size:
        return cand
    return best


def _finish(method, flt, best, proven, iterations, obs_loaded=0, pairs_loaded=0):
    if best is None:
        best = identity_cover(flt)
        proven = flt.n_states == 1
    return MinimizeReport(
        method=method, best_cover=best, best_filter=induced_filter(best),
        proven_minimal=proven, iterations=tuple(iterations),
        zip_obs_loaded=obs_loaded, zip_pairs_loaded=pairs_loaded)


def minimize_sat(flt: Filter, budget: Optional[Budget] = None,
                 seed: int = 0) -> MinimizeReport:
    """Eager method: the full constraint system up front, then ban and shrink."""
    if budget is None:
        budget = Budget(None)
    layout = build_layout(flt, flt.n_states)
    solver = CdclSolver(num_vars=layout.num_cnf_vars, seed=seed)
    for clause in build_cnf(layout, lazy=False).clauses:
        solver.add_clause(clause)
    budget.start()
    best = None
    proven = False
    iterations = []
    k = layout.k
    while k >= 1:
        t0 = time.monotonic()
        out = solver.solve(budget.remaining())
        elapsed = time.monotonic() - t0
        if out.status == SAT:
            best = _better(best, cover_from_model(layout, out.model))
            iterations.append(IterationStat(
                k=k, outcome=SAT, elapsed_s=elapsed,
                clauses_in_solver=solver.n_problem, best_size=best.size))
            for unit in ban_size_units(layout, k):
                solver.add_clause(unit)
            k -= 1
            if k == 0:
                proven = True
        else:
            if out.status == UNSAT:
                proven = True
            iterations.append(IterationStat(
                k=k, outcome=out.status, elapsed_s=elapsed,
                clauses_in_solver=solver.n_problem,
                best_size=best.size if best else None))
            break
    return _finish(METHOD_SAT, flt, best, proven, iterations)


def minimize_lazy(flt: Filter, budget: Optional[Budget] = None,
                  seed: int = 0) -> MinimizeReport:
    """Lazy method: zip clauses enter the solver only on observed violations.

    Loaded groups are sized to the initial bound and persist across bans;
    root simplification inside the solver prunes the parts that mention
    banned slots.  Each violated (subset, observation) pair loads the
    routing clauses for that observation plus the containment clauses for
    the subset's member states, so every reload round strictly grows the
    loaded set and the inner loop terminates.
    """
    if budget is None:
        budget = Budget(None)
    layout = build_layout(flt, flt.n_states)
    solver = CdclSolver(num_vars=layout.num_cnf_vars, seed=seed)
    for clause in build_cnf(layout, lazy=True).clauses:
        solver.add_clause(clause)
    budget.start()
    loaded_obs = set()
    loaded_pairs = set()        # (state, obs) with containment clauses in
    best = None
    proven = False
    iterations = []
    k = layout.k
    while k >= 1:
        k_elapsed = 0.0
        t0 = time.monotonic()
        stop = False
        while True:
            out = solver.solve(budget.remaining())
            if out.status != SAT:
                if out.status == UNSAT:
                    proven = True
                k_elapsed += time.monotonic() - t0
                iterations.append(IterationStat(
                    k=k, outcome=out.status, elapsed_s=k_elapsed,
                    clauses_in_solver=solver.n_problem,
                    best_size=best.size if best else None))
                stop = True
                break
            cover = cover_from_model(layout, out.model)
            violation = find_zip_violation(cover)
            if violation is None:
                best = _better(best, cover)
                k_elapsed += time.monotonic() - t0
                iterations.append(IterationStat(
                    k=k, outcome=SAT, elapsed_s=k_elapsed,
                    clauses_in_solver=solver.n_problem, best_size=best.size))
                for unit in ban_size_units(layout, k):
                    solver.add_clause(unit)
                break
            i, y = violation
            progress = False
            if y not in loaded_obs:
                loaded_obs.add(y)
                progress = True
                for clause in zip2_clauses_for_obs(layout, y):
                    solver.add_clause(clause)
            for v in sorted(cover.subsets[i]):
                if layout.child(v, y) is None or (v, y) in loaded_pairs:
                    continue
                loaded_pairs.add((v, y))
                progress = True
                for clause in zip1_clauses_for_state(layout, v, y):
                    solver.add_clause(clause)
            if not progress:
                raise RuntimeError(
                    "zip violation with all groups loaded; encoding bug")
        if stop:
            break
        k -= 1
        if k == 0:
            proven = True
    return _finish(METHOD_LAZY, flt, best, proven, iterations,
                   obs_loaded=len(loaded_obs), pairs_loaded=len(loaded_pairs))


def minimize(flt: Filter, method: str = METHOD_SAT,
             budget: Optional[Budget] = None, seed: int = 0) -> MinimizeReport:
    if method == METHOD_SAT:
        return minimize_sat(flt, budget=budget, seed=seed)
    if method == METHOD_LAZY:
        return minimize_lazy(flt, budget=budget, seed=seed)
    raise ValueError(f"unknown method {method!r}")
