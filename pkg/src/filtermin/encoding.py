"""Constraint renderings of the bounded-size zipped-cover search.

Given a deterministic filter and a subset budget k, the search asks for up
to k state subsets that cover the initial state, are zipped (each subset's
observation-children fit inside some subset), and each share a common
output.  This module renders that search three ways over one shared
variable layout:

* CNF clauses for the SAT engine (with an optional lazy variant that
  withholds the zip constraints for just-in-time loading),
* linear rows exported in LP format,
* product-form integer constraints evaluated directly on an assignment.

Variable blocks, in id order: R (subset i contains state v), a (subset i's
y-children fit in subset j), b (subset i shares output o), then q (subset i
is used; integer renderings only, never in a clause).  Constant tables are
folded at emission time: clauses and rows that a constant satisfies are
dropped and constant literals never appear.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

from .filters import (Cover, Filter, children_of_set, common_outputs,
                      is_deterministic, reachable_states)

Clause = list  # of signed variable ids

VALID_COVER = "valid_cover"
ZIP1 = "zip1"
ZIP2 = "zip2"
OUT1 = "out1"
OUT2 = "out2"
BAN_UNIT = "ban_unit"


def normalize_clause(lits):
    """Drop duplicate literals, preserving first occurrence; None for tautologies."""
    seen = set()
    out = []
    for lit in lits:
        if lit in seen:
            continue
        if -lit in seen:
            return None
        seen.add(lit)
        out.append(lit)
    return out


class VarLayout:
    """Deterministic bijection between search variables and solver ids.

    Ids are contiguous from 1: the R block (i-major, then state), the a
    block (i, j, observation position), the b block (i, color position),
    then the q block.  CNF never mentions q, so `num_cnf_vars` stops before
    it; the integer renderings use `num_vars` which includes it.
    """

    def __init__(self, flt: Filter, k: int):
        if k < 1:
            raise ValueError("layout needs k >= 1")
        if not is_deterministic(flt):
            raise ValueError("layout needs a deterministic filter")
        if reachable_states(flt) != frozenset(range(flt.n_states)):
            raise ValueError("layout needs every state reachable")
        self.filter = flt
        self.k = k
        self.n = flt.n_states
        self.obs = flt.observations
        self.cols = flt.colors
        self._obs_pos = {y: i for i, y in enumerate(self.obs)}
        self._col_pos = {o: i for i, o in enumerate(self.cols)}
        self._a_base = k * self.n
        self._b_base = self._a_base + k * k * len(self.obs)
        self._q_base = self._b_base + k * len(self.cols)
        # deterministic filter: at most one y-child per (state, observation)
        self._child = {}
        for (v, y), dsts in flt.succ.items():
            self._child[(v, y)] = dsts[0]
        # live (state, observation) pairs, ordered by (state, declared obs order)
        self.live_edges = tuple(sorted(
            ((v, y) for (v, y) in self._child),
            key=lambda e: (e[0], self._obs_pos[e[1]])))
        # (state, color) pairs the state does NOT carry, same ordering idea
        self.zero_outputs = tuple(
            (v, o) for v in range(self.n) for o in self.cols
            if o not in flt.coloring[v])

    # -- variable indexing ---------------------------------------------------

    def r_index(self, i, v):
        self._check_i(i)
        if not 0 <= v < self.n:
            raise ValueError(f"state {v} out of range")
        return (i - 1) * self.n + v + 1

    def a_index(self, i, j, y):
        self._check_i(i)
        self._check_i(j)
        ny = len(self.obs)
        return self._a_base + ((i - 1) * self.k + (j - 1)) * ny + self._obs_pos[y] + 1

    def b_index(self, i, o):
        self._check_i(i)
        return self._b_base + (i - 1) * len(self.cols) + self._col_pos[o] + 1

    def q_index(self, i):
        self._check_i(i)
        return self._q_base + i

    def _check_i(self, i):
        if not 1 <= i <= self.k:
            raise ValueError(f"subset index {i} outside 1..{self.k}")

    @property
    def num_cnf_vars(self):
        return self._q_base

    @property
    def num_vars(self):
        return self._q_base + self.k

    # -- constant tables -----------------------------------------------------

    def t_table(self, y, v):
        """1 when state v has a y-child."""
        return 1 if (v, y) in self._child else 0

    def p_table(self, o, v):
        """1 when color o is among state v's outputs."""
        return 1 if o in self.filter.coloring[v] else 0

    def child(self, v, y):
        return self._child.get((v, y))

    def decode(self, var):
        """Map a variable id back to its block and coordinates."""
        if not 1 <= var <= self.num_vars:
            raise ValueError(f"variable {var} outside layout")
        idx = var - 1
        if idx < self._a_base:
            return ("R", idx // self.n + 1, idx % self.n)
        if idx < self._b_base:
            idx -= self._a_base
            ny = len(self.obs)
            ij, ypos = divmod(idx, ny)
            i, j = divmod(ij, self.k)
            return ("a", i + 1, j + 1, self.obs[ypos])
        if idx < self._q_base:
            idx -= self._b_base
            i, opos = divmod(idx, len(self.cols))
            return ("b", i + 1, self.cols[opos])
        return ("q", idx - self._q_base + 1)


def build_layout(flt: Filter, k: int) -> VarLayout:
    return VarLayout(flt, k)


# ---------------------------------------------------------------------------
# clause schemas

@dataclass
class CnfFormula:
    """Clause list plus a parallel schema tag per clause."""

    num_vars: int
    clauses: list = field(default_factory=list)
    tags: list = field(default_factory=list)

    def add(self, clause, tag):
        self.clauses.append(clause)
        self.tags.append(tag)

    def extend(self, clauses, tag):
        for c in clauses:
            self.add(c, tag)

    def __len__(self):
        return len(self.clauses)

    def counts_by_schema(self):
        out = {}
        for tag in self.tags:
            out[tag[0]] = out.get(tag[0], 0) + 1
        return out


def valid_cover_clauses(layout: VarLayout, lazy: bool):
    """Eager: the initial state sits in some subset.  Lazy: every state does
    (the zip clauses that would otherwise force coverage are withheld)."""
    k, n = layout.k, layout.n
    if lazy:
        states = range(n)
    else:
        states = [next(iter(layout.filter.initial))]
    return [[layout.r_index(i, v) for i in range(1, k + 1)] for v in states]


def zip1_clauses_for_state(layout: VarLayout, v, y):
    """For every subset pair (i, j): if subset i claims state v and routes its
    y-children to subset j, then v's y-child is in subset j.  Empty when v has
    no y-child (the constant makes every instance vacuous)."""
    child = layout.child(v, y)
    if child is None:
        return []
    k, n = layout.k, layout.n
    ny = len(layout.obs)
    ypos = layout._obs_pos[y]
    a_base = layout._a_base
    out = []
    for i in range(1, k + 1):
        r_iv = (i - 1) * n + v + 1
        row = a_base + (i - 1) * k * ny + ypos + 1
        for j in range(1, k + 1):
            a_ijy = row + (j - 1) * ny
            out.append([-a_ijy, -r_iv, (j - 1) * n + child + 1])
    return out


def zip2_clauses_for_obs(layout: VarLayout, y):
    """Every subset routes its y-children somewhere."""
    k = layout.k
    return [[layout.a_index(i, j, y) for j in range(1, k + 1)]
            for i in range(1, k + 1)]


def out1_clauses(layout: VarLayout):
    """A subset claiming an output cannot contain a state lacking it."""
    out = []
    for i in range(1, layout.k + 1):
        for v, o in layout.zero_outputs:
            out.append([-layout.b_index(i, o), -layout.r_index(i, v)])
    return out


def out2_clauses(layout: VarLayout):
    """Every subset claims at least one output."""
    return [[layout.b_index(i, o) for o in layout.cols]
            for i in range(1, layout.k + 1)]


def build_cnf(layout: VarLayout, lazy: bool = False) -> CnfFormula:
    """Render the full CNF (or the lazy base with zip constraints withheld)."""
    f = CnfFormula(num_vars=layout.num_cnf_vars)
    f.extend(valid_cover_clauses(layout, lazy), (VALID_COVER,))
    if not lazy:
        for v, y in layout.live_edges:
            f.extend(zip1_clauses_for_state(layout, v, y), (ZIP1, v, y))
        for y in layout.obs:
            f.extend(zip2_clauses_for_obs(layout, y), (ZIP2, y))
    f.extend(out1_clauses(layout), (OUT1,))
    f.extend(out2_clauses(layout), (OUT2,))
    return f


def ban_size_units(layout: VarLayout, k_banned: int):
    """Unit clauses emptying subset k_banned; shrinks the size bound by one."""
    return [[-layout.r_index(k_banned, v)] for v in range(layout.n)]


# ---------------------------------------------------------------------------
# models and assignments

def cover_from_model(layout: VarLayout, model) -> Cover:
    """Read the R block of a model into a cover, dropping empty subsets but
    keeping subset order.  Variables absent from the model read as false."""
    subsets = []
    for i in range(1, layout.k + 1):
        group = frozenset(v for v in range(layout.n)
                          if model.get(layout.r_index(i, v), False))
        if group:
            subsets.append(group)
    return Cover(tuple(subsets), layout.filter)


def extension_from_cover(layout: VarLayout, cover: Cover) -> dict:
    """Total assignment witnessing a cover, by fixed deterministic rules.

    Non-empty subsets occupy slots 1..m in order (empty entries in the
    cover are skipped so that slot usage is contiguous, which the symmetry
    rows of the integer renderings expect).  a-variables are set exactly
    where children containment holds; slots with no y-children point their
    witness at slot 1.  b-variables follow common outputs; empty slots
    claim the first declared color.  q marks non-empty slots.
    """
    flt = layout.filter
    groups = [g for g in cover.subsets if g]
    if len(groups) > layout.k:
        raise ValueError(f"cover has {len(groups)} non-empty subsets, layout k={layout.k}")
    asg = {}
    first_color = layout.cols[0]
    for i in range(1, layout.k + 1):
        group = groups[i - 1] if i <= len(groups) else frozenset()
        for v in range(layout.n):
            asg[layout.r_index(i, v)] = v in group
        asg[layout.q_index(i)] = bool(group)
        for y in layout.obs:
            ch = children_of_set(flt, group, y) if group else frozenset()
            if ch:
                for j in range(1, layout.k + 1):
                    inside = j <= len(groups) and ch <= groups[j - 1]
                    asg[layout.a_index(i, j, y)] = inside
            else:
                for j in range(1, layout.k + 1):
                    asg[layout.a_index(i, j, y)] = j == 1
        if group:
            shared = common_outputs(flt, group)
            for o in layout.cols:
                asg[layout.b_index(i, o)] = o in shared
        else:
            for o in layout.cols:
                asg[layout.b_index(i, o)] = o == first_color
    return asg


def assignment_satisfies(formula: CnfFormula, asg) -> bool:
    """Direct clause evaluation; absent variables read as false."""
    for clause in formula.clauses:
        for lit in clause:
            val = asg.get(abs(lit), False)
            if (lit > 0) == val:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# integer renderings

@dataclass(frozen=True)
class FeasibilityReport:
    """Per-family verdicts for one assignment against one rendering.

    `uncovered_reachable` is informational: the integer renderings only pin
    the initial state into the cover, so a reachable state every subset
    omits is worth surfacing even though no row fails on it.
    """

    families: dict
    objective: int
    uncovered_reachable: tuple

    @property
    def feasible(self) -> bool:
        return all(self.families.values())


def _uncovered(layout: VarLayout, asg) -> tuple:
    out = []
    for v in range(layout.n):
        if not any(asg.get(layout.r_index(i, v), False)
                   for i in range(1, layout.k + 1)):
            out.append(v)
    return tuple(out)


def eval_inp(layout: VarLayout, asg) -> FeasibilityReport:
    """Evaluate the product-form integer constraints literally on 0/1 values.

    Needs R and q values; a/b are not part of this rendering.  A missing
    y-child contributes 0 for its R term, matching the constant fold that
    makes those factors vacuous.
    """
    k, n = layout.k, layout.n
    r = lambda i, v: int(asg.get(layout.r_index(i, v), False))
    q = lambda i: int(asg.get(layout.q_index(i), False))
    fam = {}
    fam["nesubset"] = all(r(i, v) <= q(i)
                          for i in range(1, k + 1) for v in range(n))
    fam["sym"] = all(q(i) <= q(i - 1) for i in range(2, k + 1))
    v0 = next(iter(layout.filter.initial))
    fam["valid_cover"] = sum(r(j, v0) for j in range(1, k + 1)) >= 1
    zip_ok = True
    for i in range(1, k + 1):
        for y in layout.obs:
            total = 0
            for j in range(1, k + 1):
                prod = 1
                for v in range(n):
                    t = layout.t_table(y, v)
                    child = layout.child(v, y)
                    rj_child = r(j, child) if child is not None else 0
                    prod *= 2 - r(i, v) - t + rj_child
                    if prod == 0:
                        break
                total += prod
            if total < 1:
                zip_ok = False
                break
        if not zip_ok:
            break
    fam["zip"] = zip_ok
    out_ok = True
    for i in range(1, k + 1):
        total = 0
        for o in layout.cols:
            prod = 1
            for v in range(n):
                prod *= 1 - r(i, v) + layout.p_table(o, v)
                if prod == 0:
                    break
            total += prod
        if total < 1:
            out_ok = False
            break
    fam["out"] = out_ok
    objective = sum(q(i) for i in range(1, k + 1))
    return FeasibilityReport(families=fam, objective=objective,
                             uncovered_reachable=_uncovered(layout, asg))


def eval_ilp(layout: VarLayout, asg) -> FeasibilityReport:
    """Evaluate the linear rows (the LP-file rendering) on a full assignment."""
    k, n = layout.k, layout.n
    r = lambda i, v: int(asg.get(layout.r_index(i, v), False))
    a = lambda i, j, y: int(asg.get(layout.a_index(i, j, y), False))
    b = lambda i, o: int(asg.get(layout.b_index(i, o), False))
    q = lambda i: int(asg.get(layout.q_index(i), False))
    fam = {}
    fam["nesubset"] = all(r(i, v) <= q(i)
                          for i in range(1, k + 1) for v in range(n))
    fam["sym"] = all(q(i) <= q(i - 1) for i in range(2, k + 1))
    v0 = next(iter(layout.filter.initial))
    fam["valid_cover"] = sum(r(j, v0) for j in range(1, k + 1)) >= 1
    zip1 = True
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for v, y in layout.live_edges:
                child = layout.child(v, y)
                if a(i, j, y) + r(i, v) + 1 - r(j, child) > 2:
                    zip1 = False
                    break
            if not zip1:
                break
        if not zip1:
            break
    fam["zip1"] = zip1
    fam["zip2"] = all(sum(a(i, j, y) for j in range(1, k + 1)) >= 1
                      for i in range(1, k + 1) for y in layout.obs)
    fam["out1"] = all((1 - b(i, o)) + (1 - r(i, v)) + layout.p_table(o, v) >= 1
                      for i in range(1, k + 1) for (v, o) in layout.zero_outputs)
    fam["out2"] = all(sum(b(i, o) for o in layout.cols) >= 1
                      for i in range(1, k + 1))
    objective = sum(q(i) for i in range(1, k + 1))
    return FeasibilityReport(families=fam, objective=objective,
                             uncovered_reachable=_uncovered(layout, asg))


# ---------------------------------------------------------------------------
# LP export

def write_lp(layout: VarLayout) -> str:
    """Render the linear rows as an LP-format file with binary variables.

    Variable names are R_i_v, a_i_j_y, b_i_o and q_i; row names identify
    the family and coordinates.  Vacuous rows (those a constant satisfies)
    are dropped, mirroring the CNF constant fold.
    """
    k, n = layout.k, layout.n
    buf = io.StringIO()
    w = buf.write
    w("Minimize\n")
    w(" obj: " + " + ".join(f"q_{i}" for i in range(1, k + 1)) + "\n")
    w("Subject To\n")
    for i in range(1, k + 1):
        for v in range(n):
            w(f" NESubset_{i}_{v}: R_{i}_{v} - q_{i} <= 0\n")
    for i in range(2, k + 1):
        w(f" Sym_{i}: q_{i} - q_{i - 1} <= 0\n")
    v0 = next(iter(layout.filter.initial))
    w(" ValidCover: " +
      " + ".join(f"R_{j}_{v0}" for j in range(1, k + 1)) + " >= 1\n")
    for v, y in layout.live_edges:
        child = layout.child(v, y)
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                w(f" Zip1_{i}_{j}_{v}_{y}: a_{i}_{j}_{y} + R_{i}_{v}"
                  f" - R_{j}_{child} <= 1\n")
    for y in layout.obs:
        for i in range(1, k + 1):
            w(f" Zip2_{i}_{y}: " +
              " + ".join(f"a_{i}_{j}_{y}" for j in range(1, k + 1)) + " >= 1\n")
    for i in range(1, k + 1):
        for v, o in layout.zero_outputs:
            w(f" Out1_{i}_{o}_{v}: b_{i}_{o} + R_{i}_{v} <= 1\n")
    for i in range(1, k + 1):
        w(f" Out2_{i}: " +
          " + ".join(f"b_{i}_{o}" for o in layout.cols) + " >= 1\n")
    w("Binary\n")
    for i in range(1, k + 1):
        for v in range(n):
            w(f" R_{i}_{v}\n")
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for y in layout.obs:
                w(f" a_{i}_{j}_{y}\n")
    for i in range(1, k + 1):
        for o in layout.cols:
            w(f" b_{i}_{o}\n")
    for i in range(1, k + 1):
        w(f" q_{i}\n")
    w("End\n")
    return buf.getvalue()
