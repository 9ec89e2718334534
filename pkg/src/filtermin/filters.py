"""Data model and semantics for combinatorial (procrustean) filters.

A filter is a finite transition system whose edges carry observation tokens
and whose states each carry a non-empty set of output colors.  Feeding it an
observation string traces a set of states; the union of their colors is the
filter's output for that string.  A string "crashes" when the traced set
becomes empty, and the set of non-crashing strings is the filter's
interaction language.

This module keeps all value-level semantics in one place:

* tracing and outputs (`trace`, `colors_of`),
* determinism checking and subset-construction determinization,
* output simulation between two filters (`output_simulates`),
* vertex covers and their machinery: observation-children of a state set,
  zipped-ness, common outputs, and the smaller filter induced by a zipped
  cover.

Filters and covers are immutable values; every operation here is read-only.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

CRASH = "crash"
NONDETERMINISTIC = "nondeterministic"
COLOR_ESCAPE = "color-escape"


@dataclass(frozen=True, eq=False)
class Filter:
    """A finite observation-labelled transition system with colored states.

    States are dense ints 0..n_states-1.  `transitions` maps a (src, dst)
    pair to the non-empty set of observation tokens labelling that edge;
    `coloring` gives every state its non-empty color set.  `observations`
    and `colors` fix the declared alphabets and their order (the order is
    load-bearing: variable numbering and canonical serialization follow it).
    """

    n_states: int
    initial: frozenset
    observations: tuple
    transitions: dict
    colors: tuple
    coloring: dict
    name: str = "filter"

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("a filter needs at least one state")
        states = range(self.n_states)
        object.__setattr__(self, "initial", frozenset(int(v) for v in self.initial))
        if not self.initial:
            raise ValueError("a filter needs at least one initial state")
        if not self.initial <= set(states):
            raise ValueError("initial state out of range")
        obs = tuple(self.observations)
        cols = tuple(self.colors)
        if len(set(obs)) != len(obs) or len(set(cols)) != len(cols):
            raise ValueError("duplicate token in alphabet")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "colors", cols)
        obs_set, col_set = set(obs), set(cols)
        trans = {}
        for (src, dst), labels in self.transitions.items():
            labels = frozenset(labels)
            if not labels:
                continue
            if src not in states or dst not in states:
                raise ValueError(f"transition ({src},{dst}) out of range")
            if not labels <= obs_set:
                raise ValueError(f"undeclared observation on edge ({src},{dst})")
            trans[(src, dst)] = labels
        object.__setattr__(self, "transitions", trans)
        coloring = {}
        for v in states:
            got = frozenset(self.coloring.get(v, ()))
            if not got:
                raise ValueError(f"state {v} has no outputs")
            if not got <= col_set:
                raise ValueError(f"undeclared color on state {v}")
            coloring[v] = got
        if set(self.coloring) - set(states):
            raise ValueError("coloring mentions unknown state")
        object.__setattr__(self, "coloring", coloring)

    @classmethod
    def build(cls, n_states, initial, edges, coloring, observations=None,
              colors=None, name="filter"):
        """Convenience constructor from (src, obs, dst) triples.

        Alphabets default to first-appearance order: edge list order for
        observations, state order for colors.  `coloring` may be a dict
        keyed by state or a sequence indexed by state.
        """
        if not isinstance(coloring, dict):
            coloring = {v: cs for v, cs in enumerate(coloring)}
        trans = {}
        seen_obs = []
        for src, y, dst in edges:
            trans.setdefault((src, dst), set()).add(y)
            if y not in seen_obs:
                seen_obs.append(y)
        if observations is None:
            observations = tuple(seen_obs)
        if colors is None:
            seen_cols = []
            for v in range(n_states):
                for c in sorted(coloring.get(v, ())):
                    if c not in seen_cols:
                        seen_cols.append(c)
            colors = tuple(seen_cols)
        return cls(n_states=n_states, initial=frozenset(initial),
                   observations=observations,
                   transitions={k: frozenset(v) for k, v in trans.items()},
                   colors=colors, coloring=dict(coloring), name=name)

    @cached_property
    def succ(self):
        """(state, observation) -> sorted tuple of successor states."""
        table = {}
        for (src, dst), labels in self.transitions.items():
            for y in labels:
                table.setdefault((src, y), []).append(dst)
        return {k: tuple(sorted(v)) for k, v in table.items()}

    @cached_property
    def _obs_set(self):
        return frozenset(self.observations)

    @cached_property
    def out_adjacency(self):
        """state -> sorted tuple of successor states over any observation."""
        table = {v: set() for v in range(self.n_states)}
        for (src, dst) in self.transitions:
            table[src].add(dst)
        return {v: tuple(sorted(d)) for v, d in table.items()}

    @cached_property
    def out_labels(self):
        """state -> sorted tuple of observation tokens with an outgoing edge."""
        table = {v: set() for v in range(self.n_states)}
        for (src, _dst), labels in self.transitions.items():
            table[src].update(labels)
        return {v: tuple(sorted(d)) for v, d in table.items()}

    def children(self, v, y):
        return self.succ.get((v, y), ())


# ---------------------------------------------------------------------------
# tracing and outputs

def _step(f: Filter, current, y) -> frozenset:
    out = set()
    for v in current:
        out.update(f.children(v, y))
    return frozenset(out)


def trace(f: Filter, start, s) -> frozenset:
    """States reached from `start` on observation string `s`.

    Crashing (no run survives) yields the empty set.  A token outside the
    declared alphabet is a malformed input and is rejected, which is a
    different thing than a crash on a declared token with no edge.
    """
    current = frozenset(start)
    if not current <= set(range(f.n_states)):
        raise ValueError("trace start set out of range")
    for y in s:
        if y not in f._obs_set:
            raise ValueError(f"unknown observation token {y!r}")
        current = _step(f, current, y)
        if not current:
            return frozenset()
    return current


def colors_of(f: Filter, s) -> frozenset:
    """Union of colors over the states reached from the initial set on `s`."""
    reached = trace(f, f.initial, s)
    out = set()
    for v in reached:
        out.update(f.coloring[v])
    return frozenset(out)


def interaction_alive(f: Filter, s) -> bool:
    """True when `s` is in the filter's interaction language (does not crash)."""
    return bool(trace(f, f.initial, s))


# ---------------------------------------------------------------------------
# determinism

def is_deterministic(f: Filter) -> bool:
    """One initial state and pairwise label-disjoint sibling edges."""
    if len(f.initial) != 1:
        return False
    total = {}
    union = {}
    for (src, _dst), labels in f.transitions.items():
        total[src] = total.get(src, 0) + len(labels)
        union.setdefault(src, set()).update(labels)
    return all(total[src] == len(union[src]) for src in total)


def determinize(f: Filter) -> Filter:
    """Subset construction over the reachable part.

    State-set colors are unioned, so outputs per string are preserved
    exactly.  Result states are numbered in BFS discovery order, with the
    observation alphabet scanned in declared order, so the construction is
    reproducible.
    """
    start = frozenset(f.initial)
    index = {start: 0}
    order = [start]
    queue = deque([start])
    trans = {}
    while queue:
        cur = queue.popleft()
        i = index[cur]
        for y in f.observations:
            nxt = _step(f, cur, y)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            trans.setdefault((i, index[nxt]), set()).add(y)
    coloring = {}
    for i, group in enumerate(order):
        got = set()
        for v in group:
            got.update(f.coloring[v])
        coloring[i] = frozenset(got)
    return Filter(n_states=len(order), initial=frozenset({0}),
                  observations=f.observations,
                  transitions={k: frozenset(v) for k, v in trans.items()},
                  colors=f.colors, coloring=coloring, name=f.name + "_det")


def reachable_states(f: Filter) -> frozenset:
    seen = set(f.initial)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in f.out_adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def strip_unreachable(f: Filter):
    """Drop unreachable states, renumbering densely.

    Returns (new filter, tuple of removed old ids).  Minimization assumes
    every state is reachable; loaders call this first and warn.
    """
    keep = sorted(reachable_states(f))
    if len(keep) == f.n_states:
        return f, ()
    remap = {old: new for new, old in enumerate(keep)}
    trans = {(remap[s], remap[d]): labels
             for (s, d), labels in f.transitions.items()
             if s in remap and d in remap}
    coloring = {remap[v]: f.coloring[v] for v in keep}
    removed = tuple(v for v in range(f.n_states) if v not in remap)
    g = Filter(n_states=len(keep), initial=frozenset(remap[v] for v in f.initial),
               observations=f.observations, transitions=trans,
               colors=f.colors, coloring=coloring, name=f.name)
    return g, removed


# ---------------------------------------------------------------------------
# output simulation

@dataclass(frozen=True)
class SimulationVerdict:
    """Outcome of an output-simulation check, with a shortest witness on failure.

    failure_kind is one of CRASH (candidate dies on a live string),
    NONDETERMINISTIC (candidate reaches two or more states on a live
    string), or COLOR_ESCAPE (candidate's output is empty or not a subset
    of the reference's output).
    """

    holds: bool
    witness: Optional[tuple] = None
    failure_kind: Optional[str] = None

    def __post_init__(self):
        if self.holds != (self.witness is None and self.failure_kind is None):
            raise ValueError("verdict carries a witness iff it fails")


def output_simulates(candidate: Filter, reference: Filter) -> SimulationVerdict:
    """Check that `candidate` admits every live string of `reference`, reaching
    exactly one state whose colors form a non-empty subset of the reference's
    output for that string.

    Implemented as a breadth-first search over reachable pairs of traced
    state sets, so a reported witness is a shortest failing string.
    """
    missing = set(reference.observations) - set(candidate.observations)
    if missing:
        raise ValueError(f"candidate lacks observation tokens {sorted(missing)}")

    def union_colors(f, group):
        out = set()
        for v in group:
            out.update(f.coloring[v])
        return out

    start = (frozenset(reference.initial), frozenset(candidate.initial))
    parents = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        ref_set, cand_set = pair
        kind = None
        if not cand_set:
            kind = CRASH
        elif len(cand_set) >= 2:
            kind = NONDETERMINISTIC
        else:
            got = union_colors(candidate, cand_set)
            want = union_colors(reference, ref_set)
            if not got or not got <= want:
                kind = COLOR_ESCAPE
        if kind is not None:
            witness = []
            node = pair
            while parents[node] is not None:
                node, y = parents[node]
                witness.append(y)
            return SimulationVerdict(holds=False, witness=tuple(reversed(witness)),
                                     failure_kind=kind)
        for y in reference.observations:
            ref_next = _step(reference, ref_set, y)
            if not ref_next:
                continue  # string leaves the reference's language
            cand_next = _step(candidate, cand_set, y)
            nxt = (ref_next, cand_next)
            if nxt not in parents:
                parents[nxt] = (pair, y)
                queue.append(nxt)
    return SimulationVerdict(holds=True)


# ---------------------------------------------------------------------------
# covers

@dataclass(frozen=True, eq=False)
class Cover:
    """An ordered collection of state subsets over a filter.

    Empty subsets are permitted in intermediate values; a cover is valid
    for minimization when the union of its subsets is the whole state set.
    """

    subsets: tuple
    over: Filter

    def __post_init__(self):
        states = set(range(self.over.n_states))
        subsets = tuple(frozenset(k) for k in self.subsets)
        for k in subsets:
            if not k <= states:
                raise ValueError("cover subset mentions unknown state")
        object.__setattr__(self, "subsets", subsets)

    @property
    def size(self) -> int:
        return len(self.subsets)

    def is_valid(self) -> bool:
        union = set()
        for k in self.subsets:
            union.update(k)
        return union == set(range(self.over.n_states))


def children_of_set(f: Filter, group, y) -> frozenset:
    """Union of y-successors over a state set."""
    return _step(f, frozenset(group), y)


def common_outputs(f: Filter, group) -> frozenset:
    """Intersection of member colors; demands a non-empty group."""
    group = frozenset(group)
    if not group:
        raise ValueError("common_outputs of an empty group")
    it = iter(group)
    out = set(f.coloring[next(it)])
    for v in it:
        out &= f.coloring[v]
        if not out:
            break
    return frozenset(out)


def find_zip_violation(cover: Cover):
    """First (subset index, observation) whose children fit in no subset.

    "First" is lowest subset index, then declared observation order; None
    when the cover is zipped.
    """
    f = cover.over
    subsets = cover.subsets
    for i, group in enumerate(subsets):
        if not group:
            continue
        for y in f.observations:
            ch = children_of_set(f, group, y)
            if ch and not any(ch <= other for other in subsets):
                return (i, y)
    return None


def is_zipped(cover: Cover) -> bool:
    return find_zip_violation(cover) is None


def identity_cover(f: Filter) -> Cover:
    """The singleton-per-state cover; always valid and zipped."""
    return Cover(tuple(frozenset((v,)) for v in range(f.n_states)), f)


def induced_filter(cover: Cover) -> Filter:
    """Collapse a valid zipped cover into a filter with one state per subset.

    Ties resolve deterministically: transitions enter the lowest-indexed
    subset containing all children, the initial state is the lowest-indexed
    subset containing the original initial state, and each state is colored
    with the lexicographically smallest common output of its subset.
    """
    f = cover.over
    if len(f.initial) != 1:
        raise ValueError("induced_filter needs a single initial state")
    if not cover.is_valid():
        raise ValueError("cover does not cover every state")
    groups = [k for k in cover.subsets if k]
    v0 = next(iter(f.initial))
    init_idx = next((i for i, k in enumerate(groups) if v0 in k), None)
    if init_idx is None:
        raise ValueError("initial state not covered")
    coloring = {}
    for i, group in enumerate(groups):
        shared = common_outputs(f, group)
        if not shared:
            raise ValueError(f"subset {i} has no common output")
        coloring[i] = frozenset({min(shared)})
    trans = {}
    for i, group in enumerate(groups):
        for y in f.observations:
            ch = children_of_set(f, group, y)
            if not ch:
                continue
            j = next((jj for jj, other in enumerate(groups) if ch <= other), None)
            if j is None:
                raise ValueError(f"cover is not zipped at subset {i} on {y!r}")
            trans.setdefault((i, j), set()).add(y)
    return Filter(n_states=len(groups), initial=frozenset({init_idx}),
                  observations=f.observations,
                  transitions={k: frozenset(v) for k, v in trans.items()},
                  colors=f.colors, coloring=coloring,
                  name=f.name + "_induced")


# ---------------------------------------------------------------------------
# helpers for tests and benchmarks

def sample_language(f: Filter, rng, max_len: int) -> tuple:
    """A random string from the filter's interaction language (never crashes)."""
    current = frozenset(f.initial)
    want = rng.randbelow(max_len + 1)
    out = []
    for _ in range(want):
        options = sorted({y for v in current for y in f.out_labels[v]})
        if not options:
            break
        y = options[rng.randbelow(len(options))]
        out.append(y)
        current = _step(f, current, y)
    return tuple(out)


def canonical_key(f: Filter):
    """Isomorphism key for the reachable part of a deterministic filter.

    Two deterministic filters get equal keys exactly when renumbering
    states makes them identical (same tokens, same structure, same colors).
    """
    if not is_deterministic(f):
        raise ValueError("canonical_key needs a deterministic filter")
    v0 = next(iter(f.initial))
    index = {v0: 0}
    order = [v0]
    queue = deque([v0])
    while queue:
        v = queue.popleft()
        for y in sorted(f.observations):
            for w in f.children(v, y):
                if w not in index:
                    index[w] = len(order)
                    order.append(w)
                    queue.append(w)
    edges = []
    for (src, dst), labels in f.transitions.items():
        if src in index and dst in index:
            for y in labels:
                edges.append((index[src], y, index[dst]))
    colors = tuple(tuple(sorted(f.coloring[v])) for v in order)
    return (len(order), colors, tuple(sorted(edges)))
