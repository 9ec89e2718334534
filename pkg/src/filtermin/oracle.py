"""Exhaustive reference search for the smallest zipped cover.

Independent of the constraint encodings on purpose: this enumerates covers
directly and is the ground truth the solver-based methods are tested
against.  Only practical for small filters (roughly up to 7 states).

For each candidate size k, states are assigned membership sets over the
subset indices 1..k in state-id order.  Index symmetry is broken by a
first-use rule: the new indices a state introduces must form a consecutive
block just above the highest index used so far.  Branches where a subset's
members share no output are cut immediately; the zip condition is checked
on complete assignments only.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .filters import (Cover, Filter, induced_filter, is_zipped,
                      output_simulates)


class CapExceeded(RuntimeError):
    """No zipped cover found up to the size cap."""


@dataclass(frozen=True)
class OracleResult:
    minimal_size: int
    witness_cover: Cover
    enumerated: int


def _color_masks(flt: Filter):
    pos = {o: i for i, o in enumerate(flt.colors)}
    return [sum(1 << pos[o] for o in flt.coloring[v])
            for v in range((flt.n_states))]


def brute_minimal(flt: Filter, cap: Optional[int] = None) -> OracleResult:
    """Smallest zipped cover by direct enumeration, with a witness.

    `cap` bounds the sizes tried (default: the state count, which the
    one-state-per-subset cover always achieves).  Raises CapExceeded when
    a smaller cap is given and exhausted.
    """
    n = flt.n_states
    if cap is None:
        cap = n
    if cap < 1:
        raise ValueError("cap must be >= 1")
    colmask = _color_masks(flt)
    enumerated = 0

    for k in range(1, cap + 1):
        membership = [frozenset()] * n
        # group_mask[j] = AND of color masks over members of subset j+1
        group_mask = [(1 << len(flt.colors)) - 1] * k

        def walk(v, max_used):
            nonlocal enumerated
            if v == n:
                if max_used != k:
                    return None
                subsets = [frozenset(u for u in range(n)
                                     if j + 1 in membership[u])
                           for j in range(k)]
                cover = Cover(tuple(subsets), flt)
                enumerated += 1
                if is_zipped(cover):
                    return cover
                return None
            used = list(range(1, max_used + 1))
            ok_used = [j for j in used if group_mask[j - 1] & colmask[v]]
            for fresh in range(0, k - max_used + 1):
                block = list(range(max_used + 1, max_used + 1 + fresh))
                for r in range(0, len(ok_used) + 1):
                    for old in combinations(ok_used, r):
                        chosen = old + tuple(block)
                        if not chosen:
                            continue
                        membership[v] = frozenset(chosen)
                        saved = [group_mask[j - 1] for j in chosen]
                        for j in chosen:
                            group_mask[j - 1] &= colmask[v]
                        found = walk(v + 1, max_used + fresh)
                        for j, m in zip(chosen, saved):
                            group_mask[j - 1] = m
                        membership[v] = frozenset()
                        if found is not None:
                            return found
            return None

        witness = walk(0, 0)
        if witness is not None:
            # belt and braces: the witness must actually work end to end
            verdict = output_simulates(induced_filter(witness), flt)
            if not verdict.holds:
                raise RuntimeError("oracle witness fails simulation; bug")
            return OracleResult(minimal_size=k, witness_cover=witness,
                                enumerated=enumerated)
    raise CapExceeded(f"no zipped cover of size <= {cap}")
