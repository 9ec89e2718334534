"""Text formats: the .flt filter format, DIMACS CNF, varmap, CSV, dot.

The .flt format, one directive per line::

    # anything after a hash is a comment
    filter traffic_monitor
    states 4
    initial 0
    out 0 green
    out 1 red
    trans 0 go 1

Tokens (names, observation labels, colors) match [A-Za-z0-9_]+.  Every
state needs exactly one `out` line listing its colors; `initial` may
repeat for multiple initial states; `trans src label dst` declares one
labelled edge and may not repeat verbatim.  Parse errors carry the
1-based line number.

Writing is canonical: initial lines ascending, out lines in state order
with colors in declared-alphabet order, trans lines sorted by (src,
label, dst).  Writing a parsed file reproduces it byte for byte once it
is in canonical form, and write-parse-write is always a fixed point.
"""
from __future__ import annotations

import io
import re
from typing import Optional

from .filters import Filter
from .minimize import MinimizeReport

_TOKEN = re.compile(r"[A-Za-z0-9_]+\Z")

STATS_HEADER = "method,k,outcome,elapsed_ms,clauses_in_solver,best_size_so_far"


class FltError(ValueError):
    def __init__(self, message, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _check_token(tok, line, what):
    if not _TOKEN.match(tok):
        raise FltError(f"bad {what} token {tok!r}", line)
    return tok


def parse_flt(text: str) -> Filter:
    name = None
    n_states = None
    initial = []
    outs = {}
    trans = []
    seen_trans = set()
    obs_order = []
    col_order = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        directive, args = fields[0], fields[1:]
        if directive == "filter":
            if name is not None:
                raise FltError("duplicate filter directive", lineno)
            if len(args) != 1:
                raise FltError("filter needs exactly one name", lineno)
            name = _check_token(args[0], lineno, "name")
        elif directive == "states":
            if n_states is not None:
                raise FltError("duplicate states directive", lineno)
            if len(args) != 1 or not args[0].isdigit():
                raise FltError("states needs one non-negative count", lineno)
            n_states = int(args[0])
        elif directive == "initial":
            if len(args) != 1 or not args[0].isdigit():
                raise FltError("initial needs one state id", lineno)
            initial.append((int(args[0]), lineno))
        elif directive == "out":
            if len(args) < 2 or not args[0].isdigit():
                raise FltError("out needs a state id and colors", lineno)
            v = int(args[0])
            if v in outs:
                raise FltError(f"duplicate out line for state {v}", lineno)
            cols = [_check_token(c, lineno, "color") for c in args[1:]]
            if len(set(cols)) != len(cols):
                raise FltError(f"repeated color for state {v}", lineno)
            outs[v] = (cols, lineno)
            for c in cols:
                if c not in col_order:
                    col_order.append(c)
        elif directive == "trans":
            if len(args) != 3 or not args[0].isdigit() or not args[2].isdigit():
                raise FltError("trans needs src label dst", lineno)
            src, dst = int(args[0]), int(args[2])
            y = _check_token(args[1], lineno, "observation")
            if (src, y, dst) in seen_trans:
                raise FltError(f"duplicate trans {src} {y} {dst}", lineno)
            seen_trans.add((src, y, dst))
            trans.append((src, y, dst, lineno))
            if y not in obs_order:
                obs_order.append(y)
        else:
            raise FltError(f"unknown directive {directive!r}", lineno)
    if n_states is None:
        raise FltError("missing states directive")
    if not initial:
        raise FltError("missing initial directive")
    for v, lineno in initial:
        if not 0 <= v < n_states:
            raise FltError(f"initial state {v} out of range", lineno)
    for v in range(n_states):
        if v not in outs:
            raise FltError(f"state {v} has no outputs")
    for v, (_cols, lineno) in outs.items():
        if not 0 <= v < n_states:
            raise FltError(f"out line for unknown state {v}", lineno)
    transitions = {}
    for src, y, dst, lineno in trans:
        for end in (src, dst):
            if not 0 <= end < n_states:
                raise FltError(f"transition mentions unknown state {end}",
                               lineno)
        transitions.setdefault((src, dst), set()).add(y)
    return Filter(
        n_states=n_states,
        initial=frozenset(v for v, _ in initial),
        observations=tuple(obs_order),
        transitions={k: frozenset(v) for k, v in transitions.items()},
        colors=tuple(col_order),
        coloring={v: frozenset(cols) for v, (cols, _) in outs.items()},
        name=name if name is not None else "filter")


def write_flt(flt: Filter) -> str:
    if not _TOKEN.match(flt.name):
        raise ValueError(f"filter name {flt.name!r} not writable")
    col_pos = {c: i for i, c in enumerate(flt.colors)}
    buf = io.StringIO()
    buf.write(f"filter {flt.name}\n")
    buf.write(f"states {flt.n_states}\n")
    for v in sorted(flt.initial):
        buf.write(f"initial {v}\n")
    for v in range(flt.n_states):
        cols = sorted(flt.coloring[v], key=col_pos.__getitem__)
        buf.write(f"out {v} {' '.join(cols)}\n")
    rows = []
    for (src, dst), labels in flt.transitions.items():
        for y in labels:
            rows.append((src, y, dst))
    for src, y, dst in sorted(rows):
        buf.write(f"trans {src} {y} {dst}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# DIMACS and the variable map

def write_dimacs(num_vars: int, clauses) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    for clause in clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str):
    num_vars = None
    n_clauses = None
    clauses = []
    pending = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line {line!r}")
            num_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise ValueError("clause without terminating 0")
    if num_vars is None:
        raise ValueError("missing problem line")
    if n_clauses is not None and n_clauses != len(clauses):
        raise ValueError(f"problem line says {n_clauses} clauses, "
                         f"found {len(clauses)}")
    return num_vars, clauses


def write_varmap(layout) -> str:
    """One line per CNF variable: id, block letter, coordinates."""
    lines = []
    for var in range(1, layout.num_cnf_vars + 1):
        desc = layout.decode(var)
        lines.append(" ".join(str(part) for part in (var,) + desc))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV and dot

def write_stats_csv(report: MinimizeReport) -> str:
    rows = [STATS_HEADER]
    for it in report.iterations:
        best = "" if it.best_size is None else str(it.best_size)
        rows.append(f"{report.method},{it.k},{it.outcome},"
                    f"{int(round(it.elapsed_s * 1000))},"
                    f"{it.clauses_in_solver},{best}")
    return "\n".join(rows) + "\n"


def write_dot(flt: Filter) -> str:
    """Graphviz rendering, mostly for eyeballing small filters."""
    buf = io.StringIO()
    buf.write(f'digraph {flt.name} {{\n  rankdir=LR;\n')
    for v in range(flt.n_states):
        cols = ",".join(sorted(flt.coloring[v],
                               key=flt.colors.index))
        shape = "doublecircle" if v in flt.initial else "circle"
        buf.write(f'  s{v} [label="{v}\\n{cols}" shape={shape}];\n')
    for (src, dst) in sorted(flt.transitions):
        labels = ",".join(sorted(flt.transitions[(src, dst)]))
        buf.write(f'  s{src} -> s{dst} [label="{labels}"];\n')
    buf.write("}\n")
    return buf.getvalue()
