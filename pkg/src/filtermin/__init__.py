"""Minimization of deterministic filtering automata via zipped covers."""

from .filters import (CRASH, Cover, Filter, SimulationVerdict, canonical_key,
                      children_of_set, colors_of, common_outputs, determinize,
                      find_zip_violation, identity_cover, induced_filter,
                      interaction_alive, is_deterministic, is_zipped,
                      output_simulates, reachable_states, sample_language,
                      strip_unreachable, trace)
from .encoding import (CnfFormula, FeasibilityReport, VarLayout,
                       assignment_satisfies, ban_size_units, build_cnf,
                       build_layout, cover_from_model, eval_ilp, eval_inp,
                       extension_from_cover, write_lp)
from .generate import GenParams, GenerationError, generate
from .minimize import (Budget, IterationStat, METHOD_LAZY, METHOD_SAT,
                       MinimizeReport, minimize, minimize_lazy, minimize_sat)
from .oracle import CapExceeded, OracleResult, brute_minimal
from .sat import SAT, UNKNOWN, UNSAT, CdclSolver, SolveOutcome, SolveStats
from .formats import (STATS_HEADER, FltError, parse_dimacs, parse_flt, write_dimacs,
                      write_dot, write_flt, write_stats_csv, write_varmap)
from .bench import BENCH_HEADER, SUITES, BenchCase, run_bench, suite_cases

__version__ = "0.1.0"
