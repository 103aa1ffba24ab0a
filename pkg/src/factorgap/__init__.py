"""Factoring decision instances reduced to MAX-3SAT, with witness transport
in both directions and exact oracles to check every step."""

__version__ = "0.1.0"

from .alpha import (
    CircuitLayout,
    FactoringInstance,
    alpha_encode,
    alpha_recognize,
    alpha_witness,
    layout_for,
    read_factor,
)
from .amplifiers import (
    IDENTITY,
    AmplifiedInstance,
    AmplifierDescriptor,
    beta_recognize,
    beta_transform,
    beta_witness,
)
from .backends import BackendConfig, ShorTrace, cf_convergents, decide_factoring, order_find, shor_factor, smallest_prime_factor
from .cnf import GAP, CnfFormula, GapSpec, Literal, SatStats, evaluate, parse_dimacs, serialize_dimacs, strictify
from .oracles import OracleBudget, greedy_conditional_expectation, is_satisfiable, max_sat_exact, random_assignment
from .pipeline import GapReport, SolveReport, build_s_instance, measure_gap, membership, solve_s
