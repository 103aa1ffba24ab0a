"""Exact ground-truth solvers and the classical 7/8 baselines.

Nothing here knows how the formulas were produced; these are the reference
answers every reduction property is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .cnf import CnfFormula, evaluate
from .errors import BudgetExhausted


@dataclass(frozen=True)
class OracleBudget:
    max_variables: int = 20
    node_limit: int = 50_000_000

    def __post_init__(self):
        if self.max_variables < 1 or self.node_limit < 1:
            raise ValueError("budget limits must be positive")


DEFAULT_BUDGET = OracleBudget()


def _bits_from_code(code: int, num_vars: int) -> np.ndarray:
    return np.array([(code >> i) & 1 for i in range(num_vars)], dtype=bool)


def is_satisfiable(F: CnfFormula, budget: OracleBudget = DEFAULT_BUDGET):
    """Return a model of ``F`` or None if it is unsatisfiable.

    Raises BudgetExhausted when the decision limit is hit.
    """
    if F.num_clauses == 0:
        return np.zeros(F.num_vars, dtype=bool)
    offsets, occ_clause, occ_pos = F.occurrences
    status, values, nodes = kernels.dpll(F.matrix, F.num_vars, offsets, occ_clause, occ_pos,
                                         budget.node_limit)
    if status < 0:
        raise BudgetExhausted(f"DPLL gave up after {nodes} decisions")
    if status == 0:
        return None
    model = np.asarray(values[1:]) == 1
    assert evaluate(F, model).satisfied == F.num_clauses
    return model


def greedy_conditional_expectation(F: CnfFormula, order: Sequence[int] | None = None) -> np.ndarray:
    """Method of conditional expectations.

    Variables are fixed in ``order`` (default ascending index), each to the
    value with the larger expected number of satisfied clauses under a
    uniform completion of the rest; ties pick False.  The result satisfies at
    least sum(1 - 2**-w) clauses, w counting distinct literals.
    """
    if order is None:
        order_arr = np.arange(1, F.num_vars + 1, dtype=np.int64)
    else:
        order_arr = np.asarray(list(order), dtype=np.int64)
        if sorted(order_arr.tolist()) != list(range(1, F.num_vars + 1)):
            raise ValueError("order must be a permutation of 1..num_vars")
    offsets, occ_clause, occ_pos = F.occurrences
    values = kernels.greedy_conditional(F.matrix, F.num_vars, offsets, occ_clause, occ_pos, order_arr)
    return np.asarray(values[1:]) == 1


def expected_satisfied(F: CnfFormula):
    """Exact expected satisfied count under a uniform random assignment."""
    from fractions import Fraction

    total = Fraction(0)
    for row in F.matrix:
        lits = [int(l) for l in row if l != 0]
        if any(-l in lits for l in lits):
            total += 1
        else:
            total += 1 - Fraction(1, 2 ** len(lits))
    return total


def random_assignment(F: CnfFormula, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=F.num_vars).astype(bool)


def _max_sat_enumerate(F: CnfFormula):
    best, code = kernels.max_sat_enumerate(F.matrix, F.num_vars)
    return int(best), _bits_from_code(int(code), F.num_vars)


def _max_sat_branch_and_bound(F: CnfFormula, node_limit: int):
    m, nv = F.num_clauses, F.num_vars
    start = greedy_conditional_expectation(F)
    best_unsat = m - evaluate(F, start).satisfied
    best_values = np.zeros(nv + 1, dtype=np.uint8)
    best_values[1:] = start
    if best_unsat == 0:
        return m, start
    offsets, occ_clause, occ_pos = F.occurrences
    # a model closes the search at once; circuit formulas need propagation to find one
    status, values, _ = kernels.dpll(F.matrix, nv, offsets, occ_clause, occ_pos, node_limit)
    if status == 1:
        return m, np.asarray(values[1:]) == 1
    occ_count = np.diff(offsets)[: nv + 1]
    # most-constrained first; value order follows the majority polarity
    var_order = np.array(sorted(range(1, nv + 1), key=lambda v: (-occ_count[v], v)), dtype=np.int64)
    occ_var = np.repeat(np.arange(nv + 1), occ_count)
    pos_count = np.bincount(occ_var[occ_pos == 1], minlength=nv + 1)
    first_value = (2 * pos_count >= occ_count).astype(np.uint8)
    best_unsat, nodes, exhausted = kernels.branch_and_bound(
        F.matrix, nv, offsets, occ_clause, occ_pos, var_order, first_value,
        best_unsat, best_values, node_limit)
    if exhausted:
        raise BudgetExhausted(f"branch and bound gave up after {nodes} nodes")
    return m - int(best_unsat), best_values[1:] == 1


def max_sat_exact(F: CnfFormula, budget: OracleBudget = DEFAULT_BUDGET, method: str = "auto"):
    """Exact MAX-SAT optimum ``(count, witness)``.

    ``method`` is "enumerate", "branch-and-bound" or "auto" (enumerate when
    the formula has at most ``budget.max_variables`` variables).
    """
    if method == "auto":
        method = "enumerate" if F.num_vars <= budget.max_variables else "branch-and-bound"
    if method == "enumerate":
        if F.num_vars > budget.max_variables:
            raise BudgetExhausted(f"{F.num_vars} variables exceeds the enumeration limit "
                                  f"{budget.max_variables}")
        count, witness = _max_sat_enumerate(F)
    elif method == "branch-and-bound":
        count, witness = _max_sat_branch_and_bound(F, budget.node_limit)
    else:
        raise ValueError(f"unknown method {method!r}")
    assert evaluate(F, witness).satisfied == count
    return count, witness
