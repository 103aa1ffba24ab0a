from fractions import Fraction

import numpy as np
import pytest

from factorgap.alpha import FactoringInstance, alpha_encode, read_factor
from factorgap.amplifiers import AmplifierDescriptor, beta_transform
from factorgap.cnf import CnfFormula, evaluate
from factorgap.errors import BudgetExhausted
from factorgap.families import complete_formula, random_cnf, random_strict_3cnf
from factorgap.oracles import (
    OracleBudget,
    expected_satisfied,
    greedy_conditional_expectation,
    is_satisfiable,
    max_sat_exact,
    random_assignment,
)

from conftest import brute_max_sat


def clause_bound(F):
    return sum(1 - Fraction(1, 2 ** len(set(c))) for c in F.clauses)


class TestSatisfiable:
    def test_contradiction(self):
        assert is_satisfiable(CnfFormula(1, [(1,), (-1,)])) is None

    def test_single_clause(self):
        model = is_satisfiable(CnfFormula(2, [(1, 2)]))
        assert model is not None and (model[0] or model[1])

    def test_alpha_fifteen(self):
        N = FactoringInstance(15, 4)
        model = is_satisfiable(alpha_encode(N))
        assert read_factor(model, N.bits) in (3, 5)

    def test_empty(self):
        assert is_satisfiable(CnfFormula(3, [])).shape == (3,)

    def test_budget_is_inconclusive(self):
        # pigeonhole 6 -> 5 is unsatisfiable and needs many decisions
        holes, pigeons = 5, 6
        v = lambda p, h: p * holes + h + 1  # noqa: E731
        clauses = []
        for p in range(pigeons):
            clauses.append(tuple(v(p, h) for h in range(holes)))
        for h in range(holes):
            for p in range(pigeons):
                for q in range(p + 1, pigeons):
                    clauses.append((-v(p, h), -v(q, h)))
        # chain the wide at-least-one clauses down to width 3
        nv = pigeons * holes
        narrow = []
        for c in clauses:
            while len(c) > 3:
                nv += 1
                narrow.append((c[0], c[1], nv))
                c = (-nv,) + c[2:]
            narrow.append(c)
        F = CnfFormula(nv, narrow)
        with pytest.raises(BudgetExhausted):
            is_satisfiable(F, OracleBudget(node_limit=5))
        assert is_satisfiable(F) is None

    def test_agrees_with_max_sat(self):
        for seed in range(150):
            F = random_cnf(8, 10 + seed % 30, seed=seed)
            sat = is_satisfiable(F) is not None
            assert sat == (max_sat_exact(F)[0] == F.num_clauses)


class TestMaxSat:
    def test_complete(self, complete8):
        assert max_sat_exact(complete8)[0] == 7
        assert max_sat_exact(complete8, method="branch-and-bound")[0] == 7

    def test_contradiction(self):
        assert max_sat_exact(CnfFormula(1, [(1,), (-1,)]))[0] == 1

    def test_satisfiable_reaches_all(self):
        F = alpha_encode(FactoringInstance(15, 4))
        count, w = max_sat_exact(F)
        assert count == F.num_clauses and evaluate(F, w).satisfied == count

    def test_brute_force_oracle(self):
        for seed in range(60):
            F = random_cnf(1 + seed % 9, 1 + seed % 25, seed=seed)
            assert max_sat_exact(F)[0] == brute_max_sat(F.clauses, F.num_vars)

    def test_branch_and_bound_matches_enumeration(self):
        for seed in range(80):
            nv = 5 + seed % 16
            F = random_strict_3cnf(nv, 4 * nv + seed % 7, seed=seed)
            e = max_sat_exact(F, method="enumerate")[0]
            b = max_sat_exact(F, method="branch-and-bound")[0]
            assert e == b

    def test_enumeration_budget(self):
        F = random_strict_3cnf(21, 30, seed=0)
        with pytest.raises(BudgetExhausted):
            max_sat_exact(F, method="enumerate")
        with pytest.raises(BudgetExhausted):
            max_sat_exact(random_strict_3cnf(40, 400, seed=1), OracleBudget(node_limit=10))

    def test_amplified_dilution(self, complete8):
        I = beta_transform(AmplifierDescriptor.naive(2, 1), complete8).formula
        opt = max_sat_exact(I)[0]
        assert Fraction(opt, I.num_clauses) > Fraction(7, 8)

    def test_unknown_method(self, complete8):
        with pytest.raises(ValueError):
            max_sat_exact(complete8, method="magic")


class TestGreedy:
    def test_unit(self):
        a = greedy_conditional_expectation(CnfFormula(1, [(1,)]))
        assert a.tolist() == [True]

    def test_tie_goes_false(self):
        assert greedy_conditional_expectation(CnfFormula(2, [(1, 2), (-1, -2)])).tolist()[0] is False

    def test_complete(self, complete8):
        assert evaluate(complete8, greedy_conditional_expectation(complete8)).satisfied == 7

    def test_random_strict_bound(self):
        for seed in range(100):
            F = random_strict_3cnf(50, 200, seed=seed)
            assert evaluate(F, greedy_conditional_expectation(F)).satisfied >= 175

    def test_mixed_width_bound(self):
        for seed in range(100):
            F = random_cnf(12, 40, seed=seed)
            assert evaluate(F, greedy_conditional_expectation(F)).satisfied >= clause_bound(F)

    def test_order(self):
        F = CnfFormula(2, [(1, 2), (-1,)])
        assert greedy_conditional_expectation(F, order=[2, 1]).tolist() == [False, True]
        with pytest.raises(ValueError):
            greedy_conditional_expectation(F, order=[1, 1])

    def test_deterministic(self):
        F = random_strict_3cnf(30, 120, seed=3)
        assert np.array_equal(greedy_conditional_expectation(F), greedy_conditional_expectation(F))


class TestRandom:
    def test_deterministic(self):
        F = random_strict_3cnf(20, 50, seed=0)
        assert np.array_equal(random_assignment(F, 5), random_assignment(F, 5))

    def test_expectation_exact(self, complete8):
        assert expected_satisfied(complete8) == 7
        assert expected_satisfied(CnfFormula(1, [(1, -1)])) == 1

    def test_strict_mean(self):
        F = random_strict_3cnf(40, 160, seed=11)
        mean = np.mean([evaluate(F, random_assignment(F, s)).satisfied for s in range(10_000)]) / F.num_clauses
        assert abs(mean - 7 / 8) < 0.01

    def test_unit_mean(self):
        F = CnfFormula(1, [(1,)])
        mean = np.mean([random_assignment(F, s)[0] for s in range(10_000)])
        assert abs(mean - 0.5) < 0.02


def test_complete_family_is_complete8(complete8):
    assert sorted(complete_formula().clauses) == sorted(complete8.clauses)
