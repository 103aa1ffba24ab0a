from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factorgap.alpha import FactoringInstance, alpha_encode
from factorgap.cnf import (
    GAP,
    MAX_SAT,
    CnfFormula,
    GapSpec,
    Literal,
    evaluate,
    parse_dimacs,
    serialize_dimacs,
    strictify,
)
from factorgap.errors import (
    ClauseCountMismatch,
    DimacsError,
    EmptyFormula,
    LengthMismatch,
    MalformedHeader,
    VariableOutOfRange,
    WidthExceeded,
)

from conftest import brute_force_counts, brute_max_sat


@st.composite
def formulas(draw, max_vars=6, max_clauses=12):
    nv = draw(st.integers(1, max_vars))
    lit = st.integers(1, nv).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=3).map(tuple), max_size=max_clauses))
    return CnfFormula(nv, clauses)


def test_literal_roundtrip():
    assert int(Literal.from_int(-4)) == -4
    assert Literal.from_int(3) == Literal(3, True)
    with pytest.raises(ValueError):
        Literal(0)


class TestParse:
    def test_smallest(self):
        F = parse_dimacs(b"p cnf 1 1\n1 0")
        assert F.num_vars == 1 and F.clauses == ((1,),)

    def test_two_clauses(self):
        F = parse_dimacs("p cnf 2 2\n1 -2 0\n-1 2 0")
        assert F.clauses == ((1, -2), (-1, 2))

    def test_comments_and_split_lines(self):
        F = parse_dimacs("c hello\np cnf 3 2\nc mid\n1 -2\n 3 0 -1 0\n")
        assert F.clauses == ((1, -2, 3), (-1,))

    @pytest.mark.parametrize("text, exc", [
        ("p cnf 1 2\n1 0", ClauseCountMismatch),
        ("p cnf 1 1\n2 0", VariableOutOfRange),
        ("p cnf 4 1\n1 2 3 4 0", WidthExceeded),
        ("p dnf 1 1\n1 0", MalformedHeader),
        ("p cnf x 1\n1 0", MalformedHeader),
        ("1 0\np cnf 1 1", MalformedHeader),
        ("c only comments\n", MalformedHeader),
        ("p cnf 2 1\n1 2", DimacsError),
        ("p cnf 2 1\n1 a 0", DimacsError),
    ])
    def test_errors(self, text, exc):
        with pytest.raises(exc):
            parse_dimacs(text)

    def test_empty_max_sat_rejected(self):
        assert parse_dimacs("p cnf 2 0\n").num_clauses == 0
        with pytest.raises(EmptyFormula):
            parse_dimacs("p cnf 2 0\n", MAX_SAT)


class TestSerialize:
    def test_canonical_bytes(self):
        assert serialize_dimacs(CnfFormula(1, [(1,)])) == b"p cnf 1 1\n1 0\n"

    def test_order_preserved(self):
        assert serialize_dimacs(CnfFormula(2, [(-2, 1)])) == b"p cnf 2 1\n-2 1 0\n"

    def test_alpha_roundtrip(self):
        F = alpha_encode(FactoringInstance(15, 4))
        assert parse_dimacs(serialize_dimacs(F)) == F

    @given(formulas())
    def test_roundtrip_property(self, F):
        data = serialize_dimacs(F)
        assert parse_dimacs(data) == F
        assert serialize_dimacs(parse_dimacs(data)) == data


class TestEvaluate:
    def test_unit(self):
        s = evaluate(CnfFormula(1, [(1,)]), [True])
        assert (s.satisfied, s.total, s.fraction) == (1, 1, Fraction(1))

    def test_complete_formula_is_seven_eighths(self, complete8):
        for bits in np.ndindex(2, 2, 2):
            assert evaluate(complete8, np.array(bits, dtype=bool)).fraction == Fraction(7, 8)

    def test_contradiction(self):
        F = CnfFormula(1, [(1,), (-1,)])
        for v in (False, True):
            assert evaluate(F, [v]).fraction == Fraction(1, 2)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            evaluate(CnfFormula(2, [(1,)]), [True])

    def test_fraction_is_exact(self):
        # 876/1000 = 7/8 + 1/1000 must not round to either neighbour
        F = CnfFormula(1, [(1,)] * 876 + [(-1,)] * 124)
        frac = evaluate(F, [True]).fraction
        assert frac == GAP.soundness
        assert frac > Fraction(7, 8) and frac < GAP.classical_threshold

    @given(formulas(), st.data())
    def test_matches_brute_force(self, F, data):
        a = np.array(data.draw(st.lists(st.booleans(), min_size=F.num_vars, max_size=F.num_vars)), dtype=bool)
        expected = sum(any(a[abs(l) - 1] == (l > 0) for l in c) for c in F.clauses)
        assert evaluate(F, a).satisfied == expected

    @given(formulas(), st.data())
    def test_monotone_under_removal(self, F, data):
        if F.num_clauses < 2:
            return
        a = np.array(data.draw(st.lists(st.booleans(), min_size=F.num_vars, max_size=F.num_vars)), dtype=bool)
        i = data.draw(st.integers(0, F.num_clauses - 1))
        rest = CnfFormula(F.num_vars, F.clauses[:i] + F.clauses[i + 1:])
        assert evaluate(rest, a).satisfied >= evaluate(F, a).satisfied - 1
        assert evaluate(rest, a).satisfied <= evaluate(F, a).satisfied


def test_gap_constants():
    assert GAP.completeness == Fraction(99, 100)
    assert GAP.soundness == Fraction(876, 1000)
    assert GAP.classical_threshold == Fraction(177, 200)
    with pytest.raises(ValueError):
        GapSpec(completeness=Fraction(1, 2))


class TestStrictify:
    def test_unit_clause(self):
        S, pads = strictify(CnfFormula(1, [(1,)]))
        assert (S.num_vars, S.num_clauses) == (3, 4)
        assert all(len(c) == 3 for c in S.clauses)
        assert evaluate(S, pads.extend([True])).fraction == 1

    def test_width_three_unchanged(self, complete8):
        S, pads = strictify(complete8)
        assert S == complete8 and pads.pads == ()

    def test_binary_clause(self):
        S, _ = strictify(CnfFormula(2, [(1, 2)]))
        assert (S.num_vars, S.num_clauses) == (3, 2)
        # oracle: enumerate all 8 assignments
        best = brute_max_sat(S.clauses, 3)
        assert best == 2
        assert all(sat == 2 for sat, bits in brute_force_counts(S.clauses, 3) if bits[0])

    @settings(max_examples=60)
    @given(formulas(max_vars=4, max_clauses=5))
    def test_per_clause_satisfaction(self, F):
        S, pads = strictify(F)
        origin = pads.origin
        pad_vars = range(F.num_vars + 1, S.num_vars + 1)
        for sat_orig, bits in brute_force_counts(F.clauses, F.num_vars):
            a = np.array(bits, dtype=bool)
            ext = pads.extend(a)
            strict_sat = [any(ext[abs(l) - 1] == (l > 0) for l in c) for c in S.clauses]
            for i, c in enumerate(F.clauses):
                orig_ok = any(a[abs(l) - 1] == (l > 0) for l in c)
                mine = [j for j, o in enumerate(origin) if o == i]
                # descriptor extension satisfies the whole image of every satisfied clause
                if orig_ok:
                    assert all(strict_sat[j] for j in mine)
                # some pad setting satisfies the whole image iff the clause was satisfied
                achievable = False
                for pv in np.ndindex(*(2,) * len(pad_vars)):
                    full = np.concatenate([a, np.array(pv, dtype=bool)])
                    if all(any(full[abs(l) - 1] == (l > 0) for l in S.clauses[j]) for j in mine):
                        achievable = True
                        break
                assert achievable == orig_ok


def test_internal_builders_pass_validation():
    from factorgap.amplifiers import AmplifierDescriptor, beta_transform

    J = alpha_encode(FactoringInstance(143, 11))
    for F in (J, beta_transform(AmplifierDescriptor.naive(3, 5), J).formula, strictify(J)[0]):
        again = CnfFormula(F.num_vars, F.clauses)
        assert again == F and all(type(l) is int for c in F.clauses for l in c)
