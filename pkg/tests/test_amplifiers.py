import numpy as np
import pytest

from factorgap.alpha import FactoringInstance, alpha_encode, alpha_witness
from factorgap.amplifiers import (
    IDENTITY,
    AmplifiedInstance,
    AmplifierDescriptor,
    amplified_size,
    beta_recognize,
    beta_transform,
    beta_witness,
    lcg_indices,
    size_bound,
)
from factorgap.cnf import MAX_SAT, CnfFormula, evaluate, serialize_dimacs
from factorgap.errors import EmptyFormula, LengthMismatch
from factorgap.families import random_cnf

NAIVE21 = AmplifierDescriptor.naive(2, 1)
J3 = CnfFormula(4, [(1, -2, 3), (2,), (-1, 4)])


def independent_lcg(seed, count, m):
    # written out again so the closed-form check does not reuse library code
    s, out = seed, []
    for _ in range(count):
        s = (s * 6364136223846793005 + 1442695040888963407) % 2 ** 64
        out.append((s >> 33) % m)
    return out


class TestDescriptor:
    @pytest.mark.parametrize("text", ["identity", "naive:2:1", "naive:3:18446744073709551615"])
    def test_parse_roundtrip(self, text):
        assert str(AmplifierDescriptor.parse(text)) == text

    @pytest.mark.parametrize("text", ["naive", "naive:1:0", "naive:2:-1", "hastad", "naive:2"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            AmplifierDescriptor.parse(text)


class TestTransform:
    def test_identity(self):
        A = beta_transform(IDENTITY, J3)
        assert A.formula == J3 and A.formula.kind == MAX_SAT and A.boundary == 3

    def test_empty_rejected(self):
        with pytest.raises(EmptyFormula):
            beta_transform(NAIVE21, CnfFormula(2, []))

    def test_lcg_matches_independent_copy(self):
        assert lcg_indices(1, 50, 7) == independent_lcg(1, 50, 7)

    def test_naive_three_clause_size(self):
        A = beta_transform(NAIVE21, J3)
        F = A.formula
        assert F.clauses[:3] == J3.clauses
        widths = [3, 1, 2]
        idx = independent_lcg(1, 6, 3)
        tuples = [idx[0:2], idx[2:4], idx[4:6]]
        clauses = 3 + sum(1 + sum(2 if widths[i] == 3 else 1 for i in T) for T in tuples)
        nvars = 4 + sum(1 + sum(widths[i] == 3 for i in T) for T in tuples)
        assert (F.num_vars, F.num_clauses) == (nvars, clauses) == amplified_size(NAIVE21, J3)
        assert F.num_clauses <= size_bound(NAIVE21, J3)
        # three blocks, each closed by a positive unit selector
        assert sum(1 for c in F.clauses[3:] if len(c) == 1 and c[0] > 0) == 3

    def test_block_shape(self):
        F = beta_transform(NAIVE21, J3).formula
        T0 = independent_lcg(1, 2, 3)
        y = 5
        pos = 3
        for i in T0:
            c = J3.clauses[i]
            if len(c) < 3:
                assert F.clauses[pos] == c + (-y,)
                pos += 1
            else:
                z = F.clauses[pos][2]
                assert F.clauses[pos] == (c[0], c[1], z)
                assert F.clauses[pos + 1] == (-z, c[2], -y)
                pos += 2
        assert F.clauses[pos] == (y,)

    def test_deterministic(self):
        a = serialize_dimacs(beta_transform(NAIVE21, J3).formula)
        b = serialize_dimacs(beta_transform(NAIVE21, J3).formula)
        assert a == b

    def test_seed_changes_tuples(self):
        F1 = beta_transform(NAIVE21, alpha_encode(FactoringInstance(15, 4))).formula
        F2 = beta_transform(AmplifierDescriptor.naive(2, 2), alpha_encode(FactoringInstance(15, 4))).formula
        assert F1 != F2

    @pytest.mark.parametrize("t", [2, 3, 5])
    def test_size_bound_on_corpus(self, t):
        amp = AmplifierDescriptor.naive(t, 7)
        for n in (15, 35, 143, 221):
            J = alpha_encode(FactoringInstance(n, 5))
            F = beta_transform(amp, J).formula
            assert (F.num_vars, F.num_clauses) == amplified_size(amp, J)
            assert F.num_clauses <= size_bound(amp, J)
            assert max(F.widths) <= 3


class TestWitness:
    def test_identity(self):
        a = np.array([True, False, True, False])
        assert np.array_equal(beta_witness(IDENTITY, J3, a), a)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            beta_witness(NAIVE21, J3, [True])

    @pytest.mark.parametrize("amp", [IDENTITY, NAIVE21, AmplifierDescriptor.naive(3, 9)])
    def test_satisfying_extends_to_full(self, amp):
        N = FactoringInstance(77, 8)
        J = alpha_encode(N)
        a = alpha_witness(N, 7)
        F = beta_transform(amp, J).formula
        assert evaluate(F, beta_witness(amp, J, a)).fraction == 1

    def test_falsifying_is_total_and_below_one(self):
        J = alpha_encode(FactoringInstance(15, 4))
        a = np.zeros(J.num_vars, dtype=bool)
        src = evaluate(J, a)
        assert src.fraction < 1
        F = beta_transform(NAIVE21, J).formula
        w = beta_witness(NAIVE21, J, a)
        assert w.shape == (F.num_vars,)
        s = evaluate(F, w)
        assert s.fraction < 1 and s.total == F.num_clauses
        # each falsified source clause costs at most itself plus one per touching block
        assert s.satisfied >= F.num_clauses - (src.total - src.satisfied) - J.num_clauses


class TestRecognize:
    def test_roundtrip(self):
        assert beta_recognize(NAIVE21, beta_transform(NAIVE21, J3)) == J3
        assert beta_recognize(NAIVE21, beta_transform(NAIVE21, J3).formula) == J3

    def test_extra_clause(self):
        F = beta_transform(NAIVE21, J3).formula
        assert beta_recognize(NAIVE21, CnfFormula(F.num_vars, F.clauses + ((1,),))) is None

    def test_identity_accepts_anything(self):
        G = random_cnf(5, 9, seed=4)
        assert beta_recognize(IDENTITY, G) == G

    def test_wrong_descriptor(self):
        A = beta_transform(NAIVE21, J3)
        assert beta_recognize(AmplifierDescriptor.naive(2, 2), A) is None
        assert beta_recognize(AmplifierDescriptor.naive(2, 2), A.formula) is None

    def test_roundtrip_random_sources(self):
        for seed in range(40):
            J = random_cnf(6, 1 + seed % 13, seed=seed)
            amp = AmplifierDescriptor.naive(2 + seed % 3, seed)
            assert beta_recognize(amp, beta_transform(amp, J).formula) == J

    def test_amplified_instance_source(self):
        A = beta_transform(NAIVE21, J3)
        assert isinstance(A, AmplifiedInstance) and A.source == J3
