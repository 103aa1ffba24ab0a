"""Instance maps from 3SAT to MAX-3SAT with forward witness maps.

Two realizations share one interface:

``identity``
    The MAX-3SAT instance is the 3SAT instance itself.

``naive(t, seed)``
    Keeps the source clauses verbatim (segment 1) and appends m gadget
    blocks (segment 2), m being the source clause count.  Block j draws a
    tuple T_j of t source-clause indices, introduces a selector y_j and emits
    ``C | -y_j`` for every C in T_j followed by the unit clause ``(y_j)``.  A
    width-3 clause ``(a | b | c)`` needs a pad z:
    ``(a | b | z), (-z | c | -y_j)``.  Variables are allocated per block in
    order: y_j, then one pad per width-3 clause of T_j.

    Tuple indices come from the 64-bit LCG
    ``s <- (6364136223846793005 * s + 1442695040888963407) mod 2**64``
    started at ``seed``; each draw takes ``(s >> 33) % m`` (with
    replacement).

    Size: m + sum_j (1 + sum_{i in T_j} (1 + [w_i = 3])) clauses.

    This amplifier is complete (a satisfying assignment extends to one that
    satisfies every clause) but has no soundness guarantee: a falsifying
    assignment loses at most one clause per block touching its bad clauses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import MAX_SAT, CnfFormula, as_assignment
from .errors import EmptyFormula

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class AmplifierDescriptor:
    id: str = "identity"
    t: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.id not in ("identity", "naive"):
            raise ValueError(f"unknown amplifier {self.id!r}")
        if self.id == "naive":
            if self.t < 2:
                raise ValueError("naive amplifier needs tuple size t >= 2")
            if not 0 <= self.seed <= _MASK64:
                raise ValueError("seed must fit in 64 bits")

    @classmethod
    def identity(cls) -> "AmplifierDescriptor":
        return cls("identity")

    @classmethod
    def naive(cls, t: int, seed: int) -> "AmplifierDescriptor":
        return cls("naive", t, seed)

    @classmethod
    def parse(cls, text: str) -> "AmplifierDescriptor":
        """Parse ``identity`` or ``naive:T:SEED``."""
        parts = text.split(":")
        if parts == ["identity"]:
            return cls.identity()
        if len(parts) == 3 and parts[0] == "naive":
            return cls.naive(int(parts[1]), int(parts[2]))
        raise ValueError(f"bad amplifier descriptor {text!r}")

    def __str__(self):
        return "identity" if self.id == "identity" else f"naive:{self.t}:{self.seed}"


IDENTITY = AmplifierDescriptor.identity()


@dataclass(frozen=True)
class AmplifiedInstance:
    formula: CnfFormula
    boundary: int  # clauses[:boundary] is the verbatim source
    source_vars: int
    descriptor: AmplifierDescriptor

    @property
    def source(self) -> CnfFormula:
        return CnfFormula._unchecked(self.source_vars, self.formula.clauses[: self.boundary])


def lcg_indices(seed: int, count: int, modulus: int) -> list[int]:
    s = seed & _MASK64
    out = []
    for _ in range(count):
        s = (LCG_MULTIPLIER * s + LCG_INCREMENT) & _MASK64
        out.append((s >> 33) % modulus)
    return out


def tuples_for(amp: AmplifierDescriptor, m: int) -> list[list[int]]:
    flat = lcg_indices(amp.seed, m * amp.t, m)
    return [flat[j * amp.t:(j + 1) * amp.t] for j in range(m)]


def amplified_size(amp: AmplifierDescriptor, J: CnfFormula) -> tuple[int, int]:
    """Closed-form ``(num_vars, num_clauses)`` of ``beta_transform(amp, J)``."""
    if amp.id == "identity":
        return J.num_vars, J.num_clauses
    m = J.num_clauses
    wide = [len(c) == 3 for c in J.clauses]
    tuples = tuples_for(amp, m)
    extra_vars = sum(1 + sum(wide[i] for i in T) for T in tuples)
    extra_clauses = sum(1 + sum(1 + wide[i] for i in T) for T in tuples)
    return J.num_vars + extra_vars, m + extra_clauses


def size_bound(amp: AmplifierDescriptor, J: CnfFormula) -> int:
    """Polynomial upper bound on the clause count: m (2 + 2t), or m for identity."""
    m = J.num_clauses
    return m if amp.id == "identity" else m * (2 + 2 * amp.t)


def beta_transform(amp: AmplifierDescriptor, J: CnfFormula) -> AmplifiedInstance:
    if J.num_clauses == 0:
        raise EmptyFormula("cannot amplify a formula with no clauses")
    if amp.id == "identity":
        return AmplifiedInstance(J.with_kind(MAX_SAT), J.num_clauses, J.num_vars, amp)
    clauses = list(J.clauses)
    nv = J.num_vars
    for T in tuples_for(amp, J.num_clauses):
        nv += 1
        y = nv
        for i in T:
            c = J.clauses[i]
            if len(c) < 3:
                clauses.append(c + (-y,))
            else:
                nv += 1
                z = nv
                clauses.append((c[0], c[1], z))
                clauses.append((-z, c[2], -y))
        clauses.append((y,))
    return AmplifiedInstance(CnfFormula._unchecked(nv, tuple(clauses), MAX_SAT), J.num_clauses, J.num_vars, amp)


def beta_witness(amp: AmplifierDescriptor, J: CnfFormula, a) -> np.ndarray:
    a = as_assignment(a, J.num_vars)
    if amp.id == "identity":
        return a.copy()

    def lit(l):
        return bool(a[l - 1]) if l > 0 else not a[-l - 1]

    sat = [any(lit(l) for l in c) for c in J.clauses]
    extra = []
    for T in tuples_for(amp, J.num_clauses):
        extra.append(all(sat[i] for i in T))
        for i in T:
            c = J.clauses[i]
            if len(c) == 3:
                extra.append(not (lit(c[0]) or lit(c[1])))
    return np.concatenate([a, np.array(extra, dtype=bool)])


def _candidate_splits(amp: AmplifierDescriptor, I: CnfFormula):
    """Yield ``(m, source_vars)`` pairs consistent with the block layout."""
    cl = I.clauses
    total = len(cl)
    prefix_max = []
    top = 0
    for c in cl:
        top = max(top, max(abs(l) for l in c))
        prefix_max.append(top)
    lo = -(-total // (2 + 2 * amp.t))
    for m in range(max(lo, 1), total // (2 + amp.t) + 1):
        # the first gadget clause is derived from source clause T_0[0]
        c = cl[lcg_indices(amp.seed, 1, m)[0]]
        g = cl[m]
        if len(c) < 3:
            if len(g) != len(c) + 1 or g[:-1] != c or g[-1] >= 0:
                continue
            nv = -g[-1] - 1
        else:
            if len(g) != 3 or g[:2] != c[:2] or g[2] <= 0:
                continue
            nv = g[2] - 2
        if prefix_max[m - 1] <= nv:
            yield m, nv


def beta_recognize(amp: AmplifierDescriptor, I) -> CnfFormula | None:
    """Return J with ``beta_transform(amp, J).formula == I``, else None."""
    if isinstance(I, AmplifiedInstance):
        if I.descriptor != amp:
            return None
        candidates = [(I.boundary, I.source_vars)]
        I = I.formula
    elif amp.id == "identity":
        candidates = [(I.num_clauses, I.num_vars)]
    else:
        candidates = _candidate_splits(amp, I)
    for m, nv in candidates:
        if m < 1 or nv < 0 or m > I.num_clauses:
            continue
        head = I.clauses[:m]
        if any(abs(l) > nv for c in head for l in c):
            continue
        J = CnfFormula._unchecked(nv, head)
        again = beta_transform(amp, J).formula
        if again.num_vars == I.num_vars and again.clauses == I.clauses:
            return J
    return None
