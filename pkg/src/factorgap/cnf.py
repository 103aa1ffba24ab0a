"""CNF formulas of width at most three, DIMACS I/O and assignment evaluation.

Clauses are tuples of nonzero signed ints (DIMACS convention).  Assignments
are boolean numpy vectors with ``a[i]`` holding the value of variable
``i + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import (
    ClauseCountMismatch,
    DimacsError,
    EmptyFormula,
    LengthMismatch,
    MalformedHeader,
    VariableOutOfRange,
    WidthExceeded,
)

DECISION = "decision"
MAX_SAT = "max-sat"

Clause = tuple


@dataclass(frozen=True)
class Literal:
    var: int
    positive: bool = True

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")

    def __int__(self):
        return self.var if self.positive else -self.var

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit > 0)


@dataclass(frozen=True)
class CnfFormula:
    """A width <= 3 CNF.  ``kind`` is an interpretation tag and does not take
    part in equality: the same clause list is both a 3SAT and a MAX-3SAT
    instance."""

    num_vars: int
    clauses: tuple
    kind: str = field(default=DECISION, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses))
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        if self.kind not in (DECISION, MAX_SAT):
            raise ValueError(f"unknown formula kind {self.kind!r}")
        for i, c in enumerate(self.clauses):
            if not 1 <= len(c) <= 3:
                raise WidthExceeded(f"clause {i} has width {len(c)}")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise VariableOutOfRange(f"clause {i}: literal {lit} outside 1..{self.num_vars}")

    @classmethod
    def _unchecked(cls, num_vars: int, clauses: tuple, kind: str = DECISION) -> "CnfFormula":
        """Build from clauses already known to be valid tuples of ints."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "num_vars", num_vars)
        object.__setattr__(obj, "clauses", clauses)
        object.__setattr__(obj, "kind", kind)
        return obj

    def __len__(self):
        return len(self.clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def widths(self) -> list[int]:
        return [len(c) for c in self.clauses]

    def with_kind(self, kind: str) -> "CnfFormula":
        return CnfFormula._unchecked(self.num_vars, self.clauses, kind)

    @cached_property
    def matrix(self) -> np.ndarray:
        return clause_matrix(self.clauses)

    @cached_property
    def occurrences(self):
        return kernels.occurrence_lists(self.matrix, self.num_vars)


@dataclass(frozen=True)
class SatStats:
    satisfied: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.satisfied, self.total) if self.total else Fraction(1)

    def __str__(self):
        return f"{self.satisfied}/{self.total}"


@dataclass(frozen=True)
class GapSpec:
    completeness: Fraction = Fraction(99, 100)
    soundness: Fraction = Fraction(7, 8) + Fraction(1, 1000)
    classical_threshold: Fraction = Fraction(7, 8) + Fraction(1, 100)

    def __post_init__(self):
        if not self.soundness < self.classical_threshold < self.completeness <= 1:
            raise ValueError("need soundness < classical_threshold < completeness <= 1")


GAP = GapSpec()


def clause_matrix(clauses: Iterable[Sequence[int]]) -> np.ndarray:
    """Pack clauses into an ``(m, 3)`` int64 matrix, dropping repeated literals."""
    clauses = list(clauses)
    out = np.zeros((len(clauses), 3), dtype=np.int64)
    for i, c in enumerate(clauses):
        seen = list(dict.fromkeys(c))
        out[i, : len(seen)] = seen
    return out


def as_assignment(values, num_vars: int | None = None) -> np.ndarray:
    a = np.asarray(values, dtype=bool)
    if a.ndim != 1:
        raise LengthMismatch("assignment must be one-dimensional")
    if num_vars is not None and a.shape[0] != num_vars:
        raise LengthMismatch(f"assignment has length {a.shape[0]}, formula has {num_vars} variables")
    return a


def _padded(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape[0] + 1, dtype=np.uint8)
    out[1:] = a
    return out


def evaluate(formula: CnfFormula, a) -> SatStats:
    a = as_assignment(a, formula.num_vars)
    sat = kernels.count_satisfied(formula.matrix, _padded(a))
    return SatStats(int(sat), formula.num_clauses)


def evaluate_many(formula: CnfFormula, assignments) -> np.ndarray:
    """Satisfied-clause counts for each row of a 2-D boolean array."""
    a = np.asarray(assignments, dtype=bool)
    if a.ndim != 2 or a.shape[1] != formula.num_vars:
        raise LengthMismatch("expected an array of shape (s, num_vars)")
    padded = np.zeros((a.shape[0], a.shape[1] + 1), dtype=np.uint8)
    padded[:, 1:] = a
    return kernels.count_satisfied_batch(formula.matrix, padded)


def satisfied_clauses(formula: CnfFormula, a) -> list[bool]:
    a = as_assignment(a, formula.num_vars)
    return [any(a[abs(l) - 1] == (l > 0) for l in c) for c in formula.clauses]


# ---------------------------------------------------------------------------
# DIMACS


def parse_dimacs(text: Union[bytes, str], kind: str = DECISION) -> CnfFormula:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header = None
    body: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: second header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise MalformedHeader(f"line {lineno}: non-integer counts in {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise MalformedHeader(f"line {lineno}: negative counts")
            continue
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause before header")
        body.append(line)
    if header is None:
        raise MalformedHeader("missing 'p cnf' header")
    num_vars, num_clauses = header

    clauses = []
    current: list[int] = []
    for tok in " ".join(body).split():
        try:
            lit = int(tok)
        except ValueError:
            raise DimacsError(f"non-integer token {tok!r}") from None
        if lit == 0:
            if not current:
                raise DimacsError("empty clause")
            clauses.append(tuple(current))
            current = []
            continue
        if abs(lit) > num_vars:
            raise VariableOutOfRange(f"literal {lit} outside 1..{num_vars}")
        current.append(lit)
        if len(current) > 3:
            raise WidthExceeded(f"clause {len(clauses) + 1} is wider than 3")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise ClauseCountMismatch(f"header declares {num_clauses} clauses, found {len(clauses)}")
    if kind == MAX_SAT and not clauses:
        raise EmptyFormula("a MAX-SAT instance needs at least one clause")
    return CnfFormula(num_vars, tuple(clauses), kind)


def serialize_dimacs(formula: CnfFormula) -> bytes:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in formula.clauses)
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------------------
# strict width-3 normalization


@dataclass(frozen=True)
class PadWitness:
    """Records which original clause each strictified clause came from and
    which fresh variables were introduced.  ``origin[i]`` is the index of the
    source clause of strict clause ``i``."""

    source_vars: int
    num_vars: int
    origin: tuple
    pads: tuple  # (clause index, pad vars) per widened clause

    def extend(self, a) -> np.ndarray:
        """Extend an assignment of the source formula.  Pads are set false;
        with the literals of a satisfied source clause any pad values work."""
        a = as_assignment(a, self.source_vars)
        out = np.zeros(self.num_vars, dtype=bool)
        out[: self.source_vars] = a
        return out

    def restrict(self, a) -> np.ndarray:
        return as_assignment(a)[: self.source_vars].copy()


def strictify(formula: CnfFormula) -> tuple[CnfFormula, PadWitness]:
    nv = formula.num_vars
    out: list[tuple] = []
    origin: list[int] = []
    pads = []
    for i, c in enumerate(formula.clauses):
        if len(c) == 3:
            out.append(c)
            origin.append(i)
        elif len(c) == 2:
            u = nv + 1
            nv += 1
            out += [c + (u,), c + (-u,)]
            origin += [i, i]
            pads.append((i, (u,)))
        else:
            u, v = nv + 1, nv + 2
            nv += 2
            out += [c + (u, v), c + (u, -v), c + (-u, v), c + (-u, -v)]
            origin += [i] * 4
            pads.append((i, (u, v)))
    strict = CnfFormula._unchecked(nv, tuple(out), formula.kind)
    return strict, PadWitness(formula.num_vars, nv, tuple(origin), tuple(pads))
