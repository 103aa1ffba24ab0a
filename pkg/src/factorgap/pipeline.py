"""Instances of the form beta(alpha(N)), their recognition, and the
decode-factor-forward solver for them.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .alpha import FactoringInstance, alpha_encode, alpha_recognize, alpha_witness
from .amplifiers import IDENTITY, AmplifiedInstance, AmplifierDescriptor, beta_recognize, beta_transform, beta_witness
from .backends import BackendConfig, decide_factoring
from .cnf import GAP, CnfFormula, evaluate, strictify
from .errors import BudgetExhausted, NotInS
from .oracles import DEFAULT_BUDGET, OracleBudget, greedy_conditional_expectation, max_sat_exact, random_assignment

RANDOM = "random"
GREEDY = "greedy"


def build_s_instance(N: FactoringInstance, amp: AmplifierDescriptor = IDENTITY) -> AmplifiedInstance:
    return beta_transform(amp, alpha_encode(N))


def membership(I, amp: AmplifierDescriptor = IDENTITY) -> FactoringInstance | None:
    """N with ``I == beta(alpha(N))`` under ``amp``, else None."""
    J = beta_recognize(amp, I)
    if J is None:
        return None
    return alpha_recognize(J)


def detect_amplifier(I: CnfFormula, registry: Sequence[AmplifierDescriptor]):
    """First ``(amp, N)`` in ``registry`` under which I is a member, else None."""
    for amp in registry:
        N = membership(I, amp)
        if N is not None:
            return amp, N
    return None


@dataclass
class SolveReport:
    instance: FactoringInstance
    branch: str
    certificate: int | None
    assignment: np.ndarray
    satisfied: int
    total: int
    amplifier: AmplifierDescriptor
    backend: str
    fallback: str | None = None
    strict_satisfied: int | None = None
    strict_total: int | None = None
    timings: dict = field(default_factory=dict)
    traces: list = field(default_factory=list)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.satisfied, self.total)

    @property
    def strict_fraction(self) -> Fraction | None:
        if self.strict_total is None:
            return None
        return Fraction(self.strict_satisfied, self.strict_total)

    def rows(self, timings: bool = False) -> list[tuple[str, str]]:
        rows = [
            ("n", str(self.instance.n)),
            ("k", str(self.instance.k)),
            ("amplifier", str(self.amplifier)),
            ("backend", self.backend),
            ("branch", self.branch),
            ("certificate", "-" if self.certificate is None else str(self.certificate)),
            ("fallback", self.fallback or "-"),
            ("fraction", _frac(self.fraction)),
            ("strict_fraction", "-" if self.strict_total is None else _frac(self.strict_fraction)),
            ("traces", str(len(self.traces))),
            ("assignment", "".join("1" if v else "0" for v in self.assignment)),
        ]
        if timings:
            rows += [(f"time_{k}", f"{v:.6f}") for k, v in self.timings.items()]
        return rows

    def to_tsv(self, timings: bool = False) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in self.rows(timings))

    def to_json(self, timings: bool = False) -> str:
        return json.dumps({"type": "SolveReport", **dict(self.rows(timings))}, indent=2) + "\n"


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def solve_s(I, amp: AmplifierDescriptor = IDENTITY, cfg: BackendConfig = BackendConfig(),
            fallback: str = RANDOM, seed: int | None = None) -> SolveReport:
    """Decode I to its factoring instance, decide it, and output an assignment.

    Positive instances get the forwarded certificate; negative ones get the
    fallback (a uniformly random assignment, or the conditional-expectation
    greedy run on the strict width-3 form of I).
    """
    if fallback not in (RANDOM, GREEDY):
        raise ValueError(f"unknown fallback {fallback!r}")
    formula = I.formula if isinstance(I, AmplifiedInstance) else I
    timings = {}
    t0 = time.perf_counter()
    J = beta_recognize(amp, I)
    N = alpha_recognize(J) if J is not None else None
    timings["decode"] = time.perf_counter() - t0
    if N is None:
        raise NotInS("formula is not beta(alpha(N)) for the given amplifier")

    t0 = time.perf_counter()
    decision = decide_factoring(N, cfg)
    timings["decide"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    report = dict(instance=N, amplifier=amp, backend=cfg.mode, certificate=decision.certificate,
                  traces=decision.traces, timings=timings)
    if decision.positive:
        a = beta_witness(amp, J, alpha_witness(N, decision.certificate))
        stats = evaluate(formula, a)
        out = SolveReport(branch="positive", assignment=a, satisfied=stats.satisfied, total=stats.total, **report)
        if out.fraction < GAP.completeness:
            raise AssertionError(f"forwarded witness only reaches {out.fraction}")
    elif fallback == RANDOM:
        a = random_assignment(formula, cfg.seed if seed is None else seed)
        stats = evaluate(formula, a)
        out = SolveReport(branch="negative", assignment=a, satisfied=stats.satisfied, total=stats.total,
                          fallback=RANDOM, **report)
    else:
        strict, pads = strictify(formula)
        sa = greedy_conditional_expectation(strict)
        sstats = evaluate(strict, sa)
        a = pads.restrict(sa)
        stats = evaluate(formula, a)
        out = SolveReport(branch="negative", assignment=a, satisfied=stats.satisfied, total=stats.total,
                          fallback=GREEDY, strict_satisfied=sstats.satisfied, strict_total=sstats.total,
                          **report)
    timings["output"] = time.perf_counter() - t0
    return out


# ---------------------------------------------------------------------------
# gap measurement


@dataclass(frozen=True)
class GapRow:
    name: str
    amplifier: AmplifierDescriptor
    source_vars: int
    source_clauses: int
    amplified_vars: int
    amplified_clauses: int
    source_optimum: int | None
    amplified_optimum: int | None

    @property
    def conclusive(self) -> bool:
        return self.source_optimum is not None and self.amplified_optimum is not None

    @property
    def source_fraction(self) -> Fraction | None:
        return None if self.source_optimum is None else Fraction(self.source_optimum, self.source_clauses)

    @property
    def amplified_fraction(self) -> Fraction | None:
        if self.amplified_optimum is None:
            return None
        return Fraction(self.amplified_optimum, self.amplified_clauses)


@dataclass
class GapReport:
    rows: list

    COLUMNS = ("name", "amplifier", "source_vars", "source_clauses", "amplified_vars",
               "amplified_clauses", "source_opt", "amplified_opt", "status")

    def _cells(self, r: GapRow):
        def frac(f):
            return "-" if f is None else _frac(f)
        return (r.name, str(r.amplifier), str(r.source_vars), str(r.source_clauses), str(r.amplified_vars),
                str(r.amplified_clauses), frac(r.source_fraction), frac(r.amplified_fraction),
                "exact" if r.conclusive else "inconclusive")

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        lines += ["\t".join(self._cells(r)) for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"type": "GapReport", "rows": [dict(zip(self.COLUMNS, self._cells(r))) for r in self.rows]},
                          indent=2) + "\n"


def _optimum(F: CnfFormula, budget: OracleBudget):
    try:
        return max_sat_exact(F, budget)[0]
    except BudgetExhausted:
        return None


def measure_gap(sources, amp: AmplifierDescriptor, budget: OracleBudget = DEFAULT_BUDGET) -> GapReport:
    """Exact optimum before and after amplification for each source formula.

    ``sources`` holds formulas or ``(name, formula)`` pairs.
    """
    rows = []
    for i, src in enumerate(sources):
        name, J = src if isinstance(src, tuple) else (f"source{i}", src)
        I = beta_transform(amp, J).formula
        rows.append(GapRow(name, amp, J.num_vars, J.num_clauses, I.num_vars, I.num_clauses,
                           _optimum(J, budget), _optimum(I, budget)))
    return GapReport(rows)
