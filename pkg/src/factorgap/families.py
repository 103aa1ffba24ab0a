"""Named formula families used by the gap harness, the CLI and the tests."""
from __future__ import annotations

import itertools

import numpy as np

from .alpha import FactoringInstance, alpha_encode
from .cnf import CnfFormula


def complete_formula() -> CnfFormula:
    """All 8 width-3 clauses over x1, x2, x3; every assignment falsifies one."""
    clauses = [tuple(s * v for s, v in zip(signs, (1, 2, 3)))
               for signs in itertools.product((1, -1), repeat=3)]
    return CnfFormula(3, clauses)


def random_strict_3cnf(num_vars: int, num_clauses: int, seed) -> CnfFormula:
    """Clauses over three distinct variables with independent random signs."""
    if num_vars < 3:
        raise ValueError("need at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(num_vars, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(num_vars, clauses)


def random_cnf(num_vars: int, num_clauses: int, seed, max_width: int = 3) -> CnfFormula:
    """Mixed-width clauses (1..max_width) over distinct variables."""
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(num_clauses):
        w = int(rng.integers(1, min(max_width, num_vars) + 1))
        vs = rng.choice(num_vars, size=w, replace=False) + 1
        signs = rng.integers(0, 2, size=w) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(num_vars, clauses)


def k_grid(n: int) -> list[int]:
    """The k values {2, isqrt(n), n - 1}, lifted to the valid range k >= 2."""
    from math import isqrt

    return sorted({2, max(2, isqrt(n)), max(2, n - 1)})


def instance_grid(n_max: int, n_min: int = 2):
    """Factoring instances (n, k) for n_min <= n < n_max and k in k_grid(n)."""
    for n in range(n_min, n_max):
        for k in k_grid(n):
            yield FactoringInstance(n, k)


def family(name: str, seed: int = 0):
    """Named source lists for the gap harness: ``complete``, ``random`` or ``alpha``."""
    if name == "complete":
        return [("complete8", complete_formula())]
    if name == "random":
        return [(f"random{i}", random_strict_3cnf(8, 40, seed + i)) for i in range(5)]
    if name == "alpha":
        return [(f"alpha{N.n}_{N.k}", alpha_encode(N)) for N in (FactoringInstance(2, 2), FactoringInstance(3, 2))]
    raise ValueError(f"unknown family {name!r}")


FAMILIES = ("complete", "random", "alpha")
