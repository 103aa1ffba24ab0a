import contextlib
import itertools
import time

import pytest

from factorgap.cnf import CnfFormula


def brute_force_counts(clauses, num_vars):
    """Satisfied-clause count for every assignment, by plain enumeration."""
    out = []
    for bits in itertools.product((False, True), repeat=num_vars):
        sat = sum(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses)
        out.append((sat, bits))
    return out


def brute_max_sat(clauses, num_vars):
    return max(s for s, _ in brute_force_counts(clauses, num_vars))


@pytest.fixture
def complete8():
    clauses = [tuple(s * v for s, v in zip(signs, (1, 2, 3)))
               for signs in itertools.product((1, -1), repeat=3)]
    return CnfFormula(3, clauses)


_RESULTS = []


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion for the summary.

    The block passes when it finishes without raising; ``state["detail"]``
    may carry a short measurement for the report line.
    """
    @contextlib.contextmanager
    def record(number, text):
        state = {"detail": ""}
        start = time.perf_counter()
        ok = False
        try:
            yield state
            ok = True
        except Exception as exc:
            state["detail"] = (state["detail"] + "; " if state["detail"] else "") + type(exc).__name__
            raise
        finally:
            elapsed = time.perf_counter() - start
            detail = ", ".join(x for x in (state["detail"], f"{elapsed:.1f}s") if x)
            _RESULTS.append((number, text, ok, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, ok, detail in sorted(_RESULTS, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {text}  ({detail})")
