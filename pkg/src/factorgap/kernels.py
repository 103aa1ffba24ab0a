"""Hot inner loops over clause matrices.

A formula enters these kernels as an ``(m, 3)`` int64 matrix of signed
literals, zero-padded for clauses shorter than three, with duplicate
literals already removed (see :func:`factorgap.cnf.clause_matrix`).
Assignments are uint8 vectors of length ``num_vars + 1``; slot 0 is unused
and must stay 0 so that padding never evaluates true.

Every kernel exists twice: a numba-compiled loop version and a pure-numpy
(or plain Python) fallback.  ``_accel.pick`` chooses at import time.
"""
import numpy as np

from ._accel import njit, pick

# ---------------------------------------------------------------------------
# clause evaluation


def _count_satisfied_loop(lits, values):
    m = lits.shape[0]
    total = 0
    for i in range(m):
        for j in range(3):
            lit = lits[i, j]
            if lit > 0:
                if values[lit]:
                    total += 1
                    break
            elif lit < 0:
                if not values[-lit]:
                    total += 1
                    break
    return total


def _satisfied_mask_numpy(lits, values):
    vals = values.astype(bool)[np.abs(lits)]
    true_lit = np.where(lits > 0, vals, ~vals) & (lits != 0)
    return true_lit.any(axis=-1)


def _count_satisfied_numpy(lits, values):
    if lits.shape[0] == 0:
        return 0
    return int(_satisfied_mask_numpy(lits, values).sum())


def _count_satisfied_batch_loop(lits, values2d):
    s = values2d.shape[0]
    out = np.zeros(s, dtype=np.int64)
    for r in range(s):
        out[r] = _count_satisfied_nb(lits, values2d[r])
    return out


def _count_satisfied_batch_numpy(lits, values2d):
    vals = values2d.astype(bool)
    idx = np.abs(lits)
    out = np.zeros(values2d.shape[0], dtype=np.int64)
    if lits.shape[0] == 0:
        return out
    sat = np.zeros((values2d.shape[0], lits.shape[0]), dtype=bool)
    for j in range(3):
        col = lits[:, j]
        v = vals[:, idx[:, j]]
        sat |= np.where(col > 0, v, ~v) & (col != 0)
    out[:] = sat.sum(axis=1)
    return out


_count_satisfied_nb = njit(_count_satisfied_loop)
_count_satisfied_batch_nb = njit(_count_satisfied_batch_loop)

count_satisfied = pick(_count_satisfied_nb, _count_satisfied_numpy)
count_satisfied_batch = pick(_count_satisfied_batch_nb, _count_satisfied_batch_numpy)

# ---------------------------------------------------------------------------
# exhaustive MAX-SAT


def _max_sat_enumerate_loop(lits, num_vars):
    m = lits.shape[0]
    best = -1
    best_code = 0
    values = np.zeros(num_vars + 1, dtype=np.uint8)
    for code in range(1 << num_vars):
        for v in range(num_vars):
            values[v + 1] = (code >> v) & 1
        sat = 0
        for i in range(m):
            for j in range(3):
                lit = lits[i, j]
                if lit > 0:
                    if values[lit]:
                        sat += 1
                        break
                elif lit < 0:
                    if not values[-lit]:
                        sat += 1
                        break
        if sat > best:
            best = sat
            best_code = code
            if sat == m:
                break
    return best, best_code


def _max_sat_enumerate_numpy(lits, num_vars, chunk_bits=16):
    m = lits.shape[0]
    total = 1 << num_vars
    chunk = 1 << min(num_vars, chunk_bits)
    shifts = np.arange(num_vars, dtype=np.int64)
    best, best_code = -1, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        values = np.zeros((codes.size, num_vars + 1), dtype=np.uint8)
        values[:, 1:] = (codes[:, None] >> shifts) & 1
        counts = _count_satisfied_batch_numpy(lits, values)
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, best_code = int(counts[k]), int(codes[k])
            if best == m:
                break
    return best, best_code


_max_sat_enumerate_nb = njit(_max_sat_enumerate_loop)
max_sat_enumerate = pick(_max_sat_enumerate_nb, _max_sat_enumerate_numpy)

# ---------------------------------------------------------------------------
# occurrence lists (CSR) shared by the search kernels


def occurrence_lists(lits, num_vars):
    """Return ``(offsets, clause_idx, positive)`` in CSR layout by variable."""
    flat = lits.ravel()
    nz = flat != 0
    var = np.abs(flat[nz])
    clause = np.repeat(np.arange(lits.shape[0], dtype=np.int64), 3)[nz]
    pos = (flat[nz] > 0).astype(np.uint8)
    order = np.argsort(var, kind="stable")
    counts = np.bincount(var, minlength=num_vars + 1)
    offsets = np.zeros(num_vars + 2, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, clause[order].astype(np.int64), pos[order]


# ---------------------------------------------------------------------------
# branch and bound MAX-SAT


def _branch_and_bound_loop(lits, num_vars, offsets, occ_clause, occ_pos,
                           var_order, first_value, best_unsat, best_values, node_limit):
    """Depth-first search for an assignment with fewer than ``best_unsat``
    falsified clauses.  ``best_values`` holds the incumbent and is updated in
    place.  Returns ``(best_unsat, nodes, exhausted)``.
    """
    m = lits.shape[0]
    n_true = np.zeros(m, dtype=np.int64)
    n_open = np.zeros(m, dtype=np.int64)
    for i in range(m):
        for j in range(3):
            if lits[i, j] != 0:
                n_open[i] += 1
    values = np.zeros(num_vars + 1, dtype=np.uint8)
    tried = np.zeros(num_vars + 1, dtype=np.int64)
    falsified = 0
    nodes = 0
    depth = 0
    nv = var_order.shape[0]
    if nv == 0:
        return best_unsat, nodes, False
    while depth >= 0:
        var = var_order[depth]
        t = tried[depth]
        if t > 0:
            # undo the previous value of var
            val = values[var]
            for k in range(offsets[var], offsets[var + 1]):
                c = occ_clause[k]
                if (occ_pos[k] == 1) == (val == 1):
                    n_true[c] -= 1
                else:
                    if n_true[c] == 0 and n_open[c] == 0:
                        falsified -= 1
                n_open[c] += 1
        if t == 2:
            tried[depth] = 0
            depth -= 1
            continue
        val = first_value[var] if t == 0 else 1 - first_value[var]
        tried[depth] = t + 1
        values[var] = val
        nodes += 1
        if nodes > node_limit:
            return best_unsat, nodes, True
        for k in range(offsets[var], offsets[var + 1]):
            c = occ_clause[k]
            n_open[c] -= 1
            if (occ_pos[k] == 1) == (val == 1):
                n_true[c] += 1
            elif n_true[c] == 0 and n_open[c] == 0:
                falsified += 1
        if falsified >= best_unsat:
            continue
        if depth == nv - 1:
            best_unsat = falsified
            for v in range(num_vars + 1):
                best_values[v] = values[v]
            if best_unsat == 0:
                return best_unsat, nodes, False
            continue
        depth += 1
    return best_unsat, nodes, False


_branch_and_bound_nb = njit(_branch_and_bound_loop)
branch_and_bound = pick(_branch_and_bound_nb, _branch_and_bound_loop)

# ---------------------------------------------------------------------------
# conditional-expectation greedy


def _greedy_loop(lits, num_vars, offsets, occ_clause, occ_pos, order):
    """Fix variables in ``order`` to the value with the larger conditional
    expectation of satisfied clauses.  Weights are scaled by 8 so that the
    per-clause contribution 2**-open is an integer.  Ties go to False.
    """
    m = lits.shape[0]
    sat = np.zeros(m, dtype=np.uint8)
    n_open = np.zeros(m, dtype=np.int64)
    for i in range(m):
        for j in range(3):
            a = lits[i, j]
            if a != 0:
                n_open[i] += 1
                for k in range(j + 1, 3):
                    if lits[i, k] == -a:
                        sat[i] = 1
    values = np.zeros(num_vars + 1, dtype=np.uint8)
    for idx in range(order.shape[0]):
        var = order[idx]
        delta = 0
        for k in range(offsets[var], offsets[var + 1]):
            c = occ_clause[k]
            if sat[c] == 1:
                continue
            w = 8 >> n_open[c]
            if occ_pos[k] == 1:
                delta += w
            else:
                delta -= w
        val = 1 if delta > 0 else 0
        values[var] = val
        for k in range(offsets[var], offsets[var + 1]):
            c = occ_clause[k]
            if sat[c] == 1:
                continue
            n_open[c] -= 1
            if (occ_pos[k] == 1) == (val == 1):
                sat[c] = 1
    return values


_greedy_nb = njit(_greedy_loop)
greedy_conditional = pick(_greedy_nb, _greedy_loop)

# ---------------------------------------------------------------------------
# DPLL


def _dpll_loop(lits, num_vars, offsets, occ_clause, occ_pos, node_limit):
    """Complete DPLL search with counter-based unit propagation.

    Branches on the unassigned variable of an unsatisfied clause with the
    fewest open literals (first such clause in order).  Returns
    ``(status, values, nodes)`` with status 1 = satisfiable, 0 = unsatisfiable,
    -1 = node limit reached.
    """
    m = lits.shape[0]
    n_true = np.zeros(m, dtype=np.int64)
    n_open = np.zeros(m, dtype=np.int64)
    for i in range(m):
        for j in range(3):
            if lits[i, j] != 0:
                n_open[i] += 1
    values = np.full(num_vars + 1, -1, dtype=np.int64)
    values[0] = 0
    trail = np.zeros(num_vars, dtype=np.int64)
    trail_len = 0
    # decision stack: trail position at decision time, var, tried-both flag
    dec_pos = np.zeros(num_vars + 1, dtype=np.int64)
    dec_var = np.zeros(num_vars + 1, dtype=np.int64)
    dec_flip = np.zeros(num_vars + 1, dtype=np.int64)
    n_dec = 0
    queue = np.zeros(m + 2, dtype=np.int64)
    nodes = 0
    # queue entries are literals to make true; each clause enqueues at most once per round
    q_head = 0
    q_tail = 0
    for i in range(m):
        if n_open[i] == 0:
            return 0, values, nodes
    for i in range(m):
        if n_open[i] == 1:
            queue[q_tail] = lits[i, 0]
            q_tail += 1

    while True:
        # propagate
        conflict = False
        while q_head < q_tail:
            lit = queue[q_head]
            q_head += 1
            var = lit if lit > 0 else -lit
            want = 1 if lit > 0 else 0
            if values[var] != -1:
                if values[var] != want:
                    conflict = True
                    break
                continue
            values[var] = want
            trail[trail_len] = var
            trail_len += 1
            for k in range(offsets[var], offsets[var + 1]):
                c = occ_clause[k]
                n_open[c] -= 1
                if (occ_pos[k] == 1) == (want == 1):
                    n_true[c] += 1
                elif n_true[c] == 0:
                    if n_open[c] == 0:
                        conflict = True
                    elif n_open[c] == 1:
                        for j in range(3):
                            l2 = lits[c, j]
                            if l2 != 0:
                                v2 = l2 if l2 > 0 else -l2
                                if values[v2] == -1:
                                    queue[q_tail] = l2
                                    q_tail += 1
                                    break
            if conflict:
                break
        q_head = 0
        q_tail = 0

        if not conflict:
            # pick branching variable
            best_c = -1
            best_open = 4
            for i in range(m):
                if n_true[i] == 0 and n_open[i] < best_open:
                    best_open = n_open[i]
                    best_c = i
                    if best_open <= 2:
                        break
            if best_c == -1:
                return 1, values, nodes
            bvar = 0
            blit = 0
            for j in range(3):
                l2 = lits[best_c, j]
                if l2 != 0:
                    v2 = l2 if l2 > 0 else -l2
                    if values[v2] == -1:
                        bvar = v2
                        blit = l2
                        break
            nodes += 1
            if nodes > node_limit:
                return -1, values, nodes
            dec_pos[n_dec] = trail_len
            dec_var[n_dec] = blit
            dec_flip[n_dec] = 0
            n_dec += 1
            queue[0] = blit
            q_tail = 1
            continue

        # backtrack
        while True:
            if n_dec == 0:
                return 0, values, nodes
            n_dec -= 1
            pos = dec_pos[n_dec]
            while trail_len > pos:
                trail_len -= 1
                var = trail[trail_len]
                val = values[var]
                for k in range(offsets[var], offsets[var + 1]):
                    c = occ_clause[k]
                    n_open[c] += 1
                    if (occ_pos[k] == 1) == (val == 1):
                        n_true[c] -= 1
                values[var] = -1
            if dec_flip[n_dec] == 0:
                dec_flip[n_dec] = 1
                lit = -dec_var[n_dec]
                dec_var[n_dec] = lit
                n_dec += 1
                nodes += 1
                if nodes > node_limit:
                    return -1, values, nodes
                queue[0] = lit
                q_tail = 1
                break


_dpll_nb = njit(_dpll_loop)
dpll = pick(_dpll_nb, _dpll_loop)
