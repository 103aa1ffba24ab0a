"""Factoring decision instances (n, k) encoded as width <= 3 CNF.

The formula asserts that there are b-bit integers f, g (b = bit length of n)
with f * g = n, f >= 2, g >= 2 and f <= k.  It is the Tseitin encoding of a
fixed circuit:

* an AND gate per partial product ``f_i & g_j``;
* a ripple array multiplier: row i (1 <= i < b) adds the partial products
  ``f_j & g_i`` into the accumulator at positions i .. i+b-1 with a half
  adder at the low position and full adders above it; in row 1 the top
  position has no accumulator bit yet and gets a half adder instead;
* a comparator chain ``le_i`` meaning "the low i+1 bits of f are <= those of
  k", whose gate shapes (AND vs OR) spell out the bits of k;
* two clause chains with pad variables saying some bit of f (resp. g) other
  than bit 0 is set;
* unit clauses pinning the 2b product wires to the bits of n.

Variable and clause counts depend on b only::

    num_vars(b)    = 4 b^2 + b - 4
    num_clauses(b) = 17 b^2 - 14 b - 2
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from .cnf import DECISION, CnfFormula, as_assignment
from .errors import CertificateInvalid, InvalidInstance, WidthTooSmall

SIZE_CONSTANT = 17  # num_vars(b) and num_clauses(b) are both <= 17 b^2 for every b >= 2


@dataclass(frozen=True)
class FactoringInstance:
    n: int
    k: int

    def __post_init__(self):
        if int(self.n) < 2 or int(self.k) < 2:
            raise InvalidInstance(f"need n >= 2 and k >= 2, got ({self.n}, {self.k})")

    @property
    def bits(self) -> int:
        return int(self.n).bit_length()

    def clamped(self) -> "FactoringInstance":
        return FactoringInstance(self.n, min(self.k, (1 << self.bits) - 1))

    def is_certificate(self, f: int) -> bool:
        return 2 <= f <= self.k and f < self.n and self.n % f == 0

    def __str__(self):
        return f"({self.n}, {self.k})"


def num_vars_for(b: int) -> int:
    return 4 * b * b + b - 4


def num_clauses_for(b: int) -> int:
    return 17 * b * b - 14 * b - 2


@dataclass(frozen=True)
class CircuitLayout:
    """Variable ranges (1-based, half-open ``range`` objects) for bit width b."""

    b: int
    f_bits: range
    g_bits: range
    partial_products: range
    adders: range
    comparator: range
    f_pads: range
    g_pads: range
    product: tuple  # wire variable of product bit t, t = 0 .. 2b-1
    num_vars: int
    num_clauses: int
    comparator_clauses: range
    pin_clauses: range

    def pp(self, i: int, j: int) -> int:
        """Wire for f_j & g_i (row i of the multiplier)."""
        return self.partial_products.start + i * self.b + j

    @property
    def ranges(self) -> dict:
        return {
            "f": self.f_bits,
            "g": self.g_bits,
            "partial_products": self.partial_products,
            "adders": self.adders,
            "comparator": self.comparator,
            "f_pads": self.f_pads,
            "g_pads": self.g_pads,
        }


def _adder_vars(b: int) -> int:
    # row 1: half adder, b-2 full adders, half adder; rows 2..b-1: half adder, b-1 full adders
    return (3 * b - 2) + (b - 2) * (3 * b - 1)


def layout_for(b: int) -> CircuitLayout:
    if b < 2:
        raise WidthTooSmall(f"bit width must be >= 2, got {b}")
    nxt = 1

    def take(count):
        nonlocal nxt
        r = range(nxt, nxt + count)
        nxt += count
        return r

    f_bits = take(b)
    g_bits = take(b)
    pps = take(b * b)
    adders = take(_adder_vars(b))
    comparator = take(b)
    f_pads = take(b - 2)
    g_pads = take(b - 2)
    _, product = _multiplier(b)
    n_clauses = num_clauses_for(b)
    comp_start = 17 * b * b - 21 * b
    return CircuitLayout(
        b=b,
        f_bits=f_bits,
        g_bits=g_bits,
        partial_products=pps,
        adders=adders,
        comparator=comparator,
        f_pads=f_pads,
        g_pads=g_pads,
        product=product,
        num_vars=nxt - 1,
        num_clauses=n_clauses,
        comparator_clauses=range(comp_start, comp_start + 3 * b),
        pin_clauses=range(n_clauses - 2 * b, n_clauses),
    )


# ---------------------------------------------------------------------------
# circuit construction

# gate kinds
AND, XOR, MAJ, LE_BASE, LE_OR, LE_AND = range(6)


def _gate_clauses(kind, out, ins):
    if kind == AND:
        x, y = ins
        return [(-out, x), (-out, y), (out, -x, -y)]
    if kind == XOR:
        x, y = ins
        return [(-out, x, y), (-out, -x, -y), (out, -x, y), (out, x, -y)]
    if kind == MAJ:
        x, y, z = ins
        return [(-x, -y, out), (-x, -z, out), (-y, -z, out),
                (x, y, -out), (x, z, -out), (y, z, -out)]
    if kind == LE_BASE:
        f0, bit = ins
        return [(out, f0), (out, -f0)] if bit else [(out, f0), (-out, -f0)]
    if kind == LE_OR:  # out = !f | prev
        f, prev = ins
        return [(-out, -f, prev), (out, f), (out, -prev)]
    if kind == LE_AND:  # out = !f & prev
        f, prev = ins
        return [(-out, -f), (-out, prev), (out, f, -prev)]
    raise ValueError(kind)


def _gate_eval(kind, ins, v):
    if kind == AND:
        return v[ins[0]] & v[ins[1]]
    if kind == XOR:
        return v[ins[0]] ^ v[ins[1]]
    if kind == MAJ:
        x, y, z = (v[i] for i in ins)
        return (x & y) | (x & z) | (y & z)
    if kind == LE_BASE:
        return True if ins[1] else not v[ins[0]]
    if kind == LE_OR:
        return (not v[ins[0]]) or v[ins[1]]
    if kind == LE_AND:
        return (not v[ins[0]]) and v[ins[1]]
    raise ValueError(kind)


@lru_cache(maxsize=None)
def _multiplier(b: int):
    """Gates of the array multiplier and the wires carrying product bits 0..2b-1."""
    f_bits = range(1, b + 1)
    g_bits = range(b + 1, 2 * b + 1)
    pp0 = 2 * b + 1

    def pp(i, j):
        return pp0 + i * b + j

    gates = []
    for i in range(b):
        for j in range(b):
            gates.append((AND, pp(i, j), (f_bits[j], g_bits[i])))

    nxt = pp0 + b * b
    acc = [pp(0, j) for j in range(b)]
    for i in range(1, b):
        new = acc[:i]
        s, c = nxt, nxt + 1
        nxt += 2
        gates.append((XOR, s, (acc[i], pp(i, 0))))
        gates.append((AND, c, (acc[i], pp(i, 0))))
        new.append(s)
        carry = c
        for p in range(i + 1, i + b):
            y = pp(i, p - i)
            if p < len(acc):
                x = acc[p]
                t, s, c = nxt, nxt + 1, nxt + 2
                nxt += 3
                gates.append((XOR, t, (x, y)))
                gates.append((XOR, s, (t, carry)))
                gates.append((MAJ, c, (x, y, carry)))
            else:
                s, c = nxt, nxt + 1
                nxt += 2
                gates.append((XOR, s, (y, carry)))
                gates.append((AND, c, (y, carry)))
            new.append(s)
            carry = c
        new.append(carry)
        acc = new
    assert len(acc) == 2 * b and nxt == pp0 + b * b + _adder_vars(b)
    return tuple(gates), tuple(acc)


def _circuit_gates(lay: CircuitLayout, k: int):
    b = lay.b
    gates = list(_multiplier(b)[0])
    le = lay.comparator
    gates.append((LE_BASE, le[0], (lay.f_bits[0], k & 1)))
    for i in range(1, b):
        kind = LE_OR if (k >> i) & 1 else LE_AND
        gates.append((kind, le[i], (lay.f_bits[i], le[i - 1])))
    return gates


def _at_least_one(lits, pads):
    """Chain (l1 | p1), (-p1 | l2 | p2), ..., (-p_{L-1} | l_L)."""
    if len(lits) == 1:
        return [(lits[0],)]
    out = [(lits[0], pads[0])]
    for j in range(1, len(lits) - 1):
        out.append((-pads[j - 1], lits[j], pads[j]))
    out.append((-pads[-1], lits[-1]))
    return out


def alpha_encode(N: FactoringInstance) -> CnfFormula:
    N = N.clamped()
    lay = layout_for(N.bits)
    clauses = []
    for kind, out, ins in _circuit_gates(lay, N.k):
        clauses.extend(_gate_clauses(kind, out, ins))
    clauses.append((lay.comparator[-1],))
    clauses.extend(_at_least_one(list(lay.f_bits[1:]), list(lay.f_pads)))
    clauses.extend(_at_least_one(list(lay.g_bits[1:]), list(lay.g_pads)))
    for t, wire in enumerate(lay.product):
        clauses.append((wire,) if (N.n >> t) & 1 else (-wire,))
    assert len(clauses) == lay.num_clauses
    return CnfFormula._unchecked(lay.num_vars, tuple(clauses), DECISION)


def _bits_to(v, rng, value):
    for i, var in enumerate(rng):
        v[var] = bool((value >> i) & 1)


def alpha_witness(N: FactoringInstance, f: int) -> np.ndarray:
    """Assignment of ``alpha_encode(N)`` built from certificate ``f``."""
    if not N.is_certificate(f):
        raise CertificateInvalid(f"{f} is not a nontrivial factor of {N.n} in [2, {N.k}]")
    N = N.clamped()
    lay = layout_for(N.bits)
    v = [False] * (lay.num_vars + 1)
    _bits_to(v, lay.f_bits, f)
    _bits_to(v, lay.g_bits, N.n // f)
    for kind, out, ins in _circuit_gates(lay, N.k):
        v[out] = bool(_gate_eval(kind, ins, v))
    for bits, pads in ((lay.f_bits, lay.f_pads), (lay.g_bits, lay.g_pads)):
        seen = False
        for j, pad in enumerate(pads):
            seen = seen or v[bits[j + 1]]
            v[pad] = not seen
    return np.array(v[1:], dtype=bool)


def read_factor(a, b: int) -> int:
    """Integer spelled by the f bits of an assignment of a width-b encoding."""
    lay = layout_for(b)
    a = as_assignment(a)
    return sum(1 << i for i, var in enumerate(lay.f_bits) if a[var - 1])


def alpha_recognize(F: CnfFormula) -> FactoringInstance | None:
    """Return N with ``alpha_encode(N) == F`` up to clause order, else None."""
    V, m = F.num_vars, F.num_clauses
    b = isqrt(max(V, 0) // 4) + 1
    while num_vars_for(b) > V and b > 0:
        b -= 1
    if b < 2 or num_vars_for(b) != V or num_clauses_for(b) != m:
        return None
    lay = layout_for(b)
    cl = F.clauses

    n = 0
    for t, idx in enumerate(lay.pin_clauses):
        c = cl[idx]
        if len(c) != 1 or abs(c[0]) != lay.product[t]:
            return None
        if c[0] > 0:
            n |= 1 << t
    if n.bit_length() != b:
        return None

    start = lay.comparator_clauses.start
    le0, f0 = lay.comparator[0], lay.f_bits[0]
    second = cl[start + 1]
    if second == (le0, -f0):
        k = 1
    elif second == (-le0, -f0):
        k = 0
    else:
        return None
    for i in range(1, b):
        w = len(cl[start + 2 + 3 * (i - 1)])
        if w == 3:
            k |= 1 << i
        elif w != 2:
            return None
    if k < 2:
        return None

    N = FactoringInstance(n, k)
    expected = alpha_encode(N)
    if Counter(expected.clauses) != Counter(cl):
        return None
    return N
