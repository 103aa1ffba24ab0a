"""Factoring backends: trial division and a desk-scale Shor simulator.

Shor's order finding runs in one of two fidelities:

``shor-statevector``
    Builds the joint state sum_x |x>|a^x mod n> over an m-qubit counting
    register (m = 2 * bitlen(n)) and a bitlen(n)-qubit work register, applies
    the exact discrete Fourier transform to the counting register and samples
    from the resulting measurement distribution.

``shor-analytic``
    Samples from the same distribution written in closed form in terms of the
    true order r (found classically), so no state vector is stored.  Each
    sample is exact and costs O(1) expected time: the progression length is
    drawn first, then the outcome by rejection from a Fejer-kernel envelope.

Both feed the sampled y into the same continued-fraction post-processing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .alpha import FactoringInstance
from .errors import AttemptsExhausted, BudgetExceeded, NotComposite

TRIAL = "trial"
STATEVECTOR = "shor-statevector"
ANALYTIC = "shor-analytic"
MODES = (TRIAL, STATEVECTOR, ANALYTIC)
_ALIASES = {"shor-sv": STATEVECTOR, "sv": STATEVECTOR, "analytic": ANALYTIC}

DEFAULT_SEED = 20221215


@dataclass(frozen=True)
class BackendConfig:
    mode: str = ANALYTIC
    max_attempts: int = 50
    seed: int = DEFAULT_SEED
    qubit_budget: int = 26

    def __post_init__(self):
        object.__setattr__(self, "mode", _ALIASES.get(self.mode, self.mode))
        if self.mode not in MODES:
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class ShorTrace:
    base: int
    modulus: int
    register_bits: int
    mode: str
    samples: list = field(default_factory=list)
    convergents: list = field(default_factory=list)
    order: int | None = None
    factor: int | None = None

    def summary(self) -> str:
        return (f"a={self.base} n={self.modulus} m={self.register_bits} samples={len(self.samples)} "
                f"order={self.order} factor={self.factor}")


# ---------------------------------------------------------------------------
# classical number theory

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def perfect_power(n: int):
    """Return ``(root, exponent)`` with exponent >= 2 if n is a perfect power."""
    for e in range(2, n.bit_length() + 1):
        r = round(n ** (1.0 / e))
        for c in (r - 1, r, r + 1):
            if c > 1 and c ** e == n:
                return c, e
    return None


def trial_smallest_factor(n: int) -> int | None:
    if n % 2 == 0:
        return 2 if n > 2 else None
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return None


def trial_factorize(n: int) -> dict:
    out = {}
    while n > 1:
        p = trial_smallest_factor(n) or n
        out[p] = out.get(p, 0) + 1
        n //= p
    return out


def order_trial(a: int, n: int) -> int:
    """Multiplicative order by successive powers."""
    x, r = a % n, 1
    while x != 1:
        x = x * a % n
        r += 1
        if r > n:
            raise ValueError(f"{a} is not invertible mod {n}")
    return r


def _reduce_order(a: int, n: int, d: int) -> int:
    """Smallest divisor e of d with a^e = 1 (mod n), given a^d = 1."""
    for p in trial_factorize(d):
        while d % p == 0 and pow(a, d // p, n) == 1:
            d //= p
    return d


def order_classical(a: int, n: int) -> int:
    """Multiplicative order through the Carmichael function of n."""
    lam = 1
    for p, e in trial_factorize(n).items():
        if p == 2:
            l = 1 if e == 1 else 2 if e == 2 else 1 << (e - 2)
        else:
            l = (p - 1) * p ** (e - 1)
        lam = lam * l // math.gcd(lam, l)
    return _reduce_order(a, n, lam)


def cf_convergents(y: int, Q: int, denominator_bound: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents of y/Q with denominator <= bound."""
    if Q < 1 or not 0 <= y < Q:
        raise ValueError("need 0 <= y < Q")
    out = []
    num, den = y, Q
    a0 = num // den
    p, p_prev = a0, 1
    q, q_prev = 1, 0
    if q <= denominator_bound:
        out.append((p, q))
    num, den = den, num - a0 * den
    while den:
        a = num // den
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if q > denominator_bound:
            break
        out.append((p, q))
        num, den = den, num - a * den
    return out


# ---------------------------------------------------------------------------
# measurement distributions


def register_bits(n: int) -> int:
    return 2 * n.bit_length()


def _modexp_table(a: int, n: int, Q: int) -> np.ndarray:
    x = np.arange(Q, dtype=np.int64)
    out = np.ones(Q, dtype=np.int64)
    base = a % n
    while np.any(x):
        odd = (x & 1).astype(bool)
        out[odd] = out[odd] * base % n
        base = base * base % n
        x >>= 1
    return out


def statevector_distribution(a: int, n: int, m: int | None = None, qubit_budget: int = 26) -> np.ndarray:
    """Exact outcome distribution of the counting register after the QFT."""
    m = register_bits(n) if m is None else m
    w = n.bit_length()
    if m + w > qubit_budget:
        raise BudgetExceeded(f"n={n} needs {m + w} qubits, budget is {qubit_budget}")
    Q = 1 << m
    state = np.zeros((Q, 1 << w), dtype=np.complex128)
    state[np.arange(Q), _modexp_table(a, n, Q)] = 1.0 / math.sqrt(Q)
    # QFT |x> -> Q^-1/2 sum_y exp(2 pi i x y / Q) |y>  ==  sqrt(Q) * ifft
    state = np.fft.ifft(state, axis=0) * math.sqrt(Q)
    probs = np.einsum("ij,ij->i", state.real, state.real) + np.einsum("ij,ij->i", state.imag, state.imag)
    return probs


def _fejer(A: int, theta: np.ndarray, Q: int) -> np.ndarray:
    """|sum_{j<A} exp(2 pi i j theta / Q)|^2 for integer theta in [0, Q)."""
    theta = np.asarray(theta, dtype=np.float64)
    out = np.full(theta.shape, float(A) * A)
    nz = theta != 0
    phase = np.pi * theta[nz] / Q
    out[nz] = (np.sin(A * phase) / np.sin(phase)) ** 2
    return out


def _progression_counts(r: int, Q: int):
    """(count, length) pairs: how many of the r residues x0 have A terms below Q."""
    hi = Q % r
    pairs = []
    if hi:
        pairs.append((hi, Q // r + 1))
    pairs.append((r - hi, Q // r))
    return pairs


def analytic_distribution(r: int, m: int) -> np.ndarray:
    """Closed-form outcome distribution for order r and m counting qubits."""
    Q = 1 << m
    y = np.arange(Q, dtype=np.int64)
    theta = (r * y) % Q
    probs = np.zeros(Q)
    for count, A in _progression_counts(r, Q):
        if A:
            probs += count * _fejer(A, theta, Q)
    return probs / (float(Q) * Q)


class _AnalyticSampler:
    """Exact sampler for ``analytic_distribution(r, m)``.

    With d = gcd(r, Q), r = d r', Q = d Q', the map y -> u = r' y mod Q' is
    d-to-one onto Z_Q' and P(y) is proportional to K_A(u), the Fejer kernel
    |sum_{j<A} exp(2 pi i j u / Q')|^2.  u is drawn by rejection from the
    continuous envelope H(x) = min(A^2, Q'^2 / (4 (|x| - 1/2)^2)) on
    [-Q'/2, Q'/2) rounded to the nearest integer; H >= K_A(u) on the unit
    cell of u, and the acceptance rate is about one half.
    """

    def __init__(self, r: int, m: int):
        self.r, self.m, self.Q = r, m, 1 << m
        pairs = [(c * A, A) for c, A in _progression_counts(r, self.Q) if A]
        total = sum(w for w, _ in pairs)
        self.lengths = [A for _, A in pairs]
        self.length_p = [w / total for w, _ in pairs]
        self.d = math.gcd(r, self.Q)
        self.Qp = self.Q // self.d
        self.inv = pow(r // self.d, -1, self.Qp) if self.Qp > 1 else 0

    def _draw_u(self, A: int, rng) -> int:
        Qp = self.Qp
        half = Qp / 2
        x0 = min(0.5 + Qp / (2 * A), half)  # edge of the flat core
        core = A * A * x0
        tail = (Qp * Qp / 4) * (1 / (x0 - 0.5) - 1 / (half - 0.5)) if x0 < half else 0.0
        while True:
            if rng.random() * (core + tail) < core:
                mag = rng.random() * x0
                env = float(A * A)
            else:
                inv_s = 1 / (x0 - 0.5) - rng.random() * (1 / (x0 - 0.5) - 1 / (half - 0.5))
                mag = 0.5 + 1 / inv_s
                env = Qp * Qp / (4 * (mag - 0.5) ** 2)
            x = mag if rng.random() < 0.5 else -mag
            if x >= half:
                continue  # keep the domain half-open
            u = math.floor(x + 0.5)
            u %= Qp
            if u == 0:
                kern = float(A * A)
            else:
                phase = math.pi * u / Qp
                kern = (math.sin(A * phase) / math.sin(phase)) ** 2
            if rng.random() * env < kern:
                return u

    def sample(self, rng) -> int:
        A = self.lengths[rng.choice(len(self.lengths), p=self.length_p)] if len(self.lengths) > 1 else self.lengths[0]
        u = self._draw_u(A, rng)
        return (u * self.inv) % self.Qp + self.Qp * int(rng.integers(0, self.d))


class _StatevectorSampler:
    def __init__(self, a: int, n: int, m: int, budget: int):
        p = statevector_distribution(a, n, m, budget)
        self.table = np.cumsum(p / p.sum())
        self.Q = 1 << m

    def sample(self, rng) -> int:
        return int(min(np.searchsorted(self.table, rng.random(), side="right"), self.Q - 1))


# ---------------------------------------------------------------------------
# order finding and factoring


def order_find(a: int, n: int, cfg: BackendConfig = BackendConfig(), rng=None, trace: ShorTrace | None = None) -> int:
    if not 1 < a < n or math.gcd(a, n) != 1:
        raise ValueError(f"need 1 < a < n and gcd(a, n) = 1, got a={a}, n={n}")
    m = register_bits(n)
    if trace is None:
        trace = ShorTrace(a, n, m, cfg.mode)
    if cfg.mode == TRIAL:
        trace.order = order_trial(a, n)
        return trace.order
    rng = cfg.rng() if rng is None else rng
    if cfg.mode == STATEVECTOR:
        sampler = _StatevectorSampler(a, n, m, cfg.qubit_budget)
    else:
        sampler = _AnalyticSampler(order_classical(a, n), m)
    Q = 1 << m
    acc = 1
    for _ in range(cfg.max_attempts):
        y = sampler.sample(rng)
        trace.samples.append(y)
        convs = cf_convergents(y, Q, n)
        trace.convergents.append(convs)
        for _, d in convs:
            for cand in (d, acc * d // math.gcd(acc, d)):
                if pow(a, cand, n) == 1:
                    trace.order = _reduce_order(a, n, cand)
                    return trace.order
        if convs:
            d = convs[-1][1]
            acc = acc * d // math.gcd(acc, d)
            if acc > n:
                acc = 1
    raise AttemptsExhausted(f"no order of {a} mod {n} after {cfg.max_attempts} samples")


@dataclass
class FactorResult:
    factor: int
    traces: list


def shor_factor(n: int, cfg: BackendConfig = BackendConfig(), rng=None) -> FactorResult:
    """A nontrivial factor of composite n.

    Even numbers and perfect powers are split classically; otherwise random
    bases are tried and the order of each is found with ``cfg.mode``.
    """
    if n < 4 or is_prime(n):
        raise NotComposite(f"{n} is not composite")
    if n % 2 == 0:
        return FactorResult(2, [])
    pp = perfect_power(n)
    if pp is not None:
        return FactorResult(pp[0], [])
    rng = cfg.rng() if rng is None else rng
    traces = []
    for _ in range(cfg.max_attempts):
        a = int(rng.integers(2, n - 1))
        trace = ShorTrace(a, n, register_bits(n), cfg.mode)
        traces.append(trace)
        g = math.gcd(a, n)
        if g > 1:
            trace.factor = g
            return FactorResult(g, traces)
        try:
            r = order_find(a, n, cfg, rng, trace)
        except AttemptsExhausted:
            continue
        if r % 2:
            continue
        h = pow(a, r // 2, n)
        if h == n - 1:
            continue
        for f in (math.gcd(h - 1, n), math.gcd(h + 1, n)):
            if 1 < f < n:
                trace.factor = f
                return FactorResult(f, traces)
    raise AttemptsExhausted(f"no factor of {n} after {cfg.max_attempts} bases")


def _prime_factors(n: int, cfg: BackendConfig, rng, traces: list) -> list[int]:
    if n == 1:
        return []
    if is_prime(n):
        return [n]
    res = shor_factor(n, cfg, rng)
    traces.extend(res.traces)
    f = res.factor
    assert 1 < f < n and n % f == 0
    return _prime_factors(f, cfg, rng, traces) + _prime_factors(n // f, cfg, rng, traces)


def smallest_prime_factor(n: int, cfg: BackendConfig = BackendConfig(), traces: list | None = None) -> int | None:
    """Least prime divisor of n, or None when n is prime."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if cfg.mode == TRIAL:
        return trial_smallest_factor(n)
    if is_prime(n):
        return None
    traces = [] if traces is None else traces
    return min(_prime_factors(n, cfg, cfg.rng(), traces))


@dataclass
class Decision:
    positive: bool
    certificate: int | None
    traces: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.positive, self.certificate))


def decide_factoring(N: FactoringInstance, cfg: BackendConfig = BackendConfig()) -> Decision:
    """Positive iff the smallest prime factor of n exists and is <= k."""
    traces: list = []
    p = smallest_prime_factor(N.n, cfg, traces)
    if p is not None and p <= N.k:
        assert N.is_certificate(p)
        return Decision(True, p, traces)
    return Decision(False, None, traces)


def measurement_probability_check(a: int, n: int, budget: int = 26) -> float:
    """Max pointwise gap between the statevector and closed-form distributions."""
    m = register_bits(n)
    sv = statevector_distribution(a, n, m, budget)
    an = analytic_distribution(order_classical(a, n), m)
    return float(np.max(np.abs(sv - an)))

