"""Command-line entry point: ``factorgap <subcommand> ...``.

Exit codes: 0 success, 1 negative or empty result (e.g. ``decode`` of a
formula that is not an encoding), 2 usage error.  Diagnostics and the
effective configuration go to stderr; results go to stdout.
"""
from __future__ import annotations

import argparse
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .alpha import FactoringInstance, alpha_encode, alpha_recognize, alpha_witness, read_factor
from .amplifiers import AmplifierDescriptor, beta_recognize, beta_transform, beta_witness
from .backends import DEFAULT_SEED, BackendConfig, smallest_prime_factor, trial_smallest_factor
from .cnf import MAX_SAT, evaluate, parse_dimacs, serialize_dimacs, strictify
from .errors import FactorGapError, NotInS
from .families import FAMILIES, family, instance_grid
from .oracles import OracleBudget, is_satisfiable
from .pipeline import GREEDY, RANDOM, measure_gap, membership, solve_s


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text: str) -> int:
    if text == "entropy":
        return secrets.randbits(63)
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'entropy', got {text!r}") from None


def _amplifier(text: str) -> AmplifierDescriptor:
    try:
        return AmplifierDescriptor.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read(args) -> bytes:
    if args.input in (None, "-"):
        return sys.stdin.buffer.read()
    with open(args.input, "rb") as fh:
        return fh.read()


def _write(args, data: bytes):
    if getattr(args, "output", None) in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(args.output, "wb") as fh:
            fh.write(data)


def _config(args, **extra):
    items = {"command": args.command, **extra}
    print("# " + " ".join(f"{k}={v}" for k, v in items.items()), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="factorgap", description="Factoring to MAX-3SAT reductions with witness transport.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io(sp, output=True):
        sp.add_argument("-i", "--input", help="input file (default stdin)")
        if output:
            sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = sub.add_parser("encode", help="DIMACS encoding of the instance (n, k)")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("decode", help="recover (n, k) from an encoding")
    io(sp, output=False)

    sp = sub.add_parser("amplify", help="apply a gap amplifier to a DIMACS formula")
    sp.add_argument("--amplifier", type=_amplifier, default=AmplifierDescriptor.identity())
    io(sp)

    sp = sub.add_parser("strictify", help="rewrite every clause to width exactly 3")
    io(sp)

    sp = sub.add_parser("solve", help="solve an amplified encoding end to end")
    sp.add_argument("--amplifier", type=_amplifier, default=AmplifierDescriptor.identity())
    sp.add_argument("--backend", choices=["trial", "shor-sv", "shor-statevector", "shor-analytic"],
                    default="shor-analytic")
    sp.add_argument("--fallback", choices=[RANDOM, GREEDY], default=RANDOM)
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sp.add_argument("--max-attempts", type=int, default=50)
    sp.add_argument("--format", choices=["tsv", "json"], default="tsv")
    sp.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    io(sp, output=False)

    sp = sub.add_parser("factor", help="smallest prime factor of n")
    sp.add_argument("n", type=int)
    sp.add_argument("--backend", choices=["trial", "shor-sv", "shor-statevector", "shor-analytic"],
                    default="shor-analytic")
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)

    sp = sub.add_parser("verify", help="check reduction properties over a grid of instances")
    sp.add_argument("--nmax", type=int, default=64, help="check all 2 <= n < NMAX")
    sp.add_argument("--amplifier", type=_amplifier, default=AmplifierDescriptor.naive(2, 1))
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("gap", help="exact optima before and after amplification")
    sp.add_argument("--family", choices=FAMILIES, default="complete")
    sp.add_argument("--amplifier", type=_amplifier, default=AmplifierDescriptor.naive(2, 1))
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sp.add_argument("--max-vars", type=int, default=20)
    sp.add_argument("--node-limit", type=int, default=50_000_000)
    sp.add_argument("--format", choices=["tsv", "json"], default="tsv")
    return p


def _verify_one(args):
    n, k, amp = args
    N = FactoringInstance(n, k)
    F = alpha_encode(N)
    spf = trial_smallest_factor(n)
    positive = spf is not None and spf <= k
    out = {"alpha_roundtrip": alpha_recognize(F) == N.clamped()}
    model = is_satisfiable(F)
    ok = (model is not None) == positive
    if model is not None:
        ok = ok and N.is_certificate(read_factor(model, N.bits))
    out["alpha_sat_iff_positive"] = ok
    certs = [f for f in range(2, n) if N.is_certificate(f)]
    A = beta_transform(amp, F)
    wit = beta_ok = True
    for f in certs:
        a = alpha_witness(N, f)
        wit &= evaluate(F, a).satisfied == F.num_clauses
        beta_ok &= evaluate(A.formula, beta_witness(amp, F, a)).satisfied == A.formula.num_clauses
    out["alpha_witness_complete"] = wit
    out["beta_witness_complete"] = beta_ok
    out["membership_roundtrip"] = membership(A.formula, amp) == N.clamped() and beta_recognize(amp, A.formula) == F
    return out


def _cmd_verify(args) -> int:
    _config(args, nmax=args.nmax, amplifier=args.amplifier, jobs=args.jobs)
    work = [(N.n, N.k, args.amplifier) for N in instance_grid(args.nmax)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_verify_one, work, chunksize=16))
    else:
        results = [_verify_one(w) for w in work]
    failed = False
    print("check\tinstances\tfailures\tstatus")
    for name in results[0] if results else []:
        bad = [w for w, r in zip(work, results) if not r[name]]
        failed |= bool(bad)
        print(f"{name}\t{len(results)}\t{len(bad)}\t{'pass' if not bad else 'FAIL'}")
        for n, k, _ in bad[:10]:
            print(f"# {name} failed on ({n}, {k})", file=sys.stderr)
    return 1 if failed else 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        if args.command == "encode":
            try:
                N = FactoringInstance(args.n, args.k)
            except FactorGapError as exc:
                print(f"factorgap: error: {exc}", file=sys.stderr)
                return 2
            _write(args, serialize_dimacs(alpha_encode(N)))
            return 0

        if args.command == "decode":
            N = alpha_recognize(parse_dimacs(_read(args)))
            if N is None:
                print("not an encoding of a factoring instance", file=sys.stderr)
                return 1
            print(f"{N.n} {N.k}")
            return 0

        if args.command == "amplify":
            _config(args, amplifier=args.amplifier)
            J = parse_dimacs(_read(args))
            _write(args, serialize_dimacs(beta_transform(args.amplifier, J).formula))
            return 0

        if args.command == "strictify":
            strict, _ = strictify(parse_dimacs(_read(args)))
            _write(args, serialize_dimacs(strict))
            return 0

        if args.command == "solve":
            cfg = BackendConfig(args.backend, max_attempts=args.max_attempts, seed=args.seed)
            _config(args, amplifier=args.amplifier, backend=cfg.mode, fallback=args.fallback, seed=args.seed)
            I = parse_dimacs(_read(args), MAX_SAT)
            try:
                report = solve_s(I, args.amplifier, cfg, args.fallback)
            except NotInS as exc:
                print(f"factorgap: {exc}", file=sys.stderr)
                return 1
            text = report.to_json(args.timings) if args.format == "json" else report.to_tsv(args.timings)
            sys.stdout.write(text)
            return 0

        if args.command == "factor":
            if args.n < 2:
                print("factorgap: error: n must be >= 2", file=sys.stderr)
                return 2
            cfg = BackendConfig(args.backend, seed=args.seed)
            _config(args, backend=cfg.mode, seed=args.seed)
            p = smallest_prime_factor(args.n, cfg)
            if p is None:
                print(f"{args.n}\tprime")
                return 1
            print(f"{args.n}\t{p}")
            return 0

        if args.command == "verify":
            return _cmd_verify(args)

        if args.command == "gap":
            _config(args, family=args.family, amplifier=args.amplifier, seed=args.seed,
                    max_vars=args.max_vars, node_limit=args.node_limit)
            budget = OracleBudget(args.max_vars, args.node_limit)
            report = measure_gap(family(args.family, args.seed), args.amplifier, budget)
            sys.stdout.write(report.to_json() if args.format == "json" else report.to_tsv())
            return 0
    except FactorGapError as exc:
        print(f"factorgap: error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(args.command)  # pragma: no cover


def main():  # pragma: no cover
    sys.exit(run())
