"""Command-line driver.

Exit codes: 0 success, 1 a check came out false, 2 usage or parse error,
3 an internal limit was exceeded.  ``--format json`` prints one JSON record
per result with every input echoed back.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .covering import (
    DEFAULT_PERIOD_CAP,
    ResidueClass,
    build_congruence,
    check_coverage,
    verify_entry,
)
from .delicate import DEFAULT_CHUNK, enumerate_delicate, is_digitally_delicate, search_widely
from .errors import (
    CheckpointError,
    DegenerateClass,
    DelicateError,
    EntryInvalid,
    FactorInvalid,
    Inconsistent,
    NotCovering,
    NotPrime,
    OrderSearchExceeded,
    ParseError,
    PeriodTooLarge,
)
from .ingest import load_covering, load_factor_table, validate_factors
from .verify import DEFAULT_CHECKPOINT_EVERY, certify_widely

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

log = logging.getLogger("delicate_primes")


class _Out:
    def __init__(self, args):
        self.json = args.format == "json"
        self.inputs = {k: v for k, v in vars(args).items()
                       if k not in ("func", "format", "verbose")}

    def emit(self, command, result, text):
        if self.json:
            print(json.dumps({"command": command, "inputs": self.inputs, "result": result},
                             default=str))
        else:
            print(text)


def read_number(arg):
    """A decimal literal, or a path to a file holding one decimal number."""
    s = arg.strip()
    if s.isdigit():
        return int(s)
    text = "".join(Path(arg).read_text(encoding="utf-8").split())
    if not text.isdigit():
        raise ParseError(1, f"{arg}: expected a single decimal integer")
    return int(text)


def _extra_classes(args):
    extra = [ResidueClass(1, 2)] if getattr(args, "odd", False) else []
    for spec in getattr(args, "extra", None) or []:
        r, _, m = spec.partition(":")
        try:
            extra.append(ResidueClass.of(int(r), int(m)))
        except ValueError:
            raise ParseError(0, f"--extra expects r:m, got {spec!r}") from None
    return extra


def _class_from(args, require_cover=True):
    system = load_covering(args.covering)
    cls = build_congruence(system, _extra_classes(args), require_cover=require_cover,
                           cap=args.cap)
    return system, cls


# ------------------------------------------------------------ commands

def cmd_verify_covering(args, out):
    system = load_covering(args.covering)
    entries = [verify_entry(e, system.base).__dict__ | {"entry": e.__dict__}
               for e in system.entries]
    coverage = check_coverage(system, args.cap)
    ok = all(coverage.values())
    result = {
        "base": system.base,
        "period": system.period,
        "covered": ok,
        "digits": {d: {"covered": c.covered, "uncovered": c.uncovered}
                   for d, c in coverage.items()},
        "entries": entries,
    }
    lines = [f"base {system.base}, {len(system.entries)} entries, period {system.period}"]
    for d, c in coverage.items():
        lines.append(f"digit {d}: " + ("covered" if c else f"NOT covered, first gap k={c.uncovered}"))
    out.emit("verify-covering", result, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FALSE


def cmd_build_class(args, out):
    system, cls = _class_from(args, require_cover=False)
    gaps = {d: c.uncovered for d, c in check_coverage(system, args.cap).items() if not c}
    if gaps:
        print(f"warning: not a covering (first gaps by digit: {gaps}); members of this "
              "class carry no compositeness guarantee", file=sys.stderr)
    out.emit("build-class", {"a": str(cls.residue), "M": str(cls.modulus)},
             f"a = {cls.residue}\nM = {cls.modulus}")
    return EXIT_OK


def cmd_search(args, out):
    system, cls = _class_from(args)
    hit = search_widely(cls, system, args.start, args.max_steps, args.workers,
                        args.chunk, not args.no_leading_to_zero)
    if hit is None:
        out.emit("search", None,
                 f"no hit for t in [{args.start}, {args.start + args.max_steps})")
        return EXIT_FALSE
    result = hit.to_dict() | {"a": str(cls.residue), "M": str(cls.modulus)}
    out.emit("search", result,
             f"t = {hit.index}\ndigits = {hit.digit_count}\ncandidate = {hit.candidate}")
    return EXIT_OK


def cmd_check(args, out):
    n = read_number(args.number)
    try:
        rep = is_digitally_delicate(n, args.base, not args.no_leading_to_zero,
                                    args.sample, args.seed)
    except NotPrime as exc:
        out.emit("check", {"delicate": False, "error": f"NotPrime: {exc}"}, f"not prime: {exc}")
        return EXIT_FALSE
    if rep.delicate:
        kind = "all" if rep.exhaustive else "sampled"
        text = f"delicate: {kind} {rep.mutations_tested} mutations composite"
    else:
        pos, d, v = rep.first_prime_mutation
        text = f"not delicate: position {pos} -> digit {d} gives prime {v}"
    out.emit("check", rep.to_dict(), text)
    return EXIT_OK if rep.delicate else EXIT_FALSE


def _k_range(spec):
    if spec is None:
        return None
    lo, sep, hi = spec.partition(":")
    if not sep or not lo.isdigit() or not hi.isdigit():
        raise argparse.ArgumentTypeError(f"--k-range expects lo:hi, got {spec!r}")
    return int(lo), int(hi)


def cmd_verify_widely(args, out):
    p = read_number(args.prime)
    system, cls = _class_from(args)
    rep = certify_widely(p, cls, system, not args.no_leading_to_zero, args.k_range,
                         args.checkpoint, args.workers, args.checkpoint_every)
    lines = [
        f"membership:      {rep.membership}",
        f"period check:    {rep.period_check}",
        f"gcd sweep:       {rep.gcd_sweep.all_passed if rep.gcd_sweep else None}",
        f"delicacy:        {rep.delicacy.delicate if rep.delicacy else rep.delicacy_error}",
        f"exceeds factors: {rep.exceeds_factors}",
        f"WIDELY DIGITALLY DELICATE: {rep.all_passed}",
    ]
    out.emit("verify-widely", rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.all_passed else EXIT_FALSE


def cmd_enumerate(args, out):
    found = enumerate_delicate(args.base, args.bound, not args.no_leading_to_zero)
    out.emit("enumerate", found, "\n".join(map(str, found)))
    return EXIT_OK


def cmd_validate_factors(args, out):
    checks = validate_factors(load_factor_table(args.table))
    result = [{"n": c.n, "factor": str(c.factor), "claimed_prime": c.claimed_prime,
               "probable_prime": c.probable_prime, "note": c.note} for c in checks]
    out.emit("validate-factors", result,
             "\n".join(f"phi n={c.n}: {c.factor} {c.note}" for c in checks))
    return EXIT_FALSE if any(c.mismatch for c in checks) else EXIT_OK


# -------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="delicate-primes",
        description="Covering-congruence search and verification for widely "
                    "digitally delicate primes.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("-v", "--verbose", action="store_true")
    # accepted after the subcommand as well
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def covering_cmd(name, func, help):
        p = add(name, help=help)
        p.add_argument("covering", help="covering-system file")
        p.add_argument("--cap", type=int, default=DEFAULT_PERIOD_CAP,
                       help="largest period the coverage check will scan")
        p.set_defaults(func=func)
        return p

    def class_opts(p):
        p.add_argument("--odd", action="store_true", help="add the class 1 mod 2")
        p.add_argument("--extra", action="append", metavar="R:M",
                       help="additional residue class (repeatable)")

    def ltz(p):
        p.add_argument("--no-leading-to-zero", action="store_true",
                       help="do not change the leading digit to 0")

    covering_cmd("verify-covering", cmd_verify_covering,
                 "verify entries and per-digit coverage")

    p = covering_cmd("build-class", cmd_build_class, "CRT-assemble the class a mod M")
    class_opts(p)

    p = covering_cmd("search", cmd_search, "search the class for a delicate probable prime")
    class_opts(p)
    ltz(p)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10**6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK)

    p = add("check", help="test whether one number is digitally delicate")
    p.add_argument("number", help="decimal literal or path to a file holding it")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--sample", type=int, help="test only this many seeded mutations")
    p.add_argument("--seed", type=int, default=0)
    ltz(p)
    p.set_defaults(func=cmd_check)

    p = add("verify-widely", help="certify a prime against a covering system")
    p.add_argument("prime", help="file holding the prime (or a decimal literal)")
    p.add_argument("covering", help="covering-system file")
    p.add_argument("--cap", type=int, default=DEFAULT_PERIOD_CAP)
    class_opts(p)
    ltz(p)
    p.add_argument("--k-range", type=_k_range, metavar="LO:HI")
    p.add_argument("--checkpoint", type=Path, help="resumable sweep state file")
    p.add_argument("--checkpoint-every", type=int, default=DEFAULT_CHECKPOINT_EVERY)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify_widely)

    p = add("enumerate", help="list digitally delicate primes up to a bound")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--bound", type=int, required=True)
    ltz(p)
    p.set_defaults(func=cmd_enumerate)

    p = add("validate-factors", help="check a cyclotomic factor table")
    p.add_argument("table")
    p.set_defaults(func=cmd_validate_factors)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for name in ("workers", "max_steps", "bound", "start", "chunk", "sample", "checkpoint_every"):
        value = getattr(args, name, None)
        if value is not None and value < (0 if name in ("max_steps", "bound", "start") else 1):
            parser.error(f"--{name.replace('_', '-')} out of range: {value}")
    out = _Out(args)
    try:
        return args.func(args, out)
    except (ParseError, OSError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PeriodTooLarge, OrderSearchExceeded) as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (Inconsistent, NotCovering, EntryInvalid, DegenerateClass, FactorInvalid) as exc:
        out.emit(args.command, {"ok": False, "error": f"{type(exc).__name__}: {exc}"},
                 f"{type(exc).__name__}: {exc}")
        return EXIT_FALSE
    except DelicateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
