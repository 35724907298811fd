"""Line-oriented file formats for covering systems and cyclotomic factor tables.

Covering-system file::

    # comment
    base 2
    entry d=1 q=3 n=2 r=0

Factor-table file::

    base 10
    phi n=6 factors=7,13
    phi n=605 factors=<prime>,<composite>C

Blank lines and ``#`` comments are ignored everywhere; ``base`` must be the
first meaningful line.  Unknown keywords and unknown keys are rejected.
"""
from dataclasses import dataclass, field
from pathlib import Path

from .covering import CoveringEntry, CoveringSystem, cyclotomic_value
from .errors import DuplicateEntry, FactorInvalid, ParseError
from .primality import is_probable_prime

_ENTRY_KEYS = ("d", "q", "n", "r")


def _meaningful_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _int(token, lineno, what, minimum=None):
    if not token.isdigit():
        raise ParseError(lineno, f"{what} must be a non-negative decimal integer, got {token!r}")
    value = int(token)
    if minimum is not None and value < minimum:
        raise ParseError(lineno, f"{what} must be >= {minimum}, got {value}")
    return value


def _parse_base(lines, kind):
    first = next(lines, None)
    if first is None:
        raise ParseError(1, f"{kind} file is empty; expected 'base <B>'")
    lineno, line = first
    parts = line.split()
    if len(parts) != 2 or parts[0] != "base":
        raise ParseError(lineno, f"expected 'base <B>', got {line!r}")
    return _int(parts[1], lineno, "base", minimum=2)


def _keyvals(parts, lineno, allowed):
    out = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(lineno, f"expected key=value, got {part!r}")
        if key not in allowed:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in out:
            raise ParseError(lineno, f"key {key!r} given twice")
        out[key] = value
    missing = [k for k in allowed if k not in out]
    if missing:
        raise ParseError(lineno, f"missing key(s): {', '.join(missing)}")
    return out


def parse_covering_file(text):
    """Parse a covering-system file.  Entries are not verified here."""
    lines = _meaningful_lines(text)
    base = _parse_base(lines, "covering")
    entries, seen = [], set()
    for lineno, line in lines:
        keyword, *parts = line.split()
        if keyword != "entry":
            raise ParseError(lineno, f"unknown keyword {keyword!r}")
        kv = _keyvals(parts, lineno, _ENTRY_KEYS)
        d = _int(kv["d"], lineno, "d", minimum=1)
        q = _int(kv["q"], lineno, "q", minimum=2)
        n = _int(kv["n"], lineno, "n", minimum=1)
        r = _int(kv["r"], lineno, "r")
        if d >= base:
            raise ParseError(lineno, f"digit {d} not in 1..{base - 1}")
        if r >= n:
            raise ParseError(lineno, f"residue r={r} must be < n={n}")
        if (d, q, r) in seen:
            raise DuplicateEntry(lineno, f"duplicate entry d={d} q={q} r={r}")
        seen.add((d, q, r))
        entries.append(CoveringEntry(d, q, n, r))
    return CoveringSystem(base, entries)


def format_covering(system):
    lines = [f"base {system.base}"]
    lines += [f"entry d={e.digit} q={e.factor} n={e.exponent} r={e.residue}"
              for e in system.entries]
    return "\n".join(lines) + "\n"


def load_covering(path):
    return parse_covering_file(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class FactorTable:
    base: int
    rows: dict = field(default_factory=dict)  # n -> tuple of (factor, claimed_prime)


def parse_factor_table(text):
    lines = _meaningful_lines(text)
    base = _parse_base(lines, "factor-table")
    rows = {}
    for lineno, line in lines:
        keyword, *parts = line.split()
        if keyword != "phi":
            raise ParseError(lineno, f"unknown keyword {keyword!r}")
        kv = _keyvals(parts, lineno, ("n", "factors"))
        n = _int(kv["n"], lineno, "n", minimum=1)
        if n in rows:
            raise DuplicateEntry(lineno, f"row n={n} given twice")
        factors = []
        for tok in kv["factors"].split(","):
            composite = tok.endswith("C")
            f = _int(tok[:-1] if composite else tok, lineno, "factor", minimum=2)
            factors.append((f, not composite))
        rows[n] = tuple(factors)
    return FactorTable(base, rows)


def format_factor_table(table):
    lines = [f"base {table.base}"]
    for n, factors in table.rows.items():
        toks = ",".join(f"{f}" if prime else f"{f}C" for f, prime in factors)
        lines.append(f"phi n={n} factors={toks}")
    return "\n".join(lines) + "\n"


def load_factor_table(path):
    return parse_factor_table(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class FactorCheck:
    n: int
    factor: int
    claimed_prime: bool
    probable_prime: bool

    @property
    def mismatch(self):
        """Claimed prime but fails the probable-prime test."""
        return self.claimed_prime and not self.probable_prime

    @property
    def note(self):
        if self.mismatch:
            return "claimed prime but composite"
        if not self.probable_prime:
            return "composite factor (accepted)"
        if not self.claimed_prime:
            return "flagged composite but tests probable-prime"
        return "prime"


def validate_factors(table):
    """Check every factor divides its cyclotomic value; classify each.

    Raises FactorInvalid on inexact division.  Composite factors are accepted
    and noted.
    """
    out = []
    for n, factors in table.rows.items():
        phi = cyclotomic_value(n, table.base)
        for f, claimed in factors:
            if phi % f:
                raise FactorInvalid(n, f)
            out.append(FactorCheck(n, f, claimed, is_probable_prime(f)))
    return out
