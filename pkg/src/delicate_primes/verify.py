"""Independent certification that a prime is widely digitally delicate.

Two facts together imply that ``p + d * B**k`` shares a factor with ``M`` for
every digit ``d`` and every ``k >= 0``:

1. each entry factor divides ``B**N - 1`` for the period ``N``, so
   ``B**k mod q`` repeats with period ``N``;
2. the sweep over one full period ``0 <= k < N`` finds ``gcd(p + d*B**k, M) > 1``
   for every ``d``.

If ``p`` also exceeds every factor of ``M``, each such number is larger than
its common factor with ``M``, hence composite, which covers every
leading-zero change.  The in-range changes are checked directly.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import gcd, mpz

from .delicate import MutationReport, digit_count, is_digitally_delicate
from .errors import CheckpointError, NotMember, NotPrime

log = logging.getLogger(__name__)

DEFAULT_CHECKPOINT_EVERY = 10**7

CHAIN = (
    "B^N = 1 mod every entry factor (period check) and gcd(p + d*B^k, M) > 1 "
    "for all d in 1..B-1, 0 <= k < N (sweep) imply gcd(p + d*B^k, M) > 1 for all "
    "k >= 0; with p above every factor of M each p + d*B^k is composite, so every "
    "leading-zero change yields a composite. Together with the in-range mutation "
    "test this makes p widely digitally delicate."
)


def verify_period(system):
    """``B**N == 1`` modulo every entry factor, by modular exponentiation."""
    N = system.period
    b = mpz(system.base)
    return all(pow(b, N, e.factor) == 1 for e in system.entries)


@dataclass(frozen=True)
class SweepReport:
    k_start: int
    k_stop: int
    all_passed: bool
    first_failure: tuple | None = None        # (d, k), any k
    first_leading_failure: tuple | None = None  # (d, k) with k >= digit_count(p)
    inner_failures: int = 0                   # failures at k < digit_count(p)
    resumed_from: int | None = None

    def to_dict(self):
        return {
            "k_range": [self.k_start, self.k_stop],
            "all_passed": self.all_passed,
            "first_failure": self.first_failure,
            "first_leading_failure": self.first_leading_failure,
            "inner_failures": self.inner_failures,
            "resumed_from": self.resumed_from,
        }


# ----------------------------------------------------------- checkpoint

def write_checkpoint(path, k, d, state):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(f"k={k} d={d} state={state}\n", encoding="utf-8")
    os.replace(tmp, path)


def read_checkpoint(path):
    """Parse ``k=<k> d=<d> state=<B^k mod M>``."""
    text = Path(path).read_text(encoding="utf-8").strip()
    try:
        kv = dict(tok.split("=", 1) for tok in text.split())
        out = int(kv.pop("k")), int(kv.pop("d")), int(kv.pop("state"))
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {text!r}") from exc
    if kv:
        raise CheckpointError(f"unknown checkpoint keys {sorted(kv)}")
    return out


# ---------------------------------------------------------------- sweep

def iter_sweep_gcds(p_mod, M, base, k_lo, k_hi, d_lo=1):
    """Yield ``(k, d, gcd(p + d*B**k, M))`` keeping ``B**k mod M`` incrementally."""
    M = mpz(M)
    p_mod = mpz(p_mod) % M
    state = pow(mpz(base), k_lo, M)
    for k in range(k_lo, k_hi):
        for d in range(d_lo if k == k_lo else 1, base):
            yield k, d, gcd((p_mod + d * state) % M, M)
        state = state * base % M


def _sweep_block(p_mod, M, base, k_lo, k_hi, d_lo, inner_limit):
    """Sequential sweep of ``[k_lo, k_hi)``; returns (first, first_leading, inner, stop_at)."""
    first = None
    inner = 0
    for k, d, g in iter_sweep_gcds(p_mod, M, base, k_lo, k_hi, d_lo):
        if g == 1:
            if first is None:
                first = (d, k)
            if k >= inner_limit:
                return first, (d, k), inner, (k, d)
            inner += 1
    return first, None, inner, None


def gcd_sweep(p, cls, system, k_range=None, checkpoint=None,
              checkpoint_every=DEFAULT_CHECKPOINT_EVERY, workers=1):
    """Check ``gcd(p + d*B**k, M) > 1`` for all digits ``d`` and ``k`` in ``k_range``.

    Keeps ``B**k mod M`` incrementally (one modular multiplication per step).
    Failures below ``digit_count(p)`` are counted but do not stop the sweep;
    the first failure at a leading-zero position does.

    ``checkpoint`` names a resumable state file, written every
    ``checkpoint_every`` steps; it is only honoured with ``workers == 1``.
    """
    p = int(p)
    if p % cls.modulus != cls.residue:
        raise NotMember("p is not congruent to a mod M")
    base = system.base
    k_start, k_stop = (0, system.period) if k_range is None else k_range
    M = mpz(cls.modulus)
    p_mod = mpz(p) % M
    inner_limit = digit_count(p, base)

    if workers > 1 and checkpoint is None:
        return _parallel_sweep(p_mod, M, base, k_start, k_stop, inner_limit, workers)

    k, d, resumed = k_start, 1, None
    if checkpoint is not None and Path(checkpoint).exists():
        k, d, state = read_checkpoint(checkpoint)
        if not k_start <= k <= k_stop:
            raise CheckpointError(f"checkpoint k={k} outside [{k_start}, {k_stop})")
        if pow(mpz(base), k, M) != state:
            raise CheckpointError("checkpoint state does not match B^k mod M")
        resumed = k
        log.info("resuming sweep at k=%d d=%d", k, d)

    first = leading = None
    inner = 0
    while k < k_stop:
        hi = min(k_stop, k + checkpoint_every) if checkpoint is not None else k_stop
        f, lead, n_inner, stop_at = _sweep_block(p_mod, M, base, k, hi, d, inner_limit)
        first = first or f
        inner += n_inner
        if lead is not None:
            leading = lead
            if checkpoint is not None:
                write_checkpoint(checkpoint, stop_at[0], stop_at[1],
                                 pow(mpz(base), stop_at[0], M))
            break
        k, d = hi, 1
        if checkpoint is not None:
            write_checkpoint(checkpoint, k, d, pow(mpz(base), k, M))
    return SweepReport(k_start, k_stop, first is None, first, leading, inner, resumed)


def _parallel_sweep(p_mod, M, base, k_start, k_stop, inner_limit, workers):
    span = k_stop - k_start
    step = -(-span // workers) if span > 0 else 1
    bounds = [(lo, min(lo + step, k_stop)) for lo in range(k_start, k_stop, step)]
    with ProcessPoolExecutor(workers) as ex:
        parts = list(ex.map(_sweep_block_args,
                            [(int(p_mod), int(M), base, lo, hi, 1, inner_limit)
                             for lo, hi in bounds]))
    first = leading = None
    inner = 0
    for f, lead, n_inner, _ in parts:
        first = first or f
        inner += n_inner
        if lead is not None:
            leading = lead
            break
    return SweepReport(k_start, k_stop, first is None, first, leading, inner)


def _sweep_block_args(args):
    return _sweep_block(mpz(args[0]), *args[1:])


# ---------------------------------------------------------- certificate

@dataclass
class WidelyReport:
    prime: int
    membership: bool
    period_check: bool
    gcd_sweep: SweepReport | None
    delicacy: MutationReport | None
    exceeds_factors: bool
    full_period: bool = True
    delicacy_error: str | None = None
    chain: str = CHAIN
    notes: list = field(default_factory=list)

    @property
    def all_passed(self):
        return (self.membership and self.period_check and self.exceeds_factors
                and self.full_period
                and self.gcd_sweep is not None and self.gcd_sweep.all_passed
                and self.delicacy is not None and self.delicacy.delicate)

    def to_dict(self):
        return {
            "prime": str(self.prime),
            "membership": self.membership,
            "period_check": self.period_check,
            "gcd_sweep": None if self.gcd_sweep is None else self.gcd_sweep.to_dict(),
            "delicacy": None if self.delicacy is None else self.delicacy.to_dict(),
            "delicacy_error": self.delicacy_error,
            "exceeds_factors": self.exceeds_factors,
            "full_period": self.full_period,
            "all_passed": self.all_passed,
            "chain": self.chain,
            "notes": self.notes,
        }


def certify_widely(p, cls, system, leading_to_zero=True, k_range=None,
                   checkpoint=None, workers=1, checkpoint_every=DEFAULT_CHECKPOINT_EVERY):
    """Run membership, period, sweep and mutation checks; failures are data."""
    p = int(p)
    member = p % cls.modulus == cls.residue
    period_ok = verify_period(system)
    full = k_range is None or tuple(k_range) == (0, system.period)
    sweep = None
    notes = []
    if not full:
        notes.append("sweep range is not one full period; the chain does not apply")
    if member:
        sweep = gcd_sweep(p, cls, system, k_range, checkpoint, checkpoint_every, workers)
    else:
        notes.append("p is not in the class a mod M; sweep skipped")
    delicacy, err = None, None
    try:
        delicacy = is_digitally_delicate(p, system.base, leading_to_zero)
    except NotPrime as exc:
        err = f"NotPrime: {exc}"
    exceeds = all(p > f for f in system.factors)
    return WidelyReport(p, member, period_ok, sweep, delicacy, exceeds, full, err, notes=notes)
