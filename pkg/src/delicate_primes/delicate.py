"""Digit mutations, delicacy predicates, small-range enumeration and class search.

Positions count from the units place (position 0).  Mutations are produced
least-significant position first, replacement digits ascending; that is also
the order in which the delicacy test short-circuits.
"""
import logging
import random
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np
from gmpy2 import is_square, mpz

from . import _kernels
from .errors import DegenerateClass, NotPrime
from .primality import (
    DEFAULT_TRIAL_BOUND,
    _TRIAL_DEFAULT,
    is_probable_prime,
    is_strong_lucas_probable_prime,
    is_strong_probable_prime,
)

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 256
# below this size the residue filter costs more than it saves
_FILTER_MIN_BITS = 256


@dataclass(frozen=True)
class DigitVector:
    base: int
    digits: tuple

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if not self.digits or self.digits[0] == 0:
            raise ValueError("digits must be nonempty with a nonzero leading digit")
        if any(not 0 <= d < self.base for d in self.digits):
            raise ValueError(f"digit outside [0, {self.base})")

    @property
    def value(self):
        return from_digits(self.digits, self.base)

    def __len__(self):
        return len(self.digits)


def to_digits(n, base=10):
    """Base-``base`` digits of ``n >= 1``, most significant first."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if base == 10:
        return DigitVector(10, tuple(map(int, str(n))))
    out = []
    n = mpz(n)
    while n:
        n, d = divmod(n, base)
        out.append(int(d))
    return DigitVector(base, tuple(reversed(out)))


def from_digits(digits, base=10):
    if base == 10:
        return int("".join(map(str, digits)))
    n = 0
    for d in digits:
        n = n * base + d
    return n


def digit_count(n, base=10):
    return len(to_digits(n, base))


def iter_mutations(n, base=10, leading_to_zero=True):
    """Yield ``(position, new_digit, value)`` for every single-digit change of ``n``."""
    digits = to_digits(n, base).digits
    top = len(digits) - 1
    pw = 1
    for pos in range(len(digits)):
        old = digits[top - pos]
        for nd in range(base):
            if nd == old or (pos == top and nd == 0 and not leading_to_zero):
                continue
            yield pos, nd, n + (nd - old) * pw
        pw *= base


def mutations(n, base=10, leading_to_zero=True):
    """All values one digit-change away from ``n`` (leading digit to 0 included by default)."""
    return [v for _, _, v in iter_mutations(n, base, leading_to_zero)]


@dataclass(frozen=True)
class MutationReport:
    original: int
    mutations_tested: int
    first_prime_mutation: tuple | None  # (position, new_digit, value)
    delicate: bool
    exhaustive: bool = True

    def to_dict(self):
        w = self.first_prime_mutation
        return {
            "original": str(self.original),
            "mutations_tested": self.mutations_tested,
            "first_prime_mutation": None if w is None else
            {"position": w[0], "digit": w[1], "value": str(w[2])},
            "delicate": self.delicate,
            "exhaustive": self.exhaustive,
        }


class _ResidueFilter:
    """Tracks ``n mod p`` and ``base**k mod p`` over small primes ``p``.

    A mutation ``n + delta * base**k`` is rejected without bignum work when
    some small prime divides it.
    """

    def __init__(self, n, base, primes=_TRIAL_DEFAULT):
        self.primes = np.array(primes, dtype=np.int64)
        n = mpz(n)
        self.n_mod = np.array([int(n % p) for p in primes], dtype=np.int64)
        self.base = base

    def composite_digits(self, pw_mod, old):
        """Boolean per replacement digit: divisible by a small prime."""
        nd = np.arange(self.base, dtype=np.int64)[:, None]
        vals = (self.n_mod + ((nd - old) % self.primes) * pw_mod) % self.primes
        return (vals == 0).any(axis=1)


def _bpsw_no_trial(v):
    if not is_strong_probable_prime(v, 2):
        return False
    if is_square(v):
        return False
    return is_strong_lucas_probable_prime(v)


def _select(n, base, leading_to_zero, sample, seed):
    if sample is None:
        return None
    total = digit_count(n, base) * (base - 1) - (0 if leading_to_zero else 1)
    if sample >= total:
        return None
    rng = random.Random(seed)
    return set(rng.sample(range(total), sample))


def is_digitally_delicate(n, base=10, leading_to_zero=True, sample=None, seed=None,
                          trial_bound=DEFAULT_TRIAL_BOUND):
    """Test every (or a seeded sample of ``sample``) single-digit mutation of ``n``.

    Mutations equal to 0 or 1 count as non-prime.  Raises NotPrime when ``n``
    itself is not a probable prime.
    """
    n = int(n)
    if not is_probable_prime(n, trial_bound):
        raise NotPrime(f"{n} is not a probable prime" if n.bit_length() < 200
                       else f"{n.bit_length()}-bit input is not a probable prime")
    chosen = _select(n, base, leading_to_zero, sample, seed)
    if n.bit_length() < _FILTER_MIN_BITS or trial_bound != DEFAULT_TRIAL_BOUND:
        tested = 0
        for i, (pos, nd, v) in enumerate(iter_mutations(n, base, leading_to_zero)):
            if chosen is not None and i not in chosen:
                continue
            tested += 1
            if is_probable_prime(v, trial_bound):
                return MutationReport(n, tested, (pos, nd, v), False, chosen is None)
        return MutationReport(n, tested, None, True, chosen is None)
    return _delicate_big(n, base, leading_to_zero, chosen)


def _delicate_big(n, base, leading_to_zero, chosen):
    digits = to_digits(n, base).digits
    top = len(digits) - 1
    filt = _ResidueFilter(n, base)
    pw_mod = np.ones_like(filt.primes)
    pw = mpz(1)
    i = tested = 0
    for pos in range(len(digits)):
        old = digits[top - pos]
        small = filt.composite_digits(pw_mod, old)
        for nd in range(base):
            if nd == old or (pos == top and nd == 0 and not leading_to_zero):
                continue
            idx, i = i, i + 1
            if chosen is not None and idx not in chosen:
                continue
            tested += 1
            if small[nd]:
                continue
            v = n + (nd - old) * pw
            if v > 1 and _bpsw_no_trial(v):
                return MutationReport(n, tested, (pos, nd, int(v)), False, chosen is None)
        pw *= base
        pw_mod = pw_mod * base % filt.primes
    return MutationReport(n, tested, None, True, chosen is None)


def enumerate_delicate(base, bound, leading_to_zero=True, segment=1 << 20):
    """All digitally delicate primes ``<= bound``, increasing.

    Primes come from a segmented sieve; mutations are tested by a
    deterministic 64-bit Miller-Rabin kernel, so the list is exact.
    """
    if bound < 2:
        return []
    ndig = digit_count(bound, base)
    word_ok = base ** ndig < _kernels.KERNEL_LIMIT
    sieve_primes = _kernels.small_primes(isqrt(bound) + 1)
    out = []
    for lo in range(0, bound + 1, segment):
        hi = min(lo + segment, bound + 1)
        primes = np.flatnonzero(_kernels.sieve_segment(lo, hi, sieve_primes)) + lo
        if primes.size == 0:
            continue
        if word_ok:
            mask = _kernels.delicate_mask(primes, base, leading_to_zero)
            out.extend(primes[mask].tolist())
        else:
            out.extend(p for p in primes.tolist()
                       if is_digitally_delicate(p, base, leading_to_zero).delicate)
    return out


@dataclass(frozen=True)
class SearchResult:
    candidate: int
    index: int
    digit_count: int
    status: str = "probable"  # or "widely-verified"

    def to_dict(self):
        return {"candidate": str(self.candidate), "index": self.index,
                "digit_count": self.digit_count, "status": self.status}


def _scan_chunk(a, M, base, t_lo, t_hi, leading_to_zero):
    a, M = mpz(a), mpz(M)
    for t in range(t_lo, t_hi):
        c = a + t * M
        if not is_probable_prime(c):
            continue
        if is_digitally_delicate(c, base, leading_to_zero).delicate:
            return t
    return None


def search_widely(cls, system, start=0, max_steps=10**6, workers=1,
                  chunk=DEFAULT_CHUNK, leading_to_zero=True):
    """Smallest ``t`` in ``[start, start + max_steps)`` with ``a + t*M`` delicate and prime.

    The range is cut into contiguous chunks handed to ``workers`` processes.
    Chunks above the best hit so far are dropped and every chunk below it is
    finished, so the answer does not depend on ``workers``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    g = gcd(cls.residue, cls.modulus)
    if g != 1:
        raise DegenerateClass(f"gcd(a, M) = {g}")
    if max_steps <= 0:
        return None
    stop = start + max_steps
    args = (cls.residue, cls.modulus, system.base)

    def result(t):
        c = cls.member(t)
        return SearchResult(c, t, digit_count(c, system.base))

    if workers == 1:
        for lo in range(start, stop, chunk):
            t = _scan_chunk(*args, lo, min(lo + chunk, stop), leading_to_zero)
            if t is not None:
                return result(t)
        return None

    nchunks = -(-max_steps // chunk)
    best = None
    pending = {}
    nxt = 0
    ex = ProcessPoolExecutor(workers)
    try:
        while True:
            while (len(pending) < 2 * workers and nxt < nchunks
                   and (best is None or nxt < best)):
                lo = start + nxt * chunk
                pending[nxt] = ex.submit(_scan_chunk, *args, lo, min(lo + chunk, stop),
                                         leading_to_zero)
                nxt += 1
            if not pending:
                break
            done, _ = wait(pending.values(), return_when=FIRST_COMPLETED)
            for idx in [i for i, f in pending.items() if f in done]:
                t = pending.pop(idx).result()
                if t is not None and (best is None or idx < best):
                    best, best_t = idx, t
                    log.info("hit in chunk %d at t=%d", idx, t)
            if best is not None:
                for idx in [i for i in pending if i > best]:
                    pending.pop(idx).cancel()
    finally:
        ex.shutdown(wait=True, cancel_futures=True)
    return None if best is None else result(best_t)
