"""Residue classes, multiplicative orders, cyclotomic values and CRT assembly.

A covering system for base ``B`` lists, for each digit ``d`` in ``1..B-1``,
entries ``(d, q, n, r)`` with ``B**n == 1 (mod q)``.  Choosing
``a == -d * B**r (mod q)`` makes ``q`` divide ``a + d * B**k`` for every
``k == r (mod n)``; when the classes ``r mod n`` of one digit cover all
integers, every ``a + d * B**k`` has a factor in common with the modulus.
"""
from dataclasses import dataclass
from math import gcd, lcm, isqrt

from gmpy2 import mpz, gcd as mpz_gcd

from . import _kernels
from .errors import (
    DegenerateClass,
    EntryInvalid,
    Inconsistent,
    NotCoprime,
    NotCovering,
    OrderSearchExceeded,
    PeriodTooLarge,
)
from .primality import is_probable_prime

DEFAULT_PERIOD_CAP = 1 << 32
DEFAULT_TRIAL_BOUND = 10**6
DEFAULT_RHO_ITERATIONS = 1 << 20


@dataclass(frozen=True)
class ResidueClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} outside [0, {self.modulus})")

    @classmethod
    def of(cls, residue, modulus):
        """Build the class, reducing ``residue`` into ``[0, modulus)``."""
        return cls(int(residue) % int(modulus), int(modulus))

    def __contains__(self, k):
        return k % self.modulus == self.residue

    def __str__(self):
        return f"{self.residue} mod {self.modulus}"


@dataclass(frozen=True)
class CoveringEntry:
    """``factor`` divides ``a + digit * B**k`` whenever ``k == residue (mod exponent)``."""

    digit: int
    factor: int
    exponent: int
    residue: int

    def __post_init__(self):
        if self.factor < 2:
            raise ValueError(f"factor must be >= 2, got {self.factor}")
        if self.exponent < 1:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")
        if not 0 <= self.residue < self.exponent:
            raise ValueError(f"residue {self.residue} outside [0, {self.exponent})")

    @property
    def k_class(self):
        return ResidueClass(self.residue, self.exponent)


@dataclass(frozen=True)
class CoveringSystem:
    base: int
    entries: tuple = ()

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def period(self):
        return lcm(*(e.exponent for e in self.entries)) if self.entries else 1

    @property
    def digits(self):
        return range(1, self.base)

    def for_digit(self, d):
        return [e for e in self.entries if e.digit == d]

    @property
    def factors(self):
        """Distinct entry factors in first-appearance order."""
        return list(dict.fromkeys(e.factor for e in self.entries))


@dataclass(frozen=True)
class CongruenceClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or not 0 <= self.residue < self.modulus:
            raise ValueError(f"need 0 <= a < M, got a={self.residue}, M={self.modulus}")

    def __contains__(self, n):
        return n % self.modulus == self.residue

    def member(self, t):
        return self.residue + t * self.modulus


# ----------------------------------------------------------- factoring

def _rho(n, max_iterations):
    """Brent's variant of Pollard rho; a nontrivial factor or None."""
    n = mpz(n)
    for c in range(1, 20):
        y, r, q, g = mpz(2), 1, mpz(1), mpz(1)
        x = ys = y
        spent = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = mpz_gcd(q, n)
                k += 128
            spent += r
            r *= 2
            if spent > max_iterations:
                return None
        if g == n:
            g = mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = mpz_gcd(x - ys, n)
        if g != n:
            return int(g)
    return None


def factorize(n, trial_bound=DEFAULT_TRIAL_BOUND, rho_iterations=DEFAULT_RHO_ITERATIONS):
    """Prime factorisation as ``{p: e}``.

    Trial division up to ``trial_bound``, then Pollard rho on what remains.
    Raises OrderSearchExceeded when rho exhausts ``rho_iterations``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    out = {}
    for p in _kernels.small_primes(min(trial_bound, isqrt(n) + 1)).tolist():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        f = _rho(m, rho_iterations)
        if f is None:
            raise OrderSearchExceeded(f"could not split {m} within {rho_iterations} rho iterations")
        stack += [f, m // f]
    return dict(sorted(out.items()))


def mobius(n):
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    exps = factorize(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def _divisors(n):
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


# --------------------------------------------------------------- orders

def _reduce_to_order(base, q, multiple, prime_factors):
    n = multiple
    for p in prime_factors:
        while n % p == 0 and pow(base, n // p, q) == 1:
            n //= p
    return n


def carmichael_lambda(factors):
    """Carmichael function from a factorisation ``{p: e}``."""
    parts = []
    for p, e in factors.items():
        if p == 2 and e >= 3:
            parts.append(2 ** (e - 2))
        else:
            parts.append((p - 1) * p ** (e - 1))
    return lcm(*parts) if parts else 1


def multiplicative_order(base, q, trial_bound=DEFAULT_TRIAL_BOUND,
                         rho_iterations=DEFAULT_RHO_ITERATIONS):
    """Least ``n >= 1`` with ``base**n == 1 (mod q)``.

    Factors ``q``, forms its Carmichael value (a multiple of the order), factors
    that, and strips primes while the power stays 1.  Never returns a
    non-minimal exponent: raises OrderSearchExceeded instead.
    """
    base, q = int(base), int(q)
    if q < 2:
        raise ValueError("q must be >= 2")
    if gcd(base, q) != 1:
        raise NotCoprime(f"gcd({base}, {q}) = {gcd(base, q)}")
    lam = carmichael_lambda(factorize(q, trial_bound, rho_iterations))
    lam_primes = factorize(lam, trial_bound, rho_iterations)
    return _reduce_to_order(mpz(base), mpz(q), lam, lam_primes)


def exact_order_given_multiple(base, q, n):
    """Order of ``base`` mod ``q`` given ``base**n == 1``; only ``n`` is factored."""
    return _reduce_to_order(mpz(base), mpz(q), n, factorize(n))


# ----------------------------------------------------------- cyclotomic

def cyclotomic_value(n, base):
    """``Phi_n(base)`` as the exact product of ``(base**(n/d) - 1)**mobius(d)``."""
    if n < 1 or base < 2:
        raise ValueError("need n >= 1 and base >= 2")
    num, den = mpz(1), mpz(1)
    b = mpz(base)
    for d in _divisors(n):
        mu = mobius(d)
        if mu == 1:
            num *= b ** (n // d) - 1
        elif mu == -1:
            den *= b ** (n // d) - 1
    value, rem = divmod(num, den)
    assert rem == 0
    return int(value)


# --------------------------------------------------------- verification

@dataclass(frozen=True)
class EntryReport:
    entry: CoveringEntry
    valid: bool
    exact_order: bool
    order: int
    probable_prime: bool
    notes: tuple = ()


def verify_entry(entry, base):
    """Check one entry; raise EntryInvalid naming the failed condition."""
    if not 1 <= entry.digit < base:
        raise EntryInvalid(f"digit {entry.digit} not in 1..{base - 1}")
    g = gcd(base, entry.factor)
    if g != 1:
        raise EntryInvalid(f"gcd({base}, {entry.factor}) = {g}, factor must be coprime to base")
    if pow(mpz(base), entry.exponent, entry.factor) != 1:
        raise EntryInvalid(
            f"{base}^{entry.exponent} mod {entry.factor} != 1 for entry {entry}")
    order = exact_order_given_multiple(base, entry.factor, entry.exponent)
    prime = is_probable_prime(entry.factor)
    notes = []
    if order != entry.exponent:
        notes.append(f"exponent {entry.exponent} is a multiple of the order {order}")
    if not prime:
        notes.append("composite factor")
    return EntryReport(entry, True, order == entry.exponent, order, prime, tuple(notes))


@dataclass(frozen=True)
class Coverage:
    covered: bool
    uncovered: int | None = None
    period: int = 1

    def __bool__(self):
        return self.covered


def covers(classes, cap=DEFAULT_PERIOD_CAP):
    """Whether the classes cover every integer; if not, the least uncovered k."""
    classes = list(classes)
    period = lcm(*(c.modulus for c in classes)) if classes else 1
    if period > cap:
        raise PeriodTooLarge(f"lcm of moduli is {period}, above the cap {cap}")
    if not classes:
        return Coverage(False, 0, period)
    k = _kernels.first_uncovered(
        [c.modulus for c in classes], [c.residue for c in classes], period)
    return Coverage(k < 0, None if k < 0 else k, period)


def check_coverage(system, cap=DEFAULT_PERIOD_CAP):
    """Coverage per digit as ``{d: Coverage}``."""
    return {d: covers([e.k_class for e in system.for_digit(d)], cap)
            for d in system.digits}


# ------------------------------------------------------------------ CRT

def _merge(r1, m1, r2, m2):
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    m1g = m1 // g
    # solve r1 + m1 * t == r2 (mod m2)
    t = (r2 - r1) // g * pow(m1g, -1, m2 // g) % (m2 // g) if m2 // g > 1 else 0
    m = m1g * m2
    return (r1 + m1 * t) % m, m


def crt(classes):
    """Intersection of residue classes with arbitrary, not necessarily coprime, moduli."""
    classes = list(classes)
    r, m = mpz(0), mpz(1)
    for j, c in enumerate(classes):
        merged = _merge(r, m, mpz(c.residue), mpz(c.modulus))
        if merged is None:
            for i in range(j):
                if _merge(classes[i].residue, classes[i].modulus, c.residue, c.modulus) is None:
                    raise Inconsistent(classes[i], c)
            raise Inconsistent(ResidueClass(int(r), int(m)), c)
        r, m = merged
    return ResidueClass(int(r), int(m))


def entry_class(entry, base):
    """The class of ``a`` modulo ``entry.factor`` that the entry requires."""
    q = entry.factor
    return ResidueClass.of(-entry.digit * pow(mpz(base), entry.residue, q), q)


def build_congruence(system, extra=(), check=True, require_cover=True,
                     cap=DEFAULT_PERIOD_CAP):
    """CRT-assemble the search class ``a mod M`` from a covering system.

    With ``check`` every entry is verified first, and with ``require_cover``
    as well every digit's coverage is confirmed.  ``extra`` classes
    (typically ``1 mod 2``) join the CRT.
    """
    if check:
        for e in system.entries:
            verify_entry(e, system.base)
    if check and require_cover:
        for d, cov in check_coverage(system, cap).items():
            if not cov:
                raise NotCovering(d, cov.uncovered)
    classes = [entry_class(e, system.base) for e in system.entries] + list(extra)
    try:
        joint = crt(classes)
    except Inconsistent as exc:
        raise Inconsistent(exc.first, exc.second,
                           f"entries conflict: {exc.first} vs {exc.second}") from None
    a, M = joint.residue, joint.modulus
    g = gcd(a, M)
    if g != 1:
        raise DegenerateClass(f"gcd(a, M) = {g}: every candidate a + t*M shares that factor")
    return CongruenceClass(a, M)
