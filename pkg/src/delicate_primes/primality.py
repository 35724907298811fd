"""Baillie-PSW probable-prime testing for arbitrary-precision integers.

The test is a strong Fermat test to base 2 followed by a strong Lucas test
with Selfridge parameters.  No composite below 2**64 passes both, so the
answer is exact there.  Arithmetic runs on ``gmpy2.mpz``.
"""
from dataclasses import dataclass, field
from enum import Enum
from math import isqrt

from gmpy2 import mpz, jacobi, is_square

from ._kernels import small_primes

DEFAULT_TRIAL_BOUND = 10_000

_SMALL = small_primes(1_000_000).tolist()
_TRIAL_DEFAULT = [p for p in _SMALL if p < DEFAULT_TRIAL_BOUND]


class Verdict(str, Enum):
    COMPOSITE = "composite"
    PROBABLE_PRIME = "probable-prime"
    PROVEN_PRIME_EXTERNAL = "proven-prime-external"


@dataclass(frozen=True)
class PrimalityVerdict:
    value: int
    verdict: Verdict
    method: str
    witness: dict = field(default_factory=dict)

    @property
    def is_prime(self):
        return self.verdict is not Verdict.COMPOSITE


def trial_divide(n, bound):
    """Least proper prime factor of ``n`` not exceeding ``bound``, or None.

    A prime ``n`` has no proper factor, so ``trial_divide(97, 100)`` is None.
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    n = abs(int(n))
    if n < 2:
        return None
    n = mpz(n)
    ps = _TRIAL_DEFAULT if bound == DEFAULT_TRIAL_BOUND else _SMALL
    for p in ps:
        if p > bound:
            return None
        if n % p == 0:
            return p if p != n else None
    # past the tabulated primes the least divisor found is necessarily prime
    stop = min(bound, isqrt(n))
    for f in range(_SMALL[-1] + 2, stop + 1, 2):
        if n % f == 0:
            return f
    return None


def is_strong_probable_prime(n, base=2):
    """Strong Fermat (Miller-Rabin) test of odd ``n > 2`` to one base."""
    n = mpz(n)
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    x = pow(mpz(base), d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _selfridge_d(n):
    d = 5
    while True:
        j = jacobi(d, n)
        if j == -1:
            return d
        if j == 0 and abs(d) != n:
            return 0
        d = -d - 2 if d > 0 else -d + 2


def is_strong_lucas_probable_prime(n):
    """Strong Lucas test with Selfridge's method A parameters.

    ``n`` must be odd, > 2 and not a perfect square.
    """
    n = mpz(n)
    D = _selfridge_d(n)
    if D == 0:
        return False
    P, Q = 1, (1 - D) // 4
    d = n + 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1

    U, V, Qk = mpz(1), mpz(P), mpz(Q % n)
    for bit in bin(d)[3:]:
        U = U * V % n
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = P * U + V, D * U + P * V
            U = (U + n if U & 1 else U) // 2 % n
            V = (V + n if V & 1 else V) // 2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def classify(n, trial_bound=DEFAULT_TRIAL_BOUND):
    """Full verdict with the witness that settled it."""
    n = int(n)
    if n < 2:
        return PrimalityVerdict(n, Verdict.COMPOSITE, "definition", {"reason": "n < 2"})
    if n < 4:
        return PrimalityVerdict(n, Verdict.PROBABLE_PRIME, "definition")
    f = trial_divide(n, min(trial_bound, isqrt(n)))
    if f is not None:
        return PrimalityVerdict(n, Verdict.COMPOSITE, "trial-division", {"factor": f})
    if isqrt(n) <= trial_bound:
        return PrimalityVerdict(n, Verdict.PROBABLE_PRIME, "trial-division")
    if not is_strong_probable_prime(n, 2):
        return PrimalityVerdict(n, Verdict.COMPOSITE, "strong-fermat", {"base": 2})
    if is_square(n):
        return PrimalityVerdict(n, Verdict.COMPOSITE, "perfect-square", {"factor": isqrt(n)})
    if not is_strong_lucas_probable_prime(n):
        return PrimalityVerdict(n, Verdict.COMPOSITE, "strong-lucas")
    return PrimalityVerdict(n, Verdict.PROBABLE_PRIME, "bpsw")


def is_probable_prime(n, trial_bound=DEFAULT_TRIAL_BOUND):
    """Baillie-PSW.  Exact for ``n < 2**64``; never False for a prime."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if not n & 1:
        return False
    root = isqrt(n)
    if trial_divide(n, min(trial_bound, root)) is not None:
        return False
    if root <= trial_bound:
        return True
    if not is_strong_probable_prime(n, 2):
        return False
    if is_square(n):
        return False
    return is_strong_lucas_probable_prime(n)


def external_proof(n, method="ECPP"):
    """Record a primality proof obtained elsewhere (never re-derived here)."""
    return PrimalityVerdict(int(n), Verdict.PROVEN_PRIME_EXTERNAL, method)
