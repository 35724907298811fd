"""Hot integer loops: segmented sieve, coverage scan, 64-bit mutation test.

Every kernel exists twice: a numba ``@njit`` version (``*_nb``) and a pure
numpy version (``*_np``).  The public names dispatch to numba unless numba is
missing or the environment variable ``DELICATE_PRIMES_NO_NUMBA`` is set to a
non-empty value other than ``0``.  Both paths must return identical results;
the test-suite runs them against each other.

Word-size limits: the mutation kernels handle values below ``KERNEL_LIMIT``
(2**62).  Callers route anything larger to the bignum code in ``delicate``.
"""
import os

import numpy as np

try:
    import numba
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _numba_disabled():
    flag = os.environ.get("DELICATE_PRIMES_NO_NUMBA", "")
    return flag not in ("", "0")


USE_NUMBA = NUMBA_AVAILABLE and not _numba_disabled()

KERNEL_LIMIT = 1 << 62
_SQRT_INT63 = 3_037_000_499  # largest m with (m - 1)**2 < 2**63
_MR_BASES_64 = np.array(
    [2, 325, 9375, 28178, 450775, 9780504, 1795265022], dtype=np.int64
)
_TINY_PRIMES = np.array(
    [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47], dtype=np.int64
)


# ---------------------------------------------------------------- sieve

def small_primes(limit):
    """All primes ``<= limit`` as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, int(limit**0.5) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@njit(cache=True)
def _sieve_segment_nb(lo, hi, base_primes):
    n = hi - lo
    flags = np.ones(n, dtype=np.bool_)
    for i in range(min(n, max(0, 2 - lo))):
        flags[i] = False
    for p in base_primes:
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        for j in range(start - lo, n, p):
            flags[j] = False
    return flags


def _sieve_segment_np(lo, hi, base_primes):
    n = hi - lo
    flags = np.ones(n, dtype=np.bool_)
    flags[: min(n, max(0, 2 - lo))] = False
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        flags[start - lo :: p] = False
    return flags


def sieve_segment(lo, hi, base_primes):
    """Primality flags for ``lo <= x < hi``.

    ``base_primes`` must contain every prime up to ``isqrt(hi - 1)``.
    """
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        return np.zeros(0, dtype=np.bool_)
    if USE_NUMBA:
        return _sieve_segment_nb(lo, hi, base_primes)
    return _sieve_segment_np(lo, hi, base_primes)


def primes_up_to(bound, segment=1 << 22):
    """All primes ``<= bound`` via a segmented sieve, as an int64 array."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    base = small_primes(int(bound**0.5) + 1)
    out = []
    for lo in range(0, bound + 1, segment):
        hi = min(lo + segment, bound + 1)
        flags = sieve_segment(lo, hi, base)
        out.append(np.flatnonzero(flags).astype(np.int64) + lo)
    return np.concatenate(out)


# ------------------------------------------------------------- coverage

@njit(cache=True)
def _first_uncovered_nb(moduli, residues, period, block):
    start = 0
    while start < period:
        blen = min(block, period - start)
        mark = np.zeros(blen, dtype=np.bool_)
        for i in range(moduli.shape[0]):
            m = moduli[i]
            off = (residues[i] - start) % m
            for j in range(off, blen, m):
                mark[j] = True
        for j in range(blen):
            if not mark[j]:
                return start + j
        start += blen
    return -1


def _first_uncovered_np(moduli, residues, period, block):
    for start in range(0, period, block):
        blen = min(block, period - start)
        mark = np.zeros(blen, dtype=np.bool_)
        for m, r in zip(moduli.tolist(), residues.tolist()):
            mark[(r - start) % m :: m] = True
        if not mark.all():
            return start + int(np.argmin(mark))
    return -1


def first_uncovered(moduli, residues, period, block=1 << 22, prefer_numba=False):
    """Least ``k`` in ``[0, period)`` outside every class ``r mod m``, else -1.

    Memory is bounded by ``block`` bytes regardless of ``period``.  The work
    is strided stores, which numpy's slice assignment does about twice as fast
    as the compiled loop (see ``benchmarks/bench_kernels.py``), so the numpy
    path is used unless ``prefer_numba`` is set.
    """
    moduli = np.asarray(moduli, dtype=np.int64)
    residues = np.asarray(residues, dtype=np.int64)
    if USE_NUMBA and prefer_numba:
        return int(_first_uncovered_nb(moduli, residues, int(period), int(block)))
    return _first_uncovered_np(moduli, residues, int(period), int(block))


# --------------------------------------------- 64-bit primality (numba)

@njit(cache=True)
def _mulmod(a, b, m):
    if m <= _SQRT_INT63:
        return (a * b) % m
    r = 0
    a %= m
    while b > 0:
        if b & 1:
            r += a
            if r >= m:
                r -= m
        a += a
        if a >= m:
            a -= m
        b >>= 1
    return r


@njit(cache=True)
def _powmod(a, e, m):
    r = 1
    a %= m
    while e > 0:
        if e & 1:
            r = _mulmod(r, a, m)
        a = _mulmod(a, a, m)
        e >>= 1
    return r


@njit(cache=True)
def _is_prime_word(n):
    """Deterministic Miller-Rabin for ``0 <= n < 2**62``."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for p in _TINY_PRIMES:
        if n % p == 0:
            return n == p
    if n < 2209:
        return True
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES_64:
        a = a % n
        if a == 0:
            continue
        x = _powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mulmod(x, x, n)
            if x == n - 1:
                composite = False
                break
        if composite:
            return False
    return True


@njit(cache=True)
def _is_delicate_word(p, base, leading_to_zero):
    pw = 1
    while pw * base <= p:
        pw *= base
    top = pw
    pw = 1
    while True:
        old = (p // pw) % base
        for nd in range(base):
            if nd == old:
                continue
            if pw == top and nd == 0 and not leading_to_zero:
                continue
            v = p + (nd - old) * pw
            if _is_prime_word(v):
                return False
        if pw == top:
            return True
        pw *= base


@njit(cache=True)
def _delicate_mask_nb(primes, base, leading_to_zero):
    out = np.zeros(primes.shape[0], dtype=np.bool_)
    for i in range(primes.shape[0]):
        out[i] = _is_delicate_word(primes[i], base, leading_to_zero)
    return out


@njit(cache=True)
def _is_prime_words_nb(values):
    out = np.zeros(values.shape[0], dtype=np.bool_)
    for i in range(values.shape[0]):
        out[i] = _is_prime_word(values[i])
    return out


# ---------------------------------------------- 64-bit primality (numpy)

def _powmod_vec(a, e, n):
    """Elementwise ``a**e mod n`` for uint64 arrays with ``n < 2**32``."""
    result = np.ones_like(n)
    a = a % n
    e = e.copy()
    while e.any():
        odd = (e & 1).astype(bool)
        result = np.where(odd, (result * a) % n, result)
        a = (a * a) % n
        e >>= np.uint64(1)
    return result


def _is_prime_words_small_np(values):
    """Vectorised Miller-Rabin, bases 2, 7, 61: exact for ``n < 4759123141``."""
    n = values.astype(np.uint64)
    out = np.zeros(n.shape, dtype=bool)
    out[n == 2] = True
    cand = (n > 2) & (n % np.uint64(2) == 1)
    for p in _TINY_PRIMES.tolist():
        hit = cand & (n % np.uint64(p) == 0)
        out[hit & (n == p)] = True
        cand &= ~hit
    small = cand & (n < 2209)
    out[small] = True
    cand &= ~small
    idx = np.flatnonzero(cand)
    if idx.size == 0:
        return out
    m = n[idx]
    d = m - np.uint64(1)
    s = np.zeros(m.shape, dtype=np.int64)
    while True:
        even = (d & np.uint64(1)) == 0
        if not even.any():
            break
        d = np.where(even, d >> np.uint64(1), d)
        s += even
    alive = np.ones(m.shape, dtype=bool)
    for a in (2, 7, 61):
        base = np.full(m.shape, a, dtype=np.uint64) % m
        skip = base == 0
        x = _powmod_vec(base, d, m)
        ok = skip | (x == 1) | (x == m - np.uint64(1))
        for r in range(1, int(s.max())):
            x = (x * x) % m
            ok |= (x == m - np.uint64(1)) & (r < s)
        alive &= ok
    out[idx] = alive
    return out


def _is_prime_word_py(n):
    if n < 2:
        return False
    for p in (2,) + tuple(_TINY_PRIMES.tolist()):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES_64.tolist():
        a %= n
        if a == 0:
            continue
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


def _is_prime_words_np(values):
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(values.shape, dtype=bool)
    small = values < (1 << 32)
    out[small] = _is_prime_words_small_np(values[small])
    for i in np.flatnonzero(~small):
        out[i] = _is_prime_word_py(int(values[i]))
    return out


def _delicate_mask_np(primes, base, leading_to_zero):
    primes = np.asarray(primes, dtype=np.int64)
    alive = np.ones(primes.shape, dtype=bool)
    if primes.size == 0:
        return alive
    ndigits = np.ones(primes.shape, dtype=np.int64)
    t = primes // base
    while (t > 0).any():
        ndigits += t > 0
        t //= base
    pw = 1
    for pos in range(int(ndigits.max())):
        has = alive & (ndigits > pos)
        if not has.any():
            break
        idx = np.flatnonzero(has)
        p = primes[idx]
        old = (p // pw) % base
        leading = ndigits[idx] == pos + 1
        for nd in range(base):
            keep = old != nd
            if not leading_to_zero and nd == 0:
                keep &= ~leading
            v = p + (nd - old) * pw
            prime = np.zeros(idx.shape, dtype=bool)
            prime[keep] = _is_prime_words_np(v[keep])
            alive[idx[prime]] = False
        pw *= base
    return alive


def delicate_mask(primes, base, leading_to_zero=True):
    """Boolean mask: which of ``primes`` (all ``< KERNEL_LIMIT / base``) are delicate.

    Inputs are assumed prime; only the single-digit mutations are tested.
    """
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    if USE_NUMBA:
        return _delicate_mask_nb(primes, int(base), bool(leading_to_zero))
    return _delicate_mask_np(primes, int(base), bool(leading_to_zero))


def is_prime_words(values):
    """Deterministic primality for an int64 array of values below ``KERNEL_LIMIT``."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    if USE_NUMBA:
        return _is_prime_words_nb(values)
    return _is_prime_words_np(values)
