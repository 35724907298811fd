import random

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from delicate_primes.primality import (
    Verdict,
    classify,
    external_proof,
    is_probable_prime,
    is_strong_lucas_probable_prime,
    is_strong_probable_prime,
    trial_divide,
)
from oracles import is_prime_mr, is_prime_trial, sieve


@pytest.mark.parametrize("n, expected", [(7, True), (561, False), (0, False), (1, False),
                                         (2, True), (3, True), (4, False)])
def test_small_values(n, expected):
    assert is_probable_prime(n) is expected


@pytest.mark.parametrize("n, bound, expected", [(91, 100, 7), (97, 100, None),
                                                (10**20, 10, 2), (1, 10, None)])
def test_trial_divide(n, bound, expected):
    assert trial_divide(n, bound) == expected


def test_trial_divide_past_table():
    n = 1_000_003 * 1_000_033
    assert trial_divide(n, 2_000_000) == 1_000_003
    assert trial_divide(n, 1_000_000) is None


def test_bare_bpsw_exhaustive_below_10_7():
    # trial_bound=2 leaves every odd n to the Fermat + Lucas pair
    limit = 10**7
    flags = sieve(limit)
    bad = [n for n in range(limit) if is_probable_prime(n, trial_bound=2) != bool(flags[n])]
    assert bad == []


def test_default_path_below_10_7():
    flags = sieve(10**7)
    for n in list(range(10**5)) + list(range(10**5 + 1, 10**7, 97)):
        assert is_probable_prime(n) == bool(flags[n]), n


def test_no_false_negatives_below_10_6():
    flags = sieve(10**6)
    assert all(is_probable_prime(p) for p in range(10**6) if flags[p])


def test_random_128_bit_against_miller_rabin():
    rng = random.Random(2024)
    for _ in range(10**4):
        n = rng.getrandbits(128) | 1
        assert is_probable_prime(n) == is_prime_mr(n)


@pytest.mark.parametrize("n", [
    2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383,
    341550071728321, 3825123056546413051,  # strong pseudoprimes to several bases
    5459, 5777, 10877, 16109, 18971,  # strong Lucas pseudoprimes
])
def test_known_pseudoprimes_rejected(n):
    assert not is_probable_prime(n)
    assert not is_prime_trial(n) if n < 10**8 else not is_prime_mr(n)


def test_component_tests_match_gmpy2():
    rng = random.Random(5)
    for _ in range(2000):
        n = rng.getrandbits(rng.randint(8, 200)) | 1
        if n < 5 or gmpy2.is_square(n):
            continue
        assert is_strong_probable_prime(n, 2) == gmpy2.is_strong_prp(n, 2)
        assert is_strong_lucas_probable_prime(n) == gmpy2.is_strong_selfridge_prp(n)


@pytest.mark.parametrize("n", [5459, 5777, 10877, 16109, 18971])
def test_lucas_pseudoprimes_pass_lucas_alone(n):
    assert is_strong_lucas_probable_prime(n)


@given(st.integers(min_value=2, max_value=2**64))
@settings(max_examples=2000, deadline=None)
def test_exact_below_2_64(n):
    assert is_probable_prime(n) == is_prime_mr(n)


def test_classify_witnesses():
    assert classify(91).witness == {"factor": 7}
    assert classify(97).verdict is Verdict.PROBABLE_PRIME
    v = classify(3215031751)
    assert v.verdict is Verdict.COMPOSITE and v.witness["factor"] == 151
    big = (2**89 - 1) * (2**107 - 1)
    assert classify(big).method == "strong-fermat"
    assert external_proof(97).verdict is Verdict.PROVEN_PRIME_EXTERNAL


def test_mersenne_primes():
    for e in (61, 89, 107, 127, 521, 607):
        assert is_probable_prime(2**e - 1)
        assert not is_probable_prime(2**e + 1)
