import pytest
from hypothesis import given, settings, strategies as st

from delicate_primes.covering import CoveringEntry, CoveringSystem, multiplicative_order
from delicate_primes.errors import DuplicateEntry, FactorInvalid, ParseError
from delicate_primes.ingest import (
    FactorTable,
    format_covering,
    format_factor_table,
    load_covering,
    load_factor_table,
    parse_covering_file,
    parse_factor_table,
    validate_factors,
)
from conftest import DATA


def test_base2_fixture():
    system = load_covering(DATA / "base2_covering.txt")
    assert system.base == 2 and len(system.entries) == 7
    assert system.period == 64
    assert [e.factor for e in system.entries] == [3, 5, 17, 257, 65537, 641, 6700417]


def test_header_only_is_empty():
    s = parse_covering_file("# nothing\nbase 10\n\n")
    assert s.base == 10 and s.entries == () and s.period == 1


@pytest.mark.parametrize("text, msg", [
    ("base 10\nentry d=3 q=7 n=6 r=6\n", "must be < n"),
    ("base 10\nentry d=3 q=7 n=6 r=0 x=1\n", "unknown key"),
    ("base 10\nentry d=3 q=7 n=6\n", "missing"),
    ("base 10\nrow d=3 q=7 n=6 r=0\n", "unknown keyword"),
    ("entry d=3 q=7 n=6 r=0\n", "base"),
    ("base 10\nentry d=10 q=7 n=6 r=0\n", "digit"),
    ("base 10\nentry d=3 q=-7 n=6 r=0\n", "decimal"),
    ("", "empty"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_covering_file(text)


def test_parse_error_line_number():
    with pytest.raises(ParseError) as exc:
        parse_covering_file("# c\nbase 10\nentry d=3 q=7 n=6 r=0\nentry d=3 q=7 n=6 r=9\n")
    assert exc.value.lineno == 4


def test_duplicate_entry():
    with pytest.raises(DuplicateEntry):
        parse_covering_file("base 10\nentry d=3 q=7 n=6 r=0\nentry d=3 q=7 n=12 r=0\n")


entries = st.builds(
    lambda d, q, n, r: CoveringEntry(d, q, n, r % n),
    st.integers(1, 9), st.integers(2, 10**40), st.integers(1, 5000), st.integers(0, 10**6))


@given(st.lists(entries, max_size=20, unique_by=lambda e: (e.digit, e.factor, e.residue)))
@settings(max_examples=100)
def test_covering_round_trip(es):
    s = CoveringSystem(10, es)
    text = format_covering(s)
    assert parse_covering_file(text) == s
    assert format_covering(parse_covering_file(text)) == text


def test_factor_table_round_trip():
    text = (DATA / "factors_base10.txt").read_text()
    table = parse_factor_table(text)
    again = format_factor_table(table)
    assert parse_factor_table(again) == table
    assert format_factor_table(parse_factor_table(again)) == again


def test_validate_examples():
    ok = validate_factors(FactorTable(10, {6: ((13, True),)}))
    assert ok[0].probable_prime and ok[0].note == "prime"
    comp = validate_factors(parse_factor_table("base 10\nphi n=6 factors=91C\n"))
    assert not comp[0].probable_prime and not comp[0].mismatch
    assert "composite" in comp[0].note
    with pytest.raises(FactorInvalid):
        validate_factors(FactorTable(10, {6: ((11, True),)}))
    bad_claim = validate_factors(FactorTable(10, {6: ((91, True),)}))
    assert bad_claim[0].mismatch


def test_fixture_factors_have_cyclotomic_order():
    table = load_factor_table(DATA / "factors_base10.txt")
    for check in validate_factors(table):
        if check.probable_prime and (check.n * 10) % check.factor:
            assert check.n % multiplicative_order(10, check.factor) == 0
            assert multiplicative_order(10, check.factor) == check.n


def test_factor_table_errors():
    with pytest.raises(ParseError):
        parse_factor_table("base 10\nphi n=6 factors=7,x\n")
    with pytest.raises(DuplicateEntry):
        parse_factor_table("base 10\nphi n=6 factors=7\nphi n=6 factors=13\n")
