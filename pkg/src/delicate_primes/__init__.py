"""Search and certification of widely digitally delicate primes via covering congruences."""
from importlib.resources import files

from .covering import (
    CongruenceClass,
    CoveringEntry,
    CoveringSystem,
    ResidueClass,
    build_congruence,
    covers,
    crt,
    cyclotomic_value,
    mobius,
    multiplicative_order,
    verify_entry,
)
from .delicate import (
    DigitVector,
    MutationReport,
    SearchResult,
    enumerate_delicate,
    is_digitally_delicate,
    mutations,
    search_widely,
    to_digits,
)
from .ingest import FactorTable, parse_covering_file, parse_factor_table, validate_factors
from .primality import PrimalityVerdict, is_probable_prime, trial_divide
from .verify import WidelyReport, certify_widely, gcd_sweep, verify_period

__version__ = "0.1.0"


def data_path(name):
    """Path of a bundled fixture file, e.g. ``data_path("base2_covering.txt")``."""
    return files(__package__) / "data" / name
