import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from delicate_primes import ResidueClass, build_congruence, data_path, search_widely
from delicate_primes.ingest import load_covering

DATA = Path(str(data_path("")))
RUN_SLOW = os.environ.get("DELICATE_PRIMES_SLOW", "") not in ("", "0")

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="optional long job; set DELICATE_PRIMES_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _criteria.append((mark.args[0], mark.args[1], status, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, status, name in sorted(_criteria, key=lambda c: (str(c[0]), c[3])):
        terminalreporter.write_line(f"[{status}] criterion {n}: {title} ({name})")


@pytest.fixture(scope="session")
def prime_4030():
    return int((DATA / "wdd_4030.txt").read_text().strip())


@pytest.fixture(scope="session")
def base2_system():
    return load_covering(DATA / "base2_covering.txt")


@pytest.fixture(scope="session")
def base2_class(base2_system):
    return build_congruence(base2_system, [ResidueClass(1, 2)])


@pytest.fixture(scope="session")
def base2_hit(base2_system, base2_class):
    hit = search_widely(base2_class, base2_system, 0, 100_000, workers=1)
    assert hit is not None
    return hit
