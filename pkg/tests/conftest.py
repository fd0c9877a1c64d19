import json
from pathlib import Path

import pytest
from hypothesis import settings

from psgoldbach import build_arith_tables, sieve_primes

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def table():
    """Primes up to 2^21 + a little, enough for the unit tests."""
    return sieve_primes(1 << 22)


@pytest.fixture(scope="session")
def small_table():
    return sieve_primes(20_000)


@pytest.fixture(scope="session")
def arith():
    return build_arith_tables(20_000)


@pytest.fixture(scope="session")
def bound_ratios():
    return json.loads((FIXTURES / "bound_ratios.json").read_text())


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
