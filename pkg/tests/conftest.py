import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chartax.primes import build_prime_table  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(10**4)


@pytest.fixture(scope="session")
def mid_table():
    return build_prime_table(10**5)


@pytest.fixture(scope="session")
def big_table():
    return build_prime_table(10**6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
