import random

import pytest

from numpart.core import Instance

_ACCEPTANCE = []


def random_instance(rng: random.Random, n: int, bits: int) -> Instance:
    return Instance([rng.getrandbits(bits) for _ in range(n)])


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
