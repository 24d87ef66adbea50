import datetime as dt
import random

import pytest

from ndnsub import scheme
from ndnsub.algebra import default_group


@pytest.fixture(scope="session")
def toy():
    return default_group("TOY")


@pytest.fixture(scope="session")
def ss511():
    return default_group("SS511")


@pytest.fixture(scope="session")
def toy_setup(toy):
    """Producer state on the reduced-size group, shared across tests (read-only)."""
    pp, ms, tree = scheme.producer_setup(2023, rng=random.Random(11), group=toy)
    return pp, ms, tree


@pytest.fixture(scope="session")
def toy_alice(toy_setup):
    pp, ms, tree = toy_setup
    return scheme.register_consumer(ms, pp, b"alice", dt.date(2023, 1, 1),
                                    dt.date(2023, 6, 30), tree, random.Random(12))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
