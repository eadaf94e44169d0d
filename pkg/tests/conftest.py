import numpy as np
import pytest

from cagrover.exact_cover import brute_force, reference_instance, weighted_reference_instance

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cover():
    return reference_instance()


@pytest.fixture(scope="session")
def weighted():
    return weighted_reference_instance()


@pytest.fixture(scope="session")
def cover_solutions(cover):
    return brute_force(cover)


@pytest.fixture(scope="session")
def weighted_solutions(weighted):
    return brute_force(weighted)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
