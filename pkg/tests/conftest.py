import pytest

from psc_auctions import SharingContract, Utility, make_model

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the lines are repeated in the terminal summary."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _CRITERIA.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ex1():
    return make_model("example1")


@pytest.fixture(scope="session")
def ex2():
    return make_model("example2_pa")


@pytest.fixture(scope="session")
def cv3():
    return make_model("common_value_avg", n_buyers=3)


@pytest.fixture(scope="session")
def lin():
    return Utility.linear()


@pytest.fixture(scope="session")
def cara():
    return Utility.cara(1.0, 1.0)


@pytest.fixture
def posc():
    return SharingContract.posc
