import pytest

from touchdown import MemsPower, PowerMonomial, Problem, WeightedPower, graded_grid


def r1_problem():
    # alpha = gamma = 2, beta = 0, g = (1-u)^2, h = 1
    return Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 1.0))


def khessian_problem():
    # radial 2-Hessian in dimension 5: alpha = 3, beta = 1, gamma = 4, g = (1-u)^3
    return Problem(PowerMonomial(3.0, 1.0), MemsPower(3.0), WeightedPower(4.0, 1.0))


@pytest.fixture
def r1():
    return r1_problem()


@pytest.fixture
def khessian():
    return khessian_problem()


@pytest.fixture(scope="session")
def grid2048():
    return graded_grid(2048, 2.0)


@pytest.fixture(scope="session")
def grid256():
    return graded_grid(256, 2.0)


# --- acceptance summary: one line per criterion ------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    num, title = mark.args
    prev = _CRITERIA.get(num, (title, True))
    _CRITERIA[num] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")
