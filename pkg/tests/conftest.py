import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from trunctail import pareto_shift, weibull_shift  # noqa: E402

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def record_acceptance(criterion, passed, detail):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pareto32():
    """ParetoShift(alpha=3, c=2): mean -1/2."""
    return pareto_shift(3.0, 2.0)


@pytest.fixture(scope="session")
def pareto_unit_mean():
    """ParetoShift(alpha=3, c=2.5): mean -1, y_beta near 4.8 at beta = 2."""
    return pareto_shift(3.0, 2.5)


@pytest.fixture(scope="session")
def weibull_half():
    """WeibullShift(xi=1/2, c=3): mean -1."""
    return weibull_shift(0.5, 3.0)


@pytest.fixture(scope="session")
def weibull_c7():
    """WeibullShift(xi=1/2, c=7): mean -5, y_eta_star near 7.5e3."""
    return weibull_shift(0.5, 7.0)
