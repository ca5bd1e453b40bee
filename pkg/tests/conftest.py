import numpy as np
import pytest

from movingwells import SpatialDomain, WellField, build_potential

ACCEPTANCE_LINES = []


def record_acceptance(number: int, passed: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def unit_interval():
    return SpatialDomain([0.0], [1.0])


@pytest.fixture
def quartic_fixed(unit_interval):
    return build_potential(unit_interval, WellField.constant(unit_interval, [1.0]))


@pytest.fixture
def quartic_moving(unit_interval):
    wells = WellField.expression(unit_interval, [["1 + (x - 0.5)**2 / 2"]])
    return build_potential(unit_interval, wells)


@pytest.fixture
def quartic_2d(unit_interval):
    return build_potential(unit_interval, WellField.constant(unit_interval, [1.0, 0.0]))


@pytest.fixture
def min_power_2d(unit_interval):
    return build_potential(unit_interval, WellField.constant(unit_interval, [1.0, 0.0]),
                           family="min_power", q=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
