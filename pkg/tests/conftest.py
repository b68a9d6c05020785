import pytest

from h2dri.cli import SCENARIOS, SweepSpec, parse_range, run_sweep
from h2dri.flowsheet import ScenarioConfig, solve_scenario
from h2dri.thermo import default_properties

GRID = parse_range("1023.15:1273.15:25")
T_HOT = 1273.15


@pytest.fixture(scope="session")
def props():
    return default_properties()


@pytest.fixture(scope="session")
def sweep():
    """Full 4-scenario x 11-temperature sweep, keyed by (scenario, T)."""
    cells = run_sweep(SweepSpec(list(SCENARIOS), GRID), ScenarioConfig())
    return {(c.scenario, c.t_in): c for c in cells}


@pytest.fixture(scope="session")
def hot_reports():
    """Scenario reports at the 1000 C operating point."""
    return {name: solve_scenario(ScenarioConfig(kind=kind, t_in=T_HOT))
            for name, kind in SCENARIOS.items()}


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion and return the verdict."""
    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
